use std::collections::BTreeSet;
use std::ops::ControlFlow;

use super::injection::{for_each_assignment, AtomGroup};
use super::{Atom, Value};

/// The uset atoms occurring in `o`. Built-in values (integers, text,
/// booleans, unit) sit in singleton usets and are never reported.
pub fn atoms(o: &Value) -> BTreeSet<Atom> {
    let mut out = BTreeSet::new();
    o.for_each_atom(&mut |a| {
        out.insert(a);
    });
    out
}

/// True iff some atom has a smaller atom of the same uset missing from `s`.
pub fn has_gap<'a>(s: impl IntoIterator<Item = &'a Atom>) -> bool {
    let groups = AtomGroup::from_atoms(s.into_iter().copied().collect());
    groups.iter().any(|g| !is_prefix(&g.sources))
}

/// `sorted` is strictly increasing; it is a prefix iff its last element is
/// `len - 1`.
pub(crate) fn is_prefix(sorted: &[u32]) -> bool {
    sorted.last().is_none_or(|&last| last as usize + 1 == sorted.len())
}

/// True iff some uset-respecting permutation maps `b` onto `a`.
///
/// Only bijections between the atoms of `b` and the atoms of `a` are tried;
/// any other atom can be left fixed.
pub fn is_isomorphic(a: &Value, b: &Value) -> bool {
    let target_groups = AtomGroup::collect(a);
    let mut groups = AtomGroup::collect(b);
    if groups.len() != target_groups.len() {
        return false;
    }
    for (g, t) in groups.iter_mut().zip(&target_groups) {
        if g.uset != t.uset || g.sources.len() != t.sources.len() {
            return false;
        }
        g.targets = t.sources.clone();
    }
    for_each_assignment(&groups, &mut |asg| {
        if asg.apply(b) == *a {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })
    .is_break()
}

/// Brute-force canonical form: the smallest object in the isomorphism class
/// of `o`.
///
/// A canonical form has no gap, so it uses exactly the first `k` atoms of
/// every uset that contributes `k` atoms to `o`; every bijection onto those
/// prefixes is tried.
pub fn canonical_form_oracle(o: &Value) -> Value {
    let mut groups = AtomGroup::collect(o);
    for g in &mut groups {
        g.targets = (0..g.sources.len() as u32).collect();
    }
    let mut best = o.clone();
    let _ = for_each_assignment::<()>(&groups, &mut |asg| {
        let image = asg.apply(o);
        if image < best {
            best = image;
        }
        ControlFlow::Continue(())
    });
    best
}
