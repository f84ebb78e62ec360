//! Gap-free images of canonical forms.
//!
//! Extending a node by an element only makes sense when the atoms of the
//! result still form a prefix of every uset; anything else has a gap and can
//! never be canonical. Given the atoms already used, the candidate images of
//! a canonical form `c` are the relabelings that send each atom of `c`
//! either onto an already used atom or onto the next fresh ones, in any
//! order.

use std::collections::HashMap;
use std::ops::ControlFlow;
use std::sync::Arc;

use crate::value::{for_each_assignment, Atom, AtomGroup, Uset, Value};

/// How many atoms of each uset a node uses; by construction these are
/// prefixes `0..count`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct UsedAtoms {
    counts: Vec<(Uset, u32)>,
}

impl UsedAtoms {
    /// Prefix counts for `o`, or `None` if its atoms contain a gap.
    pub fn of(o: &Value) -> Option<UsedAtoms> {
        let mut all = Vec::new();
        o.for_each_atom(&mut |a| all.push(a));
        UsedAtoms::from_atoms(all)
    }

    pub fn from_atoms(all: Vec<Atom>) -> Option<UsedAtoms> {
        let groups = AtomGroup::from_atoms(all);
        let mut counts = Vec::with_capacity(groups.len());
        for g in groups {
            let n = g.sources.len() as u32;
            if g.sources[n as usize - 1] + 1 != n {
                return None;
            }
            counts.push((g.uset, n));
        }
        Some(UsedAtoms { counts })
    }

    pub fn count(&self, u: Uset) -> u32 {
        self.counts
            .binary_search_by(|(x, _)| x.cmp(&u))
            .map_or(0, |i| self.counts[i].1)
    }

    /// Counts restricted to the given usets, used as a cache key.
    fn restricted(&self, usets: &[Uset]) -> Vec<u32> {
        usets.iter().map(|u| self.count(*u)).collect()
    }
}

/// All distinct images of `c` that keep `used ∪ atoms(image)` gap-free,
/// sorted ascending.
pub fn gap_free_images(c: &Value, used: &UsedAtoms) -> Vec<Value> {
    let mut groups = AtomGroup::collect(c);
    if groups.is_empty() {
        return vec![c.clone()];
    }
    let mut bases = Vec::with_capacity(groups.len());
    for g in &mut groups {
        let base = used.count(g.uset);
        let limit = (base + g.sources.len() as u32).min(g.uset.size());
        g.targets = (0..limit).collect();
        bases.push(base);
    }
    let mut out = Vec::new();
    let _ = for_each_assignment::<()>(&groups, &mut |asg| {
        for (g, &base) in bases.iter().enumerate() {
            let chosen = asg.chosen(g);
            let fresh = chosen.iter().filter(|&&t| t >= base).count() as u32;
            if chosen.iter().any(|&t| t >= base + fresh) {
                return ControlFlow::Continue(());
            }
        }
        out.push(asg.apply(c));
        ControlFlow::Continue(())
    });
    out.sort_unstable();
    out.dedup();
    out
}

/// Memoized gap-free images for one list of canonical forms.
pub(crate) struct ImageCache {
    cnfs: Arc<Vec<Value>>,
    usets: Vec<Vec<Uset>>,
    memo: HashMap<(usize, Vec<u32>), Arc<Vec<Value>>>,
}

impl ImageCache {
    pub fn new(cnfs: Arc<Vec<Value>>) -> ImageCache {
        let usets = cnfs
            .iter()
            .map(|c| AtomGroup::collect(c).into_iter().map(|g| g.uset).collect())
            .collect();
        ImageCache {
            cnfs,
            usets,
            memo: HashMap::new(),
        }
    }

    /// Every gap-free image of every canonical form, sorted ascending.
    pub fn extensions(&mut self, used: &UsedAtoms) -> Vec<Value> {
        let mut all = Vec::new();
        for i in 0..self.cnfs.len() {
            let key = (i, used.restricted(&self.usets[i]));
            let images = self
                .memo
                .entry(key)
                .or_insert_with(|| Arc::new(gap_free_images(&self.cnfs[i], used)))
                .clone();
            all.extend(images.iter().cloned());
        }
        all.sort_unstable();
        all
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresh_atoms_are_the_next_ones() {
        let a = Uset::new(1000, "a");
        let a0 = Value::from(a.atom(0));
        assert_eq!(gap_free_images(&a0, &UsedAtoms::default()), std::slice::from_ref(&a0));
        let used = UsedAtoms::of(&a0).unwrap();
        assert_eq!(gap_free_images(&a0, &used), [a0, a.atom(1).into()]);
    }

    #[test]
    fn respects_uset_size() {
        let a = Uset::new(2, "a");
        let used = UsedAtoms::of(&Value::tuple([a.atom(0).into(), a.atom(1).into()])).unwrap();
        assert_eq!(gap_free_images(&a.atom(0).into(), &used).len(), 2);
    }

    #[test]
    fn pair_images_over_empty_use() {
        let a = Uset::new(5, "a");
        let c = Value::tuple([a.atom(0).into(), a.atom(1).into()]);
        let shown: Vec<String> = gap_free_images(&c, &UsedAtoms::default())
            .iter()
            .map(|v| v.to_string())
            .collect();
        assert_eq!(shown, ["(a0, a1)", "(a1, a0)"]);
    }

    #[test]
    fn gapped_objects_have_no_prefix_counts() {
        let a = Uset::new(3, "a");
        assert!(UsedAtoms::of(&Value::set([a.atom(0).into(), a.atom(2).into()])).is_none());
        let used = UsedAtoms::of(&Value::set([a.atom(0).into(), a.atom(1).into()])).unwrap();
        assert_eq!(used.count(a), 2);
    }
}
