//! Enumeration of injective, uset-respecting atom assignments.
//!
//! Isomorphism testing, the brute-force canonical form and the canonicity
//! check all reduce to walking every injective map from the atoms of one
//! object into a set of candidate targets, one uset at a time.

use std::ops::ControlFlow;

use super::{Atom, Uset, Value};

/// Atoms of one uset that must be mapped, and the indices they may go to.
#[derive(Debug, Clone)]
pub(crate) struct AtomGroup {
    pub uset: Uset,
    /// Sorted source indices.
    pub sources: Vec<u32>,
    pub targets: Vec<u32>,
}

impl AtomGroup {
    /// Groups atoms by uset, with sorted sources and empty targets.
    pub fn collect(o: &Value) -> Vec<AtomGroup> {
        let mut all = Vec::new();
        o.for_each_atom(&mut |a| all.push(a));
        Self::from_atoms(all)
    }

    pub fn from_atoms(mut all: Vec<Atom>) -> Vec<AtomGroup> {
        all.sort_unstable();
        all.dedup();
        let mut groups: Vec<AtomGroup> = Vec::new();
        for a in all {
            match groups.last_mut() {
                Some(g) if g.uset == a.uset() => g.sources.push(a.index()),
                _ => groups.push(AtomGroup {
                    uset: a.uset(),
                    sources: vec![a.index()],
                    targets: Vec::new(),
                }),
            }
        }
        groups
    }
}

/// A complete injective assignment for a list of groups.
pub(crate) struct Assignment<'g> {
    groups: &'g [AtomGroup],
    chosen: Vec<Vec<u32>>,
}

impl Assignment<'_> {
    pub fn image(&self, atom: Atom) -> Atom {
        for (g, chosen) in self.groups.iter().zip(&self.chosen) {
            if g.uset == atom.uset() {
                return match g.sources.binary_search(&atom.index()) {
                    Ok(pos) => atom.with_index(chosen[pos]),
                    Err(_) => atom,
                };
            }
        }
        atom
    }

    pub fn apply(&self, o: &Value) -> Value {
        o.relabel(&|a| self.image(a))
    }

    /// Chosen target indices for group `g`, parallel to its sources.
    pub fn chosen(&self, g: usize) -> &[u32] {
        &self.chosen[g]
    }
}

/// Calls `visit` once per injective assignment of every group's sources into
/// its targets. Stops early when `visit` breaks.
pub(crate) fn for_each_assignment<B>(
    groups: &[AtomGroup],
    visit: &mut impl FnMut(&Assignment<'_>) -> ControlFlow<B>,
) -> ControlFlow<B> {
    let mut state = Assignment {
        groups,
        chosen: groups.iter().map(|g| Vec::with_capacity(g.sources.len())).collect(),
    };
    let mut used: Vec<Vec<bool>> = groups.iter().map(|g| vec![false; g.targets.len()]).collect();
    if groups.iter().any(|g| g.sources.len() > g.targets.len()) {
        return ControlFlow::Continue(());
    }
    descend(groups, 0, &mut state, &mut used, visit)
}

fn descend<B>(
    groups: &[AtomGroup],
    g: usize,
    state: &mut Assignment<'_>,
    used: &mut [Vec<bool>],
    visit: &mut impl FnMut(&Assignment<'_>) -> ControlFlow<B>,
) -> ControlFlow<B> {
    if g == groups.len() {
        return visit(state);
    }
    if state.chosen[g].len() == groups[g].sources.len() {
        return descend(groups, g + 1, state, used, visit);
    }
    for t in 0..groups[g].targets.len() {
        if used[g][t] {
            continue;
        }
        used[g][t] = true;
        state.chosen[g].push(groups[g].targets[t]);
        let flow = descend(groups, g, state, used, visit);
        state.chosen[g].pop();
        used[g][t] = false;
        flow?;
    }
    ControlFlow::Continue(())
}
