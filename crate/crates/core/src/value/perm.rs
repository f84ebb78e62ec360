use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{Atom, Value};
use crate::error::{Error, Result};

/// A uset-respecting bijection on atoms, stored sparsely: atoms outside the
/// support are fixed.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Permutation {
    images: BTreeMap<Atom, Atom>,
}

impl Permutation {
    pub fn identity() -> Permutation {
        Permutation::default()
    }

    /// Swaps two atoms of the same uset.
    pub fn swap(a: Atom, b: Atom) -> Result<Permutation> {
        Permutation::from_pairs([(a, b), (b, a)])
    }

    /// Builds a permutation from explicit `(atom, image)` pairs.
    ///
    /// The pairs must stay inside each atom's uset and must form a bijection
    /// on their support (every image is also a source).
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Atom, Atom)>) -> Result<Permutation> {
        let mut images = BTreeMap::new();
        for (from, to) in pairs {
            if from.uset() != to.uset() {
                return Err(Error::invalid(format!(
                    "permutation maps {from} outside its uset to {to}"
                )));
            }
            if let Some(prev) = images.insert(from, to) {
                if prev != to {
                    return Err(Error::invalid(format!("{from} mapped twice")));
                }
            }
        }
        let targets: BTreeSet<Atom> = images.values().copied().collect();
        if targets.len() != images.len() || !targets.iter().all(|t| images.contains_key(t)) {
            return Err(Error::invalid("permutation is not a bijection on its support"));
        }
        images.retain(|k, v| k != v);
        Ok(Permutation { images })
    }

    pub fn image(&self, atom: Atom) -> Atom {
        self.images.get(&atom).copied().unwrap_or(atom)
    }

    pub fn inverse(&self) -> Permutation {
        Permutation {
            images: self.images.iter().map(|(k, v)| (*v, *k)).collect(),
        }
    }

    /// `self` first, then `next`: `x ↦ next(self(x))`.
    pub fn then(&self, next: &Permutation) -> Permutation {
        let mut images = BTreeMap::new();
        for atom in self.images.keys().chain(next.images.keys()) {
            let img = next.image(self.image(*atom));
            if img != *atom {
                images.insert(*atom, img);
            }
        }
        Permutation { images }
    }

    pub fn is_identity(&self) -> bool {
        self.images.is_empty()
    }

    /// Relabels every atom of `o`; sets and maps are re-sorted.
    pub fn apply(&self, o: &Value) -> Value {
        if self.images.is_empty() {
            return o.clone();
        }
        o.relabel(&|a| self.image(a))
    }
}

/// `o^p`.
pub fn apply(o: &Value, p: &Permutation) -> Value {
    p.apply(o)
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.images.iter()).finish()
    }
}
