//! Registry of unlabeled sets.
//!
//! A uset is a class of atoms that may be freely permuted among themselves.
//! Ids are handed out in creation order and never reused, so the relative
//! order of two usets is fixed by the order in which they were registered.

use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

#[derive(Debug)]
struct Entry {
    name: Arc<str>,
    size: u32,
}

fn registry() -> &'static RwLock<Vec<Entry>> {
    static REGISTRY: OnceLock<RwLock<Vec<Entry>>> = OnceLock::new();
    REGISTRY.get_or_init(|| RwLock::new(Vec::new()))
}

/// Handle to a registered uset.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Uset {
    id: u32,
}

impl Uset {
    /// Registers a fresh uset of `size` atoms. Names need not be unique.
    ///
    /// Panics if `size` is zero.
    pub fn new(size: u32, name: &str) -> Uset {
        assert!(size > 0, "a uset needs at least one atom");
        let mut entries = registry().write().expect("uset registry poisoned");
        let id = u32::try_from(entries.len()).expect("too many usets");
        entries.push(Entry {
            name: Arc::from(name),
            size,
        });
        Uset { id }
    }

    pub fn id(self) -> u32 {
        self.id
    }

    pub fn size(self) -> u32 {
        registry().read().expect("uset registry poisoned")[self.id as usize].size
    }

    pub fn name(self) -> Arc<str> {
        registry().read().expect("uset registry poisoned")[self.id as usize]
            .name
            .clone()
    }

    /// The atom with the given index. Panics when out of range.
    pub fn atom(self, index: u32) -> Atom {
        assert!(
            index < self.size(),
            "atom index {index} out of range for uset {}",
            self.name()
        );
        Atom { uset: self, index }
    }

    pub fn atoms(self) -> impl Iterator<Item = Atom> {
        (0..self.size()).map(move |index| Atom { uset: self, index })
    }
}

impl fmt::Debug for Uset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Uset({}#{}, size={})", self.name(), self.id, self.size())
    }
}

/// A member of a uset. Ordered by `(uset id, index)`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    uset: Uset,
    index: u32,
}

impl Atom {
    pub fn uset(self) -> Uset {
        self.uset
    }

    pub fn index(self) -> u32 {
        self.index
    }

    pub(crate) fn with_index(self, index: u32) -> Atom {
        Atom { uset: self.uset, index }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.uset.name(), self.index)
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
