//! Orderly generation of canonical forms.
//!
//! Objects are grown along the parent tree: a tuple extends its parent by one
//! trailing component, a set by one element larger than all current ones, a
//! map by the entry for its next key. Every canonical object has a canonical
//! parent, so a depth-first walk that discards non-canonical nodes reaches
//! each canonical form exactly once and needs no visited set.
//!
//! Extensions come from the canonical forms of the component domain,
//! relabeled onto used or next-fresh atoms only (see [`gap_free_images`]).

mod images;
mod tokens;

use std::collections::HashSet;
use std::ops::ControlFlow;
use std::sync::Arc;

pub use images::{gap_free_images, UsedAtoms};

use images::ImageCache;
use tokens::{Comparator, Outlook};

use crate::domain::{Domain, Kind};
use crate::error::{Error, Result};
use crate::value::{AtomGroup, Value};

/// The object this one is grown from; `None` stands for the root ⊥.
///
/// Atoms, built-in values, the empty tuple, the empty set and the empty map
/// have no parent. A tuple loses its last component, a set its largest
/// element and a map its entry with the largest key.
pub fn parent(o: &Value) -> Option<Value> {
    match o {
        Value::Tuple(c) if !c.is_empty() => Some(Value::tuple(c[..c.len() - 1].iter().cloned())),
        Value::Set(c) if !c.is_empty() => Some(Value::set_from_sorted(c[..c.len() - 1].to_vec())),
        Value::Map(p) if !p.is_empty() => Some(Value::map_from_sorted(p[..p.len() - 1].to_vec())),
        _ => None,
    }
}

/// True iff no uset-respecting permutation maps `o` to something smaller.
pub fn is_canonical(o: &Value) -> bool {
    canonical_prefix(o).is_some()
}

/// Prefix counts of `o` if it is canonical.
///
/// Searches relabelings of the used atoms, fixing the preimages of targets
/// 0, 1, ... in turn and abandoning a branch as soon as no completion can be
/// smaller than `o`.
fn canonical_prefix(o: &Value) -> Option<UsedAtoms> {
    let used = UsedAtoms::of(o)?;
    let groups = AtomGroup::collect(o);
    if groups.is_empty() {
        return Some(used);
    }
    let mut search = Search {
        cmp: Comparator::new(o, &groups),
        image: groups.iter().map(|g| vec![None; g.sources.len()]).collect(),
        lowest: vec![0; groups.len()],
    };
    search.descend(0).is_continue().then_some(used)
}

struct Search {
    cmp: Comparator,
    image: Vec<Vec<Option<u32>>>,
    lowest: Vec<u32>,
}

impl Search {
    /// Breaks when a strictly smaller relabeling exists.
    fn descend(&mut self, g: usize) -> ControlFlow<()> {
        let Some(group) = self.image.get(g) else {
            return ControlFlow::Continue(());
        };
        let n = group.len();
        if self.lowest[g] as usize == n {
            return self.descend(g + 1);
        }
        for p in 0..n {
            if self.image[g][p].is_some() {
                continue;
            }
            let target = self.lowest[g];
            self.image[g][p] = Some(target);
            self.lowest[g] += 1;
            let image = &self.image;
            let outlook = self.cmp.outlook(&|g, p| image[g][p], &self.lowest);
            let flow = match outlook {
                Outlook::Smaller => ControlFlow::Break(()),
                Outlook::NotSmaller => ControlFlow::Continue(()),
                Outlook::Open => self.descend(g),
            };
            self.lowest[g] -= 1;
            self.image[g][p] = None;
            flow?;
        }
        ControlFlow::Continue(())
    }
}

/// A node of the search tree: a canonical partial object.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchNode {
    pub partial: Value,
    pub depth: usize,
    pub used: UsedAtoms,
}

impl SearchNode {
    /// Wraps a canonical object; `None` if it is not canonical.
    pub fn new(partial: Value) -> Option<SearchNode> {
        let used = canonical_prefix(&partial)?;
        let depth = match &partial {
            Value::Tuple(c) | Value::Set(c) => c.len(),
            Value::Map(p) => p.len(),
            _ => 0,
        };
        Some(SearchNode { partial, depth, used })
    }
}

/// Candidate elements for growing `node` with an element of `sub`.
///
/// Every gap-free image of every canonical form of `sub`; when the node is a
/// set, only those larger than its current maximum.
pub fn extensions(node: &SearchNode, sub: &Domain) -> Result<Vec<Value>> {
    let mut cache = ImageCache::new(cnfs_list(sub)?);
    let mut exts = cache.extensions(&node.used);
    if let Value::Set(items) = &node.partial {
        if let Some(max) = items.last() {
            exts.retain(|e| e > max);
        }
    }
    Ok(exts)
}

/// Iterator over the canonical forms of a strict domain.
pub struct Cnfs {
    inner: Box<dyn Iterator<Item = Result<Value>> + Send>,
}

impl Iterator for Cnfs {
    type Item = Result<Value>;

    fn next(&mut self) -> Option<Self::Item> {
        self.inner.next()
    }
}

/// One canonical representative per isomorphism class of `d`.
pub fn cnfs(d: &Domain) -> Result<Cnfs> {
    if !d.is_strict() {
        return Err(Error::NonStrict {
            construction: d.non_strict_culprit(),
        });
    }
    let inner: Box<dyn Iterator<Item = Result<Value>> + Send> = match d.kind() {
        Kind::Range(_) | Kind::Boolean | Kind::NoneDomain => Box::new(d.iter()),
        Kind::Uset(u) => Box::new(std::iter::once(Ok(u.atom(0).into()))),
        Kind::CnfValues { items, .. } => Box::new(items.clone().into_iter().map(Ok)),
        Kind::Product(parts) => {
            let lists = parts.iter().map(cnfs_list).collect::<Result<Vec<_>>>()?;
            Box::new(Dfs::new(Shape::Tuple((0..lists.len()).collect()), lists))
        }
        Kind::Sequences(part, k) => {
            let list = cnfs_list(part)?;
            Box::new(Dfs::new(Shape::Tuple(vec![0; *k]), vec![list]))
        }
        Kind::Subsets { ground, size } => {
            let list = cnfs_list(ground.domain())?;
            Box::new(Dfs::new(Shape::Set(*size), vec![list]))
        }
        Kind::Mappings { keys, value } => {
            let keys = keys.get()?.to_vec();
            let list = cnfs_list(value)?;
            Box::new(Dfs::new(Shape::Map(keys), vec![list]))
        }
        Kind::Join(parts) => {
            let parts = parts.clone();
            let mut seen = HashSet::new();
            let mut streams = Vec::new();
            for p in &parts {
                streams.push(cnfs(p)?);
            }
            Box::new(streams.into_iter().flatten().filter(move |r| match r {
                Ok(v) => seen.insert(v.clone()),
                Err(_) => true,
            }))
        }
        Kind::Filter { inner, pred, label, .. } => {
            let pred = pred.clone();
            let label = label.clone();
            Box::new(cnfs(inner)?.filter_map(move |r| match r {
                Ok(v) => match pred(&v) {
                    Ok(true) => Some(Ok(v)),
                    Ok(false) => None,
                    Err(e) => Some(Err(Error::Transform {
                        stage: format!("filter `{label}`"),
                        element: v.to_string(),
                        source: e,
                    })),
                },
                err => Some(err),
            }))
        }
        Kind::Values(_) | Kind::Map { .. } => unreachable!("non-strict kinds are rejected above"),
    };
    Ok(Cnfs { inner })
}

fn cnfs_list(d: &Domain) -> Result<Arc<Vec<Value>>> {
    Ok(Arc::new(cnfs(d)?.collect::<Result<Vec<_>>>()?))
}

/// How a composite object grows.
enum Shape {
    /// Component `i` of the tuple draws from list `levels[i]`.
    Tuple(Vec<usize>),
    /// Optional fixed cardinality.
    Set(Option<usize>),
    /// Sorted keys; values draw from list 0.
    Map(Vec<Value>),
}

struct Frame {
    children: std::vec::IntoIter<Value>,
}

struct Dfs {
    shape: Shape,
    caches: Vec<ImageCache>,
    stack: Vec<Frame>,
    root: Option<Value>,
}

impl Dfs {
    fn new(shape: Shape, lists: Vec<Arc<Vec<Value>>>) -> Dfs {
        let root = match shape {
            Shape::Tuple(_) => Value::tuple([]),
            Shape::Set(_) => Value::empty_set(),
            Shape::Map(_) => Value::map_from_sorted(Vec::new()),
        };
        Dfs {
            shape,
            caches: lists.into_iter().map(ImageCache::new).collect(),
            stack: Vec::new(),
            root: Some(root),
        }
    }

    fn depth(node: &Value) -> usize {
        match node {
            Value::Tuple(c) | Value::Set(c) => c.len(),
            Value::Map(p) => p.len(),
            _ => 0,
        }
    }

    fn is_complete(&self, node: &Value) -> bool {
        let depth = Dfs::depth(node);
        match &self.shape {
            Shape::Tuple(levels) => depth == levels.len(),
            Shape::Set(size) => size.is_none_or(|k| depth == k),
            Shape::Map(keys) => depth == keys.len(),
        }
    }

    fn children(&mut self, node: &Value, used: &UsedAtoms) -> Vec<Value> {
        let depth = Dfs::depth(node);
        match &self.shape {
            Shape::Tuple(levels) => {
                let Some(&list) = levels.get(depth) else {
                    return Vec::new();
                };
                let prefix = node.as_tuple().expect("tuple node");
                self.caches[list]
                    .extensions(used)
                    .into_iter()
                    .map(|e| Value::tuple(prefix.iter().cloned().chain([e])))
                    .collect()
            }
            Shape::Set(size) => {
                let items = node.as_set().expect("set node");
                if size.is_some_and(|k| items.len() >= k) {
                    return Vec::new();
                }
                let mut exts = self.caches[0].extensions(used);
                if let Some(max) = items.last() {
                    exts.retain(|e| e > max);
                }
                exts.into_iter()
                    .map(|e| {
                        let mut grown = items.to_vec();
                        grown.push(e);
                        Value::set_from_sorted(grown)
                    })
                    .collect()
            }
            Shape::Map(keys) => {
                let Some(key) = keys.get(depth) else {
                    return Vec::new();
                };
                let pairs = node.as_map().expect("map node");
                let mut atoms = Vec::new();
                node.for_each_atom(&mut |a| atoms.push(a));
                key.for_each_atom(&mut |a| atoms.push(a));
                let Some(with_key) = UsedAtoms::from_atoms(atoms) else {
                    return Vec::new();
                };
                self.caches[0]
                    .extensions(&with_key)
                    .into_iter()
                    .map(|e| {
                        let mut grown = pairs.to_vec();
                        grown.push((key.clone(), e));
                        Value::map_from_sorted(grown)
                    })
                    .collect()
            }
        }
    }

    fn push(&mut self, node: Value, used: UsedAtoms) {
        let children = self.children(&node, &used);
        if !children.is_empty() {
            self.stack.push(Frame {
                children: children.into_iter(),
            });
        }
    }
}

impl Iterator for Dfs {
    type Item = Result<Value>;

    fn next(&mut self) -> Option<Self::Item> {
        if let Some(root) = self.root.take() {
            self.push(root.clone(), UsedAtoms::default());
            if self.is_complete(&root) {
                return Some(Ok(root));
            }
        }
        loop {
            let frame = self.stack.last_mut()?;
            let Some(child) = frame.children.next() else {
                self.stack.pop();
                continue;
            };
            let Some(used) = canonical_prefix(&child) else {
                continue;
            };
            let complete = self.is_complete(&child);
            self.push(child.clone(), used);
            if complete {
                return Some(Ok(child));
            }
        }
    }
}
