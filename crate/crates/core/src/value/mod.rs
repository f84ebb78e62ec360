//! Basic objects: the immutable value trees every domain produces.

mod injection;
mod iso;
mod json;
mod perm;
mod uset;

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

pub(crate) use injection::{for_each_assignment, AtomGroup};
pub use iso::{atoms, canonical_form_oracle, has_gap, is_isomorphic};
pub use json::{value_from_json, value_to_json};
pub use perm::{apply, Permutation};
pub use uset::{Atom, Uset};

use crate::error::{Error, Result};

/// An immutable basic object.
///
/// Sets and maps keep their children sorted under [`Ord`], so structural
/// equality coincides with set/map equality and comparison is canonical by
/// construction.
///
/// The total order ranks variants as
/// `Unit < Bool < Int < Text < Atom < Tuple < Set < Map`. Inside a variant,
/// integers compare numerically, text by code point, atoms by
/// `(uset id, index)`. Tuples, sets and maps compare by length first and then
/// lexicographically over their (sorted) children; map entries compare as
/// `(key, value)` pairs, which makes a map order exactly like the set of its
/// pairs.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Value {
    Unit,
    Bool(bool),
    Int(i64),
    Text(Arc<str>),
    Atom(Atom),
    Tuple(Arc<[Value]>),
    Set(Arc<[Value]>),
    Map(Arc<[(Value, Value)]>),
}

impl Value {
    pub fn text(s: &str) -> Value {
        Value::Text(Arc::from(s))
    }

    pub fn tuple(items: impl IntoIterator<Item = Value>) -> Value {
        Value::Tuple(items.into_iter().collect())
    }

    pub fn empty_set() -> Value {
        Value::Set(Arc::from(Vec::new()))
    }

    /// Builds a set, sorting and dropping duplicates.
    pub fn set(items: impl IntoIterator<Item = Value>) -> Value {
        let mut items: Vec<Value> = items.into_iter().collect();
        items.sort_unstable();
        items.dedup();
        Value::Set(items.into())
    }

    /// Builds a map; duplicate keys are rejected.
    pub fn map(pairs: impl IntoIterator<Item = (Value, Value)>) -> Result<Value> {
        let mut pairs: Vec<(Value, Value)> = pairs.into_iter().collect();
        pairs.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        if let Some(w) = pairs.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::invalid(format!("duplicate map key {}", w[0].0)));
        }
        Ok(Value::Map(pairs.into()))
    }

    /// Caller guarantees the children are strictly increasing.
    pub(crate) fn set_from_sorted(items: Vec<Value>) -> Value {
        debug_assert!(items.windows(2).all(|w| w[0] < w[1]));
        Value::Set(items.into())
    }

    /// Caller guarantees the keys are strictly increasing.
    pub(crate) fn map_from_sorted(pairs: Vec<(Value, Value)>) -> Value {
        debug_assert!(pairs.windows(2).all(|w| w[0].0 < w[1].0));
        Value::Map(pairs.into())
    }

    fn rank(&self) -> u8 {
        match self {
            Value::Unit => 0,
            Value::Bool(_) => 1,
            Value::Int(_) => 2,
            Value::Text(_) => 3,
            Value::Atom(_) => 4,
            Value::Tuple(_) => 5,
            Value::Set(_) => 6,
            Value::Map(_) => 7,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Value::Unit => "unit",
            Value::Bool(_) => "boolean",
            Value::Int(_) => "integer",
            Value::Text(_) => "text",
            Value::Atom(_) => "atom",
            Value::Tuple(_) => "tuple",
            Value::Set(_) => "set",
            Value::Map(_) => "map",
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(i) => Some(*i),
            _ => None,
        }
    }

    pub fn as_atom(&self) -> Option<Atom> {
        match self {
            Value::Atom(a) => Some(*a),
            _ => None,
        }
    }

    pub fn as_tuple(&self) -> Option<&[Value]> {
        match self {
            Value::Tuple(t) => Some(t),
            _ => None,
        }
    }

    pub fn as_set(&self) -> Option<&[Value]> {
        match self {
            Value::Set(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_map(&self) -> Option<&[(Value, Value)]> {
        match self {
            Value::Map(m) => Some(m),
            _ => None,
        }
    }

    /// Looks up a key in a map value.
    pub fn get(&self, key: &Value) -> Option<&Value> {
        let pairs = self.as_map()?;
        pairs.binary_search_by(|(k, _)| k.cmp(key)).ok().map(|i| &pairs[i].1)
    }

    /// True if no uset atom occurs anywhere in the tree.
    pub fn is_atom_free(&self) -> bool {
        match self {
            Value::Atom(_) => false,
            Value::Tuple(c) | Value::Set(c) => c.iter().all(Value::is_atom_free),
            Value::Map(p) => p.iter().all(|(k, v)| k.is_atom_free() && v.is_atom_free()),
            _ => true,
        }
    }

    /// Rebuilds the tree with every atom replaced by `f(atom)`. `f` must be
    /// injective on the atoms that occur, otherwise sets could collapse.
    pub(crate) fn relabel(&self, f: &impl Fn(Atom) -> Atom) -> Value {
        match self {
            Value::Atom(a) => Value::Atom(f(*a)),
            Value::Tuple(c) => Value::Tuple(c.iter().map(|v| v.relabel(f)).collect()),
            Value::Set(c) => {
                let mut items: Vec<Value> = c.iter().map(|v| v.relabel(f)).collect();
                items.sort_unstable();
                Value::Set(items.into())
            }
            Value::Map(p) => {
                let mut pairs: Vec<(Value, Value)> = p.iter().map(|(k, v)| (k.relabel(f), v.relabel(f))).collect();
                pairs.sort_unstable_by(|a, b| a.0.cmp(&b.0));
                Value::Map(pairs.into())
            }
            other => other.clone(),
        }
    }

    pub(crate) fn for_each_atom(&self, f: &mut impl FnMut(Atom)) {
        match self {
            Value::Atom(a) => f(*a),
            Value::Tuple(c) | Value::Set(c) => c.iter().for_each(|v| v.for_each_atom(f)),
            Value::Map(p) => p.iter().for_each(|(k, v)| {
                k.for_each_atom(f);
                v.for_each_atom(f);
            }),
            _ => {}
        }
    }
}

fn cmp_seq(a: &[Value], b: &[Value]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.iter().cmp(b.iter()))
}

impl Ord for Value {
    fn cmp(&self, other: &Self) -> Ordering {
        use Value::*;
        match (self, other) {
            (Unit, Unit) => Ordering::Equal,
            (Bool(a), Bool(b)) => a.cmp(b),
            (Int(a), Int(b)) => a.cmp(b),
            (Text(a), Text(b)) => a.cmp(b),
            (Atom(a), Atom(b)) => a.cmp(b),
            (Tuple(a), Tuple(b)) | (Set(a), Set(b)) => cmp_seq(a, b),
            (Map(a), Map(b)) => a.len().cmp(&b.len()).then_with(|| a.iter().cmp(b.iter())),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Total order on basic objects; same as [`Ord`] on [`Value`].
pub fn compare(left: &Value, right: &Value) -> Ordering {
    left.cmp(right)
}

impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Value::Int(v)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::text(v)
    }
}

impl From<Atom> for Value {
    fn from(v: Atom) -> Self {
        Value::Atom(v)
    }
}

impl From<()> for Value {
    fn from(_: ()) -> Self {
        Value::Unit
    }
}

fn write_joined(f: &mut fmt::Formatter<'_>, items: &[Value]) -> fmt::Result {
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{item}")?;
    }
    Ok(())
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Unit => f.write_str("None"),
            Value::Bool(true) => f.write_str("True"),
            Value::Bool(false) => f.write_str("False"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Text(s) => write!(f, "'{}'", s.replace('\\', "\\\\").replace('\'', "\\'")),
            Value::Atom(a) => write!(f, "{a}"),
            Value::Tuple(c) => {
                f.write_str("(")?;
                write_joined(f, c)?;
                if c.len() == 1 {
                    f.write_str(",")?;
                }
                f.write_str(")")
            }
            Value::Set(c) => {
                f.write_str("{")?;
                write_joined(f, c)?;
                f.write_str("}")
            }
            Value::Map(p) => {
                f.write_str("{")?;
                for (i, (k, v)) in p.iter().enumerate() {
                    if i > 0 {
                        f.write_str("; ")?;
                    }
                    write!(f, "{k}: {v}")?;
                }
                f.write_str("}")
            }
        }
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
