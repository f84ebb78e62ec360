//! Domains: immutable, composable descriptions of collections of values.
//!
//! Every domain has a deterministic iteration order and an unfiltered
//! *span*: the number of positions it walks through, counting elements that
//! a filter below it would drop. Positions are what parallel jobs are cut
//! from. A filter-free domain has `size == span`.

mod probe;
mod sample;
mod spec;

use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

pub use probe::{Iter, Signal, SkipIter};
pub use spec::{DomainSpec, SpecFile};

#[allow(unused_imports)]
pub(crate) use probe::Probe;

use crate::error::{Error, Result, Slicing, UserError};
use crate::value::{AtomGroup, Uset, Value};

/// Element-to-element function used by domain and pipeline maps.
pub type MapFn = Arc<dyn Fn(&Value) -> Result<Value, UserError> + Send + Sync>;
/// Predicate used by domain and pipeline filters.
pub type PredFn = Arc<dyn Fn(&Value) -> Result<bool, UserError> + Send + Sync>;

/// Rejection-sampling attempts per element before giving up.
pub const DEFAULT_SAMPLE_BUDGET: u32 = 10_000;

#[derive(Clone)]
pub struct Domain {
    node: Arc<Node>,
}

struct Node {
    kind: Kind,
    span: BigUint,
    size: Option<BigUint>,
    strict: bool,
    /// Probing may report filtered positions.
    filtered: bool,
}

/// Lazily materialized, sorted and deduplicated elements of a finite domain.
pub(crate) struct Ground {
    of: Domain,
    expected: Option<usize>,
    cell: OnceLock<Vec<Value>>,
}

impl Ground {
    fn new(of: &Domain) -> Ground {
        Ground {
            of: of.clone(),
            expected: of.size().and_then(|s| s.to_usize()),
            cell: OnceLock::new(),
        }
    }

    pub(crate) fn domain(&self) -> &Domain {
        &self.of
    }

    pub(crate) fn get(&self) -> Result<&[Value]> {
        if let Some(v) = self.cell.get() {
            return Ok(v);
        }
        let mut items = self.of.iter().collect::<Result<Vec<_>>>()?;
        items.sort_unstable();
        items.dedup();
        if let Some(expected) = self.expected {
            if expected != items.len() {
                return Err(Error::invalid(format!(
                    "{} yields duplicate elements; subsets and mapping keys need distinct elements",
                    self.of.name()
                )));
            }
        }
        let _ = self.cell.set(items);
        Ok(self.cell.get().expect("just set"))
    }
}

pub(crate) enum Kind {
    Range(u64),
    Values(Vec<Value>),
    Boolean,
    NoneDomain,
    Uset(Uset),
    CnfValues {
        items: Vec<Value>,
        closure: Vec<Value>,
    },
    Product(Vec<Domain>),
    Sequences(Domain, usize),
    Subsets {
        ground: Ground,
        size: Option<usize>,
    },
    Mappings {
        keys: Ground,
        value: Domain,
    },
    Join(Vec<Domain>),
    Map {
        inner: Domain,
        f: MapFn,
        label: String,
    },
    Filter {
        inner: Domain,
        pred: PredFn,
        label: String,
        budget: u32,
    },
}

fn big(n: u64) -> BigUint {
    BigUint::from(n)
}

fn pow(base: &BigUint, exp: usize, domain: &str) -> Result<BigUint> {
    let exp = u32::try_from(exp).map_err(|_| Error::SizeOverflow {
        domain: domain.to_string(),
    })?;
    Ok(base.pow(exp))
}

fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * big((n - i) as u64) / big(i as u64 + 1);
    }
    acc
}

impl Domain {
    fn build(kind: Kind, span: BigUint, size: Option<BigUint>, strict: bool, filtered: bool) -> Domain {
        Domain {
            node: Arc::new(Node {
                kind,
                span,
                size,
                strict,
                filtered,
            }),
        }
    }

    fn exact(kind: Kind, size: BigUint, strict: bool) -> Domain {
        Domain::build(kind, size.clone(), Some(size), strict, false)
    }

    /// Integers `0..n`.
    pub fn range(n: u64) -> Domain {
        Domain::exact(Kind::Range(n), big(n), true)
    }

    /// Explicitly listed values. Not strict: nothing guarantees the list is
    /// closed under isomorphism; see [`Domain::cnf_values`].
    pub fn values(items: impl IntoIterator<Item = Value>) -> Domain {
        let items: Vec<Value> = items.into_iter().collect();
        let n = big(items.len() as u64);
        Domain::exact(Kind::Values(items), n, false)
    }

    pub fn boolean() -> Domain {
        Domain::exact(Kind::Boolean, big(2), true)
    }

    /// The single element `None` (unit).
    pub fn none() -> Domain {
        Domain::exact(Kind::NoneDomain, big(1), true)
    }

    /// Registers a fresh uset of `n` interchangeable atoms.
    pub fn uset(n: u32, name: &str) -> Result<Domain> {
        if n == 0 {
            return Err(Error::invalid("a uset needs at least one atom"));
        }
        Ok(Domain::of_uset(Uset::new(n, name)))
    }

    /// Domain of all atoms of an existing uset.
    pub fn of_uset(u: Uset) -> Domain {
        Domain::exact(Kind::Uset(u), big(u.size() as u64), true)
    }

    /// A strict domain given by canonical representatives; it contains the
    /// full isomorphism class of every item.
    pub fn cnf_values(items: impl IntoIterator<Item = Value>) -> Result<Domain> {
        let items: Vec<Value> = items.into_iter().collect();
        for (i, item) in items.iter().enumerate() {
            if crate::value::canonical_form_oracle(item) != *item {
                return Err(Error::NotCanonical { item: item.to_string() });
            }
            if items[..i].contains(item) {
                return Err(Error::DuplicateClass { item: item.to_string() });
            }
        }
        let mut closure = Vec::new();
        for item in &items {
            closure.extend(isomorphism_class(item));
        }
        let n = big(closure.len() as u64);
        Ok(Domain::exact(Kind::CnfValues { items, closure }, n, true))
    }

    /// Cartesian product, iterated row-major in operand order.
    pub fn product(parts: impl IntoIterator<Item = Domain>) -> Domain {
        let parts: Vec<Domain> = parts.into_iter().collect();
        let span = parts.iter().map(|d| d.span().clone()).product();
        let size = parts.iter().map(|d| d.size().cloned()).product::<Option<BigUint>>();
        let strict = parts.iter().all(Domain::is_strict);
        let filtered = parts.iter().any(|d| d.node.filtered);
        Domain::build(Kind::Product(parts), span, size, strict, filtered)
    }

    /// Tuples of length `k` over `d`, in lexicographic order.
    pub fn sequences(d: &Domain, k: usize) -> Result<Domain> {
        let name = "Sequences";
        let span = pow(d.span(), k, name)?;
        let size = d.size().map(|s| pow(s, k, name)).transpose()?;
        Ok(Domain::build(
            Kind::Sequences(d.clone(), k),
            span,
            size,
            d.is_strict(),
            d.node.filtered && k > 0,
        ))
    }

    /// All subsets of `d`. `d` is materialized and sorted on first use (or
    /// immediately when a filter hides its size).
    pub fn subsets(d: &Domain) -> Result<Domain> {
        Domain::subsets_impl(d, None)
    }

    /// Subsets of `d` with exactly `k` elements, in lexicographic order.
    pub fn subsets_of_size(d: &Domain, k: usize) -> Result<Domain> {
        Domain::subsets_impl(d, Some(k))
    }

    fn subsets_impl(d: &Domain, k: Option<usize>) -> Result<Domain> {
        let ground = Ground::new(d);
        let n = match d.size() {
            Some(s) => s.to_usize().ok_or_else(|| Error::SizeOverflow {
                domain: "Subsets".into(),
            })?,
            None => ground.get()?.len(),
        };
        let size = match k {
            None => pow(&big(2), n, "Subsets")?,
            Some(k) => binomial(n, k),
        };
        Ok(Domain::exact(Kind::Subsets { ground, size: k }, size, d.is_strict()))
    }

    /// All total maps from `key` to `value`, as map values. Value
    /// assignments are iterated lexicographically over the sorted keys.
    pub fn mappings(key: &Domain, value: &Domain) -> Result<Domain> {
        let keys = Ground::new(key);
        let n = match key.size() {
            Some(s) => s.to_usize().ok_or_else(|| Error::SizeOverflow {
                domain: "Mappings".into(),
            })?,
            None => keys.get()?.len(),
        };
        let span = pow(value.span(), n, "Mappings")?;
        let size = value.size().map(|s| pow(s, n, "Mappings")).transpose()?;
        Ok(Domain::build(
            Kind::Mappings {
                keys,
                value: value.clone(),
            },
            span,
            size,
            key.is_strict() && value.is_strict(),
            value.node.filtered && n > 0,
        ))
    }

    /// Disjoint union in operand order.
    pub fn join(parts: impl IntoIterator<Item = Domain>) -> Domain {
        let parts: Vec<Domain> = parts.into_iter().collect();
        let span = parts.iter().map(|d| d.span().clone()).sum();
        let size = parts.iter().map(|d| d.size().cloned()).sum::<Option<BigUint>>();
        let strict = parts.iter().all(Domain::is_strict);
        let filtered = parts.iter().any(|d| d.node.filtered);
        Domain::build(Kind::Join(parts), span, size, strict, filtered)
    }

    /// Applies `f` to every element. The result is never strict since `f`
    /// may break closure under isomorphism.
    pub fn map<F>(&self, f: F) -> Domain
    where
        F: Fn(&Value) -> Result<Value, UserError> + Send + Sync + 'static,
    {
        self.map_labeled("map", Arc::new(f))
    }

    pub fn map_labeled(&self, label: &str, f: MapFn) -> Domain {
        Domain::build(
            Kind::Map {
                inner: self.clone(),
                f,
                label: label.to_string(),
            },
            self.span().clone(),
            self.size().cloned(),
            false,
            self.node.filtered,
        )
    }

    /// Keeps elements satisfying `pred`. Strictness is inherited: the
    /// predicate is expected to be invariant under isomorphism.
    pub fn filter<P>(&self, pred: P) -> Domain
    where
        P: Fn(&Value) -> Result<bool, UserError> + Send + Sync + 'static,
    {
        self.filter_labeled("filter", Arc::new(pred), DEFAULT_SAMPLE_BUDGET)
    }

    pub fn filter_labeled(&self, label: &str, pred: PredFn, budget: u32) -> Domain {
        Domain::build(
            Kind::Filter {
                inner: self.clone(),
                pred,
                label: label.to_string(),
                budget: budget.max(1),
            },
            self.span().clone(),
            None,
            self.is_strict(),
            true,
        )
    }

    /// Same filter with a different rejection-sampling budget.
    pub fn with_sample_budget(&self, budget: u32) -> Domain {
        match &self.node.kind {
            Kind::Filter { inner, pred, label, .. } => inner.filter_labeled(label, pred.clone(), budget),
            _ => self.clone(),
        }
    }

    pub(crate) fn kind(&self) -> &Kind {
        &self.node.kind
    }

    /// Exact number of elements, when known.
    pub fn size(&self) -> Option<&BigUint> {
        self.node.size.as_ref()
    }

    pub fn size_u64(&self) -> Option<u64> {
        self.size().and_then(|s| s.to_u64())
    }

    /// Number of positions iterated, including filtered-out ones.
    pub fn span(&self) -> &BigUint {
        &self.node.span
    }

    pub fn has_exact_size(&self) -> bool {
        self.node.size.is_some()
    }

    pub fn is_strict(&self) -> bool {
        self.node.strict
    }

    pub fn slicing(&self) -> Slicing {
        if self.span().to_u64().is_none() {
            Slicing::None
        } else if self.node.filtered {
            Slicing::Filtered
        } else {
            Slicing::Full
        }
    }

    pub fn name(&self) -> &'static str {
        match self.kind() {
            Kind::Range(_) => "Range",
            Kind::Values(_) => "Values",
            Kind::Boolean => "Boolean",
            Kind::NoneDomain => "NoneDomain",
            Kind::Uset(_) => "USet",
            Kind::CnfValues { .. } => "CnfValues",
            Kind::Product(_) => "Product",
            Kind::Sequences(..) => "Sequences",
            Kind::Subsets { .. } => "Subsets",
            Kind::Mappings { .. } => "Mappings",
            Kind::Join(_) => "Join",
            Kind::Map { .. } => "MapTransformation",
            Kind::Filter { .. } => "FilterTransformation",
        }
    }

    /// First non-strict node in the composition tree, for error messages.
    pub(crate) fn non_strict_culprit(&self) -> String {
        let children: Vec<&Domain> = match self.kind() {
            Kind::Product(ds) | Kind::Join(ds) => ds.iter().collect(),
            Kind::Sequences(d, _) => vec![d],
            Kind::Subsets { ground, .. } => vec![&ground.of],
            Kind::Mappings { keys, value } => vec![&keys.of, value],
            Kind::Filter { inner, .. } => vec![inner],
            Kind::Map { label, .. } => return format!("MapTransformation `{label}`"),
            _ => vec![],
        };
        children
            .into_iter()
            .find(|d| !d.is_strict())
            .map(Domain::non_strict_culprit)
            .unwrap_or_else(|| self.name().to_string())
    }
}

/// Every distinct image of `o` under uset permutations, sorted.
pub(crate) fn isomorphism_class(o: &Value) -> Vec<Value> {
    use std::ops::ControlFlow;
    let mut groups = AtomGroup::collect(o);
    for g in &mut groups {
        g.targets = (0..g.uset.size()).collect();
    }
    let mut out = Vec::new();
    let _ = crate::value::for_each_assignment(&groups, &mut |asg| {
        out.push(asg.apply(o));
        ControlFlow::<()>::Continue(())
    });
    out.sort_unstable();
    out.dedup();
    out
}

impl std::ops::Mul for &Domain {
    type Output = Domain;

    fn mul(self, rhs: &Domain) -> Domain {
        Domain::product([self.clone(), rhs.clone()])
    }
}

impl std::ops::Add for &Domain {
    type Output = Domain;

    fn add(self, rhs: &Domain) -> Domain {
        Domain::join([self.clone(), rhs.clone()])
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const SHOWN: usize = 4;
        write!(f, "<{}", self.name())?;
        match self.size() {
            Some(s) => write!(f, " size={s}")?,
            None => write!(f, " span={}", self.span())?,
        }
        f.write_str(" {")?;
        let mut it = self.iter();
        for i in 0..=SHOWN {
            match it.next() {
                Some(Ok(v)) if i < SHOWN => {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{v}")?;
                }
                Some(Ok(_)) => f.write_str(", ...")?,
                Some(Err(_)) => f.write_str(", <error>")?,
                None => break,
            }
        }
        f.write_str("}>")
    }
}

impl fmt::Debug for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
