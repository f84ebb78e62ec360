//! Random access into a domain's iteration order, and the (skip) iterators
//! built on top of it.
//!
//! `probe(i)` answers "what sits at unfiltered position `i`": either an
//! element, or a run of positions starting at `i` that filters removed. Runs
//! let a product skip a whole row-major block when one component is filtered
//! out, instead of visiting every position in it.

use num_traits::ToPrimitive;

use super::{Domain, Kind};
use crate::error::{Error, Result, Slicing};
use crate::value::Value;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Probe {
    Hit(Value),
    /// Positions `[i, i + run)` are all filtered; `run >= 1`.
    Miss(u64),
}

/// One step of a skip iterator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Signal {
    Element(Value),
    /// This many consecutive positions were dropped by filters.
    Skipped(u64),
}

fn user_err(stage: &str, label: &str, v: &Value, source: crate::error::UserError) -> Error {
    Error::Transform {
        stage: format!("{stage} `{label}`"),
        element: v.to_string(),
        source,
    }
}

/// Span as u64, saturating.
fn span64(d: &Domain) -> u64 {
    d.span().to_u64().unwrap_or(u64::MAX)
}

/// Row-major strides (`None` = larger than u64) for components with the
/// given spans.
fn strides(spans: &[u64], exact_big: &[bool]) -> Vec<Option<u64>> {
    let mut out = vec![Some(1u64); spans.len()];
    let mut acc: Option<u64> = Some(1);
    for i in (0..spans.len()).rev() {
        out[i] = acc;
        acc = match acc {
            Some(a) if !exact_big[i] => a.checked_mul(spans[i]),
            _ => None,
        };
    }
    out
}

/// Probes a row-major product whose `i`-th component is `part(i)`.
fn probe_product<'a>(
    count: usize,
    part: impl Fn(usize) -> &'a Domain,
    index: u64,
    mut assemble: impl FnMut(Vec<Value>) -> Result<Value>,
) -> Result<Probe> {
    let spans: Vec<u64> = (0..count).map(|i| span64(part(i))).collect();
    let huge: Vec<bool> = (0..count).map(|i| part(i).span().to_u64().is_none()).collect();
    let strides = strides(&spans, &huge);
    let mut rem = index;
    let mut items = Vec::with_capacity(count);
    for (i, &stride) in strides.iter().enumerate() {
        let (idx, within) = match stride {
            Some(s) => (rem / s, rem % s),
            None => (0, rem),
        };
        match part(i).probe(idx)? {
            Probe::Hit(v) => items.push(v),
            Probe::Miss(run) => {
                let skipped = match stride {
                    Some(s) => run.saturating_mul(s).saturating_sub(within),
                    None => u64::MAX,
                };
                return Ok(Probe::Miss(skipped.max(1)));
            }
        }
        rem = within;
    }
    assemble(items).map(Probe::Hit)
}

/// Subset at preorder position `r` of the lexicographic subset tree over
/// `ground[start..]`.
fn unrank_subset(ground: &[Value], mut r: u64) -> Vec<Value> {
    let n = ground.len();
    let mut out = Vec::new();
    let mut start = 0;
    while r > 0 {
        r -= 1;
        let mut i = start;
        loop {
            let remaining = n - i - 1;
            let block = if remaining >= 64 { u64::MAX } else { 1u64 << remaining };
            if r < block {
                out.push(ground[i].clone());
                start = i + 1;
                break;
            }
            r -= block;
            i += 1;
        }
    }
    out
}

fn binom_sat(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i as u128 + 1);
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// `k`-combination at lexicographic position `r`.
fn unrank_combination(ground: &[Value], k: usize, mut r: u64) -> Vec<Value> {
    let n = ground.len();
    let mut out = Vec::with_capacity(k);
    let mut i = 0;
    while out.len() < k {
        let need = k - out.len();
        let with_i = binom_sat(n - i - 1, need - 1);
        if r < with_i {
            out.push(ground[i].clone());
        } else {
            r -= with_i;
        }
        i += 1;
    }
    out
}

impl Domain {
    pub(crate) fn probe(&self, index: u64) -> Result<Probe> {
        Ok(match self.kind() {
            Kind::Range(_) => Probe::Hit(Value::Int(index as i64)),
            Kind::Values(items) => Probe::Hit(items[index as usize].clone()),
            Kind::Boolean => Probe::Hit(Value::Bool(index == 1)),
            Kind::NoneDomain => Probe::Hit(Value::Unit),
            Kind::Uset(u) => Probe::Hit(u.atom(index as u32).into()),
            Kind::CnfValues { closure, .. } => Probe::Hit(closure[index as usize].clone()),
            Kind::Product(parts) => probe_product(parts.len(), |i| &parts[i], index, |items| Ok(Value::tuple(items)))?,
            Kind::Sequences(d, k) => probe_product(*k, |_| d, index, |items| Ok(Value::tuple(items)))?,
            Kind::Subsets { ground, size } => {
                let ground = ground.get()?;
                let items = match size {
                    None => unrank_subset(ground, index),
                    Some(k) => unrank_combination(ground, *k, index),
                };
                Probe::Hit(Value::set_from_sorted(items))
            }
            Kind::Mappings { keys, value } => {
                let keys = keys.get()?;
                probe_product(
                    keys.len(),
                    |_| value,
                    index,
                    |vals| Ok(Value::map_from_sorted(keys.iter().cloned().zip(vals).collect())),
                )?
            }
            Kind::Join(parts) => {
                let mut local = index;
                for d in parts {
                    let span = span64(d);
                    if local < span {
                        return Ok(match d.probe(local)? {
                            Probe::Miss(run) => Probe::Miss(run.min(span - local)),
                            hit => hit,
                        });
                    }
                    local -= span;
                }
                unreachable!("join probed past its span")
            }
            Kind::Map { inner, f, label } => match inner.probe(index)? {
                Probe::Hit(v) => Probe::Hit(f(&v).map_err(|e| user_err("map", label, &v, e))?),
                miss => miss,
            },
            Kind::Filter { inner, pred, label, .. } => match inner.probe(index)? {
                Probe::Hit(v) => {
                    if pred(&v).map_err(|e| user_err("filter", label, &v, e))? {
                        Probe::Hit(v)
                    } else {
                        Probe::Miss(1)
                    }
                }
                miss => miss,
            },
        })
    }

    /// Iterates every element in the domain's deterministic order.
    pub fn iter(&self) -> Iter {
        Iter {
            inner: SkipIter::new(self.clone(), 0, span64(self)),
        }
    }

    /// Signals for positions `[offset, offset + count)`: elements, plus
    /// `Skipped(n)` for filtered stretches. Under full slicing no skip is
    /// ever emitted.
    pub fn iter_slice(&self, offset: u64, count: u64) -> Result<SkipIter> {
        let available = self.slicing();
        if available == Slicing::None {
            return Err(Error::UnsupportedSlicing {
                domain: self.to_string(),
                requested: Slicing::Filtered,
                available,
            });
        }
        let span = span64(self);
        if offset.checked_add(count).is_none_or(|end| end > span) {
            return Err(Error::SliceOutOfRange {
                domain: self.name().to_string(),
                offset,
                count,
                span: self.span().to_string(),
            });
        }
        Ok(SkipIter::new(self.clone(), offset, offset + count))
    }

    /// Like [`Domain::iter_slice`], but refuses filtered domains.
    pub fn iter_slice_full(&self, offset: u64, count: u64) -> Result<Iter> {
        if self.slicing() != Slicing::Full {
            return Err(Error::UnsupportedSlicing {
                domain: self.name().to_string(),
                requested: Slicing::Full,
                available: self.slicing(),
            });
        }
        Ok(Iter {
            inner: self.iter_slice(offset, count)?,
        })
    }
}

/// Iterator over [`Signal`]s for a span of positions.
pub struct SkipIter {
    domain: Domain,
    pos: u64,
    end: u64,
    pending: Option<Value>,
    failed: bool,
}

impl SkipIter {
    fn new(domain: Domain, pos: u64, end: u64) -> SkipIter {
        SkipIter {
            domain,
            pos,
            end,
            pending: None,
            failed: false,
        }
    }
}

impl Iterator for SkipIter {
    type Item = Result<Signal>;

    fn next(&mut self) -> Option<Self::Item> {
        if let Some(v) = self.pending.take() {
            return Some(Ok(Signal::Element(v)));
        }
        if self.failed {
            return None;
        }
        let mut skipped = 0u64;
        while self.pos < self.end {
            match self.domain.probe(self.pos) {
                Ok(Probe::Hit(v)) => {
                    self.pos += 1;
                    if skipped > 0 {
                        self.pending = Some(v);
                        return Some(Ok(Signal::Skipped(skipped)));
                    }
                    return Some(Ok(Signal::Element(v)));
                }
                Ok(Probe::Miss(run)) => {
                    let run = run.min(self.end - self.pos);
                    self.pos += run;
                    skipped += run;
                }
                Err(e) => {
                    self.failed = true;
                    return Some(Err(e));
                }
            }
        }
        (skipped > 0).then_some(Ok(Signal::Skipped(skipped)))
    }
}

/// Element iterator; drops skip signals.
pub struct Iter {
    inner: SkipIter,
}

impl Iterator for Iter {
    type Item = Result<Value>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            match self.inner.next()? {
                Ok(Signal::Element(v)) => return Some(Ok(v)),
                Ok(Signal::Skipped(_)) => continue,
                Err(e) => return Some(Err(e)),
            }
        }
    }
}
