//! Uniform sampling.
//!
//! A raw draw picks one unfiltered position uniformly at random and either
//! returns its element or reports which filter rejected it. Retrying raw
//! draws until one is accepted gives the uniform distribution over the
//! elements that survive the filters.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;

use super::{Domain, Kind, DEFAULT_SAMPLE_BUDGET};
use crate::error::{Error, Result};
use crate::value::Value;

enum Draw {
    Accept(Value),
    Reject(String),
}

/// Picks an index in `0..weights.len()` with probability proportional to
/// the weights (which must not all be zero).
fn weighted_index<R: Rng + ?Sized>(rng: &mut R, weights: &[&BigUint]) -> usize {
    let total: BigUint = weights.iter().copied().sum();
    let mut r = match total.to_u128() {
        Some(t) => BigUint::from(rng.random_range(0..t)),
        None => {
            // beyond u128: draw enough random bits and reduce
            let bits = total.bits() + 64;
            let words: Vec<u32> = (0..bits.div_ceil(32)).map(|_| rng.random()).collect();
            BigUint::from_slice(&words) % &total
        }
    };
    for (i, w) in weights.iter().enumerate() {
        if r < **w {
            return i;
        }
        r -= *w;
    }
    unreachable!("weighted draw exceeded total")
}

impl Domain {
    /// A uniformly random element, with the default rejection budget.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Value> {
        self.sample_with_budget(rng, self.sample_budget())
    }

    pub fn sample_with_budget<R: Rng + ?Sized>(&self, rng: &mut R, budget: u32) -> Result<Value> {
        if self.span().is_zero() {
            return Err(Error::EmptyDomain {
                domain: self.name().to_string(),
            });
        }
        let mut last = String::new();
        for _ in 0..budget.max(1) {
            match self.draw(rng)? {
                Draw::Accept(v) => return Ok(v),
                Draw::Reject(label) => last = label,
            }
        }
        Err(Error::SamplingFailed {
            filter: last,
            attempts: budget.max(1),
        })
    }

    /// Largest budget configured on any filter in the tree.
    fn sample_budget(&self) -> u32 {
        self.max_filter_budget().unwrap_or(DEFAULT_SAMPLE_BUDGET)
    }

    fn max_filter_budget(&self) -> Option<u32> {
        let children: Vec<&Domain> = match self.kind() {
            Kind::Product(ds) | Kind::Join(ds) => ds.iter().collect(),
            Kind::Sequences(d, _) => vec![d],
            Kind::Mappings { value, .. } => vec![value],
            Kind::Map { inner, .. } => vec![inner],
            Kind::Filter { budget, inner, .. } => {
                return Some(inner.max_filter_budget().map_or(*budget, |b| b.max(*budget)))
            }
            _ => vec![],
        };
        children.into_iter().filter_map(Domain::max_filter_budget).max()
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Draw> {
        let accept = |v| Ok(Draw::Accept(v));
        match self.kind() {
            Kind::Range(n) => accept(Value::Int(rng.random_range(0..*n) as i64)),
            Kind::Values(items) => accept(items[rng.random_range(0..items.len())].clone()),
            Kind::Boolean => accept(Value::Bool(rng.random())),
            Kind::NoneDomain => accept(Value::Unit),
            Kind::Uset(u) => accept(u.atom(rng.random_range(0..u.size())).into()),
            Kind::CnfValues { closure, .. } => accept(closure[rng.random_range(0..closure.len())].clone()),
            Kind::Product(parts) => self.draw_parts(rng, parts.iter(), |items| Ok(Value::tuple(items))),
            Kind::Sequences(d, k) => self.draw_parts(rng, std::iter::repeat_n(d, *k), |items| Ok(Value::tuple(items))),
            Kind::Subsets { ground, size } => {
                let ground = ground.get()?;
                let items: Vec<Value> = match size {
                    None => ground.iter().filter(|_| rng.random::<bool>()).cloned().collect(),
                    Some(k) => {
                        let mut idx = rand::seq::index::sample(rng, ground.len(), *k).into_vec();
                        idx.sort_unstable();
                        idx.into_iter().map(|i| ground[i].clone()).collect()
                    }
                };
                accept(Value::set_from_sorted(items))
            }
            Kind::Mappings { keys, value } => {
                let keys = keys.get()?;
                self.draw_parts(rng, std::iter::repeat_n(value, keys.len()), |vals| {
                    Ok(Value::map_from_sorted(keys.iter().cloned().zip(vals).collect()))
                })
            }
            Kind::Join(parts) => {
                let spans: Vec<&BigUint> = parts.iter().map(Domain::span).collect();
                parts[weighted_index(rng, &spans)].draw(rng)
            }
            Kind::Map { inner, f, label } => match inner.draw(rng)? {
                Draw::Accept(v) => f(&v).map(Draw::Accept).map_err(|e| Error::Transform {
                    stage: format!("map `{label}`"),
                    element: v.to_string(),
                    source: e,
                }),
                reject => Ok(reject),
            },
            Kind::Filter { inner, pred, label, .. } => match inner.draw(rng)? {
                Draw::Accept(v) => {
                    let keep = pred(&v).map_err(|e| Error::Transform {
                        stage: format!("filter `{label}`"),
                        element: v.to_string(),
                        source: e,
                    })?;
                    Ok(if keep {
                        Draw::Accept(v)
                    } else {
                        Draw::Reject(label.clone())
                    })
                }
                reject => Ok(reject),
            },
        }
    }

    fn draw_parts<'a, R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        parts: impl Iterator<Item = &'a Domain>,
        assemble: impl FnOnce(Vec<Value>) -> Result<Value>,
    ) -> Result<Draw> {
        let mut items = Vec::new();
        for d in parts {
            match d.draw(rng)? {
                Draw::Accept(v) => items.push(v),
                reject => return Ok(reject),
            }
        }
        assemble(items).map(Draw::Accept)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn singleton_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let d = Domain::range(1);
        for _ in 0..10 {
            assert_eq!(d.sample(&mut rng).unwrap(), Value::Int(0));
        }
    }

    #[test]
    fn empty_domain_is_an_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(matches!(
            Domain::range(0).sample(&mut rng),
            Err(Error::EmptyDomain { .. })
        ));
    }

    #[test]
    fn exhausted_budget_names_the_filter() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let never = Domain::range(10).filter_labeled("never", std::sync::Arc::new(|_| Ok(false)), 50);
        match never.sample(&mut rng) {
            Err(Error::SamplingFailed { filter, attempts }) => {
                assert_eq!(filter, "never");
                assert_eq!(attempts, 50);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn filtered_samples_satisfy_the_filter() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let odd = Domain::range(10).filter(|x| Ok(x.as_int().unwrap() % 2 == 1));
        let d = &odd * &Domain::uset(3, "a").unwrap();
        for _ in 0..100 {
            let v = d.sample(&mut rng).unwrap();
            assert_eq!(v.as_tuple().unwrap()[0].as_int().unwrap() % 2, 1);
        }
    }

    #[test]
    fn huge_join_weights() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let big = Domain::subsets(&Domain::range(300)).unwrap();
        let d = &Domain::range(1) + &big;
        // the singleton operand is practically never drawn
        for _ in 0..20 {
            assert!(d.sample(&mut rng).unwrap().as_set().is_some());
        }
    }
}
