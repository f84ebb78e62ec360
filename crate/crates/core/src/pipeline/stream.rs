//! Push-based evaluation of transformations and actions.

use std::cmp::Ordering;

use super::{Action, Transform};
use crate::error::{Error, Result, UserError};
use crate::value::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flow {
    Continue,
    /// No further element can change the result.
    Stop,
}

/// Result of running a pipeline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Output {
    /// From `collect` and `max`.
    List(Vec<Value>),
    /// From `reduce`.
    Value(Value),
    Count(u64),
    First(Option<Value>),
}

impl Output {
    pub fn into_list(self) -> Option<Vec<Value>> {
        match self {
            Output::List(v) => Some(v),
            _ => None,
        }
    }

    pub fn into_value(self) -> Option<Value> {
        match self {
            Output::Value(v) => Some(v),
            Output::First(v) => v,
            _ => None,
        }
    }

    pub fn into_count(self) -> Option<u64> {
        match self {
            Output::Count(n) => Some(n),
            _ => None,
        }
    }
}

/// Action state over a contiguous part of the stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Partial {
    List(Vec<Value>),
    Fold(Option<Value>),
    /// Tied maxima as (key, element), in stream order.
    Max(Vec<(Value, Value)>),
    Count(u64),
    First(Option<Value>),
}

fn user(stage: &str, v: &Value, e: UserError) -> Error {
    Error::Transform {
        stage: stage.to_string(),
        element: v.to_string(),
        source: e,
    }
}

/// Feeds elements into an action.
#[derive(Debug, Clone)]
pub struct Accumulator {
    partial: Partial,
}

impl Accumulator {
    /// Accumulator for a whole run; `reduce` starts from its initial value.
    pub fn new(action: &Action) -> Accumulator {
        let mut acc = Accumulator::partial(action);
        if let Action::Reduce { init, .. } = action {
            acc.partial = Partial::Fold(init.clone());
        }
        acc
    }

    /// Accumulator for one piece of a split run.
    pub fn partial(action: &Action) -> Accumulator {
        let partial = match action {
            Action::Collect => Partial::List(Vec::new()),
            Action::Reduce { .. } => Partial::Fold(None),
            Action::Max { .. } => Partial::Max(Vec::new()),
            Action::Count => Partial::Count(0),
            Action::First => Partial::First(None),
        };
        Accumulator { partial }
    }

    /// Accumulator that only gathers elements, for stages applied later.
    pub fn list() -> Accumulator {
        Accumulator {
            partial: Partial::List(Vec::new()),
        }
    }

    pub fn is_done(&self) -> bool {
        matches!(self.partial, Partial::First(Some(_)))
    }

    pub fn push(&mut self, action: &Action, v: Value) -> Result<Flow> {
        match (&mut self.partial, action) {
            (Partial::List(items), _) => items.push(v),
            (Partial::Fold(acc), Action::Reduce { f, .. }) => {
                *acc = Some(match acc.take() {
                    None => v,
                    Some(a) => f(&a, &v).map_err(|e| user("reduce", &v, e))?,
                });
            }
            (Partial::Max(best), Action::Max { key, size }) => {
                let k = match key {
                    Some(key) => key(&v).map_err(|e| user("max key", &v, e))?,
                    None => v.clone(),
                };
                offer(best, k, v, *size);
            }
            (Partial::Count(n), _) => *n += 1,
            (Partial::First(slot), _) => {
                *slot = Some(v);
                return Ok(Flow::Stop);
            }
            _ => unreachable!("accumulator does not match its action"),
        }
        Ok(Flow::Continue)
    }

    /// Appends a partial computed over the stream right after this one.
    pub fn absorb(&mut self, action: &Action, next: Partial) -> Result<()> {
        match (&mut self.partial, next) {
            (Partial::List(items), Partial::List(more)) => items.extend(more),
            (Partial::Fold(acc), Partial::Fold(Some(b))) => {
                let Action::Reduce { f, .. } = action else {
                    unreachable!()
                };
                *acc = Some(match acc.take() {
                    None => b,
                    Some(a) => f(&a, &b).map_err(|e| user("reduce", &b, e))?,
                });
            }
            (Partial::Fold(_), Partial::Fold(None)) => {}
            (Partial::Max(best), Partial::Max(more)) => {
                let Action::Max { size, .. } = action else {
                    unreachable!()
                };
                for (k, v) in more {
                    offer(best, k, v, *size);
                }
            }
            (Partial::Count(n), Partial::Count(m)) => *n += m,
            (Partial::First(slot), Partial::First(other)) => {
                if slot.is_none() {
                    *slot = other;
                }
            }
            _ => unreachable!("partials of different actions"),
        }
        Ok(())
    }

    pub fn into_partial(self) -> Partial {
        self.partial
    }

    pub fn finish(self, action: &Action) -> Result<Output> {
        Ok(match self.partial {
            Partial::List(items) => Output::List(items),
            Partial::Fold(Some(v)) => Output::Value(v),
            Partial::Fold(None) => return Err(Error::EmptyReduce),
            Partial::Max(best) => {
                debug_assert!(matches!(action, Action::Max { .. }));
                Output::List(best.into_iter().map(|(_, v)| v).collect())
            }
            Partial::Count(n) => Output::Count(n),
            Partial::First(v) => Output::First(v),
        })
    }
}

fn offer(best: &mut Vec<(Value, Value)>, key: Value, v: Value, size: Option<usize>) {
    let ord = best.first().map_or(Ordering::Greater, |(k, _)| key.cmp(k));
    match ord {
        Ordering::Less => {}
        Ordering::Greater => {
            best.clear();
            best.push((key, v));
        }
        Ordering::Equal => {
            if size.is_none_or(|s| best.len() < s) {
                best.push((key, v));
            }
        }
    }
    if let Some(s) = size {
        best.truncate(s);
    }
}

/// Merges partials listed in stream order into the action's result; a
/// `None` entry marks a piece whose result never arrived.
pub fn combine(action: &Action, partials: impl IntoIterator<Item = Option<Partial>>) -> Result<Output> {
    let mut acc = Accumulator::new(action);
    for (i, p) in partials.into_iter().enumerate() {
        let p = p.ok_or(Error::IncompleteExecution { job: i as u64 })?;
        acc.absorb(action, p)?;
    }
    acc.finish(action)
}

/// Runs elements through a chain of transformations into an accumulator.
pub struct StreamProcessor<'t> {
    transforms: &'t [Transform],
    action: &'t Action,
    /// Elements still allowed through each `take`, by transform index.
    remaining: Vec<u64>,
    exhausted: bool,
    acc: Accumulator,
}

impl<'t> StreamProcessor<'t> {
    /// `action` is the one `acc` was built for.
    pub fn new(transforms: &'t [Transform], action: &'t Action, acc: Accumulator) -> StreamProcessor<'t> {
        let remaining: Vec<u64> = transforms
            .iter()
            .map(|t| match t {
                Transform::Take(k) => *k,
                _ => u64::MAX,
            })
            .collect();
        let exhausted = remaining.contains(&0);
        StreamProcessor {
            transforms,
            action,
            remaining,
            exhausted,
            acc,
        }
    }

    /// True once no further input can change the result.
    pub fn is_done(&self) -> bool {
        self.exhausted || self.acc.is_done()
    }

    pub fn push(&mut self, mut v: Value) -> Result<Flow> {
        if self.is_done() {
            return Ok(Flow::Stop);
        }
        for (i, t) in self.transforms.iter().enumerate() {
            match t {
                Transform::Map { label, f } => {
                    v = f(&v).map_err(|e| user(&format!("map `{label}`"), &v, e))?;
                }
                Transform::Filter { label, pred } => {
                    if !pred(&v).map_err(|e| user(&format!("filter `{label}`"), &v, e))? {
                        return Ok(Flow::Continue);
                    }
                }
                Transform::Take(_) => {
                    self.remaining[i] -= 1;
                    if self.remaining[i] == 0 {
                        self.exhausted = true;
                    }
                }
            }
        }
        let flow = self.acc.push(self.action, v)?;
        Ok(if self.is_done() { Flow::Stop } else { flow })
    }

    pub fn into_accumulator(self) -> Accumulator {
        self.acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn add() -> Action {
        Action::Reduce {
            f: Arc::new(|a, b| Ok(Value::Int(a.as_int().unwrap() + b.as_int().unwrap()))),
            init: None,
        }
    }

    fn pair(a: i64, b: i64) -> Value {
        Value::tuple([a.into(), b.into()])
    }

    #[test]
    fn combine_counts() {
        let parts = [4, 4, 4, 3].map(|n| Some(Partial::Count(n)));
        assert_eq!(combine(&Action::Count, parts).unwrap(), Output::Count(15));
    }

    #[test]
    fn combine_reduce() {
        let parts = [6, 4].map(|n| Some(Partial::Fold(Some(Value::Int(n)))));
        assert_eq!(combine(&add(), parts).unwrap(), Output::Value(Value::Int(10)));
    }

    #[test]
    fn combine_tied_maxima() {
        let first = Arc::new(|v: &Value| Ok(v.as_tuple().unwrap()[0].clone()));
        let action = Action::Max {
            key: Some(first),
            size: None,
        };
        let k = Value::Int(4);
        let parts = [
            Some(Partial::Max(vec![(k.clone(), pair(4, 0))])),
            Some(Partial::Max(vec![(k.clone(), pair(4, 1)), (k.clone(), pair(4, 2))])),
        ];
        assert_eq!(
            combine(&action, parts).unwrap(),
            Output::List(vec![pair(4, 0), pair(4, 1), pair(4, 2)])
        );
    }

    #[test]
    fn missing_partial() {
        let parts = [Some(Partial::Count(1)), None];
        assert!(matches!(
            combine(&Action::Count, parts),
            Err(Error::IncompleteExecution { job: 1 })
        ));
    }

    #[test]
    fn max_keeps_first_ties_up_to_size() {
        let action = Action::Max {
            key: None,
            size: Some(2),
        };
        let mut acc = Accumulator::new(&action);
        for i in [3, 1, 3, 3, 2] {
            acc.push(&action, Value::Int(i)).unwrap();
        }
        assert_eq!(
            acc.finish(&action).unwrap(),
            Output::List(vec![Value::Int(3), Value::Int(3)])
        );
    }

    #[test]
    fn take_zero_is_done_immediately() {
        let ts = [Transform::Take(0)];
        let p = StreamProcessor::new(&ts, &Action::Collect, Accumulator::list());
        assert!(p.is_done());
    }
}
