//! Pipelines: a source method, a chain of stream transformations and a
//! terminal action.
//!
//! ```text
//! domain ── iterate | generate(n) | cnfs ──> map/filter/take ... ──> action
//! ```
//!
//! A [`Pipeline`] is a value; builder methods return new pipelines and leave
//! the receiver untouched. Nothing runs until [`Pipeline::run`].

mod context;
mod stream;

use std::fmt;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use context::{ExecutionContext, SEED_ENV};
pub use stream::{combine, Accumulator, Flow, Output, Partial, StreamProcessor};

use crate::cnf::cnfs;
use crate::domain::{Domain, MapFn, PredFn};
use crate::error::{Result, UserError};
use crate::value::Value;

/// Binary function folded over the stream.
pub type ReduceFn = Arc<dyn Fn(&Value, &Value) -> Result<Value, UserError> + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Iterate,
    /// `n` independent uniform samples.
    Generate(u64),
    Cnfs,
}

#[derive(Clone)]
pub enum Transform {
    Map { label: String, f: MapFn },
    Filter { label: String, pred: PredFn },
    Take(u64),
}

#[derive(Clone)]
pub enum Action {
    Collect,
    Reduce {
        f: ReduceFn,
        init: Option<Value>,
    },
    /// All maximal elements (by `key` if given), at most `size` of them.
    Max {
        key: Option<MapFn>,
        size: Option<usize>,
    },
    Count,
    First,
}

#[derive(Clone)]
pub struct Pipeline {
    domain: Domain,
    method: Method,
    transforms: Arc<[Transform]>,
    action: Action,
}

impl Pipeline {
    /// Iterate every element and collect them.
    pub fn new(domain: &Domain) -> Pipeline {
        Pipeline {
            domain: domain.clone(),
            method: Method::Iterate,
            transforms: Arc::from([]),
            action: Action::Collect,
        }
    }

    pub fn iterate(domain: &Domain) -> Pipeline {
        Pipeline::new(domain)
    }

    pub fn generate(domain: &Domain, n: u64) -> Pipeline {
        Pipeline::new(domain).with_method(Method::Generate(n))
    }

    pub fn cnfs(domain: &Domain) -> Pipeline {
        Pipeline::new(domain).with_method(Method::Cnfs)
    }

    pub fn with_method(&self, method: Method) -> Pipeline {
        Pipeline { method, ..self.clone() }
    }

    fn then(&self, t: Transform) -> Pipeline {
        let mut transforms = self.transforms.to_vec();
        transforms.push(t);
        Pipeline {
            transforms: transforms.into(),
            ..self.clone()
        }
    }

    pub fn map<F>(&self, f: F) -> Pipeline
    where
        F: Fn(&Value) -> Result<Value, UserError> + Send + Sync + 'static,
    {
        self.map_labeled("map", Arc::new(f))
    }

    pub fn map_labeled(&self, label: &str, f: MapFn) -> Pipeline {
        self.then(Transform::Map {
            label: label.to_string(),
            f,
        })
    }

    pub fn filter<P>(&self, pred: P) -> Pipeline
    where
        P: Fn(&Value) -> Result<bool, UserError> + Send + Sync + 'static,
    {
        self.filter_labeled("filter", Arc::new(pred))
    }

    pub fn filter_labeled(&self, label: &str, pred: PredFn) -> Pipeline {
        self.then(Transform::Filter {
            label: label.to_string(),
            pred,
        })
    }

    pub fn take(&self, k: u64) -> Pipeline {
        self.then(Transform::Take(k))
    }

    pub fn with_action(&self, action: Action) -> Pipeline {
        Pipeline { action, ..self.clone() }
    }

    pub fn collect(&self) -> Pipeline {
        self.with_action(Action::Collect)
    }

    pub fn reduce<F>(&self, f: F) -> Pipeline
    where
        F: Fn(&Value, &Value) -> Result<Value, UserError> + Send + Sync + 'static,
    {
        self.with_action(Action::Reduce {
            f: Arc::new(f),
            init: None,
        })
    }

    pub fn reduce_with<F>(&self, init: Value, f: F) -> Pipeline
    where
        F: Fn(&Value, &Value) -> Result<Value, UserError> + Send + Sync + 'static,
    {
        self.with_action(Action::Reduce {
            f: Arc::new(f),
            init: Some(init),
        })
    }

    pub fn max(&self) -> Pipeline {
        self.with_action(Action::Max { key: None, size: None })
    }

    pub fn max_by<F>(&self, key: F, size: Option<usize>) -> Pipeline
    where
        F: Fn(&Value) -> Result<Value, UserError> + Send + Sync + 'static,
    {
        self.with_action(Action::Max {
            key: Some(Arc::new(key)),
            size,
        })
    }

    pub fn max_size(&self, size: usize) -> Pipeline {
        self.with_action(Action::Max {
            key: None,
            size: Some(size),
        })
    }

    pub fn count(&self) -> Pipeline {
        self.with_action(Action::Count)
    }

    pub fn first(&self) -> Pipeline {
        self.with_action(Action::First)
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn transforms(&self) -> &[Transform] {
        &self.transforms
    }

    pub fn action(&self) -> &Action {
        &self.action
    }

    /// Serial run; the seed for `generate` comes from the environment.
    pub fn run(&self) -> Result<Output> {
        self.run_with(&ExecutionContext::serial())
    }

    pub fn run_with(&self, ctx: &ExecutionContext) -> Result<Output> {
        match ctx.pool_config() {
            Some(cfg) => crate::parallel::execute_parallel(self, cfg, ctx.seed()).map(|r| r.output),
            None => self.run_serial(ctx.seed()),
        }
    }

    fn run_serial(&self, seed: u64) -> Result<Output> {
        let mut proc = StreamProcessor::new(&self.transforms, &self.action, Accumulator::new(&self.action));
        let mut source = self.source(seed)?;
        while !proc.is_done() {
            let Some(item) = source.next() else { break };
            if proc.push(item?)? == Flow::Stop {
                break;
            }
        }
        proc.into_accumulator().finish(&self.action)
    }

    /// Elements produced by the source method, before any transformation.
    pub fn source(&self, seed: u64) -> Result<Box<dyn Iterator<Item = Result<Value>> + Send>> {
        Ok(match self.method {
            Method::Iterate => Box::new(self.domain.iter()),
            Method::Cnfs => Box::new(cnfs(&self.domain)?),
            Method::Generate(n) => {
                let d = self.domain.clone();
                Box::new((0..n).map(move |i| d.sample(&mut sample_rng(seed, i))))
            }
        })
    }
}

/// Generator for the `i`-th generated element: each element has its own
/// stream, so the result does not depend on who draws it.
pub fn sample_rng(seed: u64, i: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i);
    rng
}

impl fmt::Debug for Pipeline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let stages: Vec<String> = self
            .transforms
            .iter()
            .map(|t| match t {
                Transform::Map { label, .. } => format!("map({label})"),
                Transform::Filter { label, .. } => format!("filter({label})"),
                Transform::Take(k) => format!("take({k})"),
            })
            .collect();
        let action = match &self.action {
            Action::Collect => "collect".to_string(),
            Action::Reduce { .. } => "reduce".to_string(),
            Action::Max { size, .. } => match size {
                Some(k) => format!("max(size={k})"),
                None => "max".to_string(),
            },
            Action::Count => "count".to_string(),
            Action::First => "first".to_string(),
        };
        write!(f, "{} -> {:?}", self.domain.name(), self.method)?;
        for s in stages {
            write!(f, " -> {s}")?;
        }
        write!(f, " -> {action}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use std::sync::atomic::{AtomicUsize, Ordering};

    fn ints(vals: &[i64]) -> Vec<Value> {
        vals.iter().map(|&i| Value::Int(i)).collect()
    }

    fn pair(a: i64, b: i64) -> Value {
        Value::tuple([a.into(), b.into()])
    }

    #[test]
    fn grid_iterate() {
        let d = &Domain::range(5) * &Domain::range(3);
        let out = Pipeline::new(&d).run().unwrap().into_list().unwrap();
        let expected: Vec<Value> = (0..5).flat_map(|a| (0..3).map(move |b| pair(a, b))).collect();
        assert_eq!(out, expected);
    }

    #[test]
    fn grid_max_by_first_component() {
        let d = &Domain::range(5) * &Domain::range(3);
        let p = Pipeline::new(&d).max_by(|v| Ok(v.as_tuple().unwrap()[0].clone()), None);
        assert_eq!(
            p.run().unwrap().into_list().unwrap(),
            [pair(4, 0), pair(4, 1), pair(4, 2)]
        );
        let capped = Pipeline::new(&d).max_by(|v| Ok(v.as_tuple().unwrap()[0].clone()), Some(1));
        assert_eq!(capped.run().unwrap().into_list().unwrap(), [pair(4, 0)]);
    }

    #[test]
    fn generate_three() {
        let d = &Domain::range(5) * &Domain::range(3);
        let out = Pipeline::generate(&d, 3).run().unwrap().into_list().unwrap();
        assert_eq!(out.len(), 3);
    }

    #[test]
    fn map_take_and_reduce() {
        let r = Domain::range(3);
        let plus_one = Pipeline::new(&r).map(|x| Ok(Value::Int(x.as_int().unwrap() + 1)));
        assert_eq!(plus_one.run().unwrap().into_list().unwrap(), ints(&[1, 2, 3]));
        let none = Pipeline::new(&Domain::range(10)).take(0);
        assert!(none.run().unwrap().into_list().unwrap().is_empty());
        let sum =
            Pipeline::new(&Domain::range(5)).reduce(|a, b| Ok(Value::Int(a.as_int().unwrap() + b.as_int().unwrap())));
        assert_eq!(sum.run().unwrap().into_value(), Some(Value::Int(10)));
    }

    #[test]
    fn empty_reduce() {
        let add = |a: &Value, b: &Value| Ok(Value::Int(a.as_int().unwrap() + b.as_int().unwrap()));
        let p = Pipeline::new(&Domain::range(0)).reduce(add);
        assert!(matches!(p.run(), Err(Error::EmptyReduce)));
        let p = Pipeline::new(&Domain::range(0)).reduce_with(Value::Int(7), add);
        assert_eq!(p.run().unwrap().into_value(), Some(Value::Int(7)));
    }

    #[test]
    fn count_and_first() {
        let d = Domain::range(10).filter(|x| Ok(x.as_int().unwrap() > 6));
        assert_eq!(Pipeline::new(&d).count().run().unwrap().into_count(), Some(3));
        assert_eq!(
            Pipeline::new(&d).first().run().unwrap().into_value(),
            Some(Value::Int(7))
        );
        let empty = Pipeline::new(&Domain::range(0)).first().run().unwrap();
        assert_eq!(empty, Output::First(None));
    }

    #[test]
    fn take_is_lazy() {
        let seen = Arc::new(AtomicUsize::new(0));
        let counter = seen.clone();
        let d = Domain::range(1000).map(move |x| {
            counter.fetch_add(1, Ordering::SeqCst);
            Ok(x.clone())
        });
        let out = Pipeline::new(&d).take(5).run().unwrap();
        assert_eq!(out.into_list().unwrap().len(), 5);
        assert_eq!(seen.load(Ordering::SeqCst), 5);
        seen.store(0, Ordering::SeqCst);
        Pipeline::new(&d).take(0).run().unwrap();
        assert_eq!(seen.load(Ordering::SeqCst), 0);
        Pipeline::new(&d).first().run().unwrap();
        assert_eq!(seen.load(Ordering::SeqCst), 1);
    }

    #[test]
    fn builders_do_not_mutate() {
        let base = Pipeline::new(&Domain::range(4));
        let taken = base.take(2);
        assert_eq!(base.run().unwrap().into_list().unwrap().len(), 4);
        assert_eq!(taken.run().unwrap().into_list().unwrap().len(), 2);
        assert_eq!(base.transforms().len(), 0);
    }

    #[test]
    fn transform_errors_name_the_element() {
        let p = Pipeline::new(&Domain::range(4)).map_labeled(
            "explode",
            Arc::new(|x: &Value| {
                if x.as_int() == Some(2) {
                    Err("boom".into())
                } else {
                    Ok(x.clone())
                }
            }),
        );
        match p.run() {
            Err(Error::Transform { stage, element, .. }) => {
                assert_eq!(stage, "map `explode`");
                assert_eq!(element, "2");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn generate_is_reproducible() {
        let d = Domain::subsets(&Domain::range(8)).unwrap();
        let ctx = ExecutionContext::serial().with_seed(42);
        let a = Pipeline::generate(&d, 20).run_with(&ctx).unwrap();
        let b = Pipeline::generate(&d, 20).run_with(&ctx).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn cnfs_method() {
        let n = Domain::uset(2, "n").unwrap();
        let graphs = Domain::subsets(&(&n * &n)).unwrap();
        assert_eq!(Pipeline::cnfs(&graphs).count().run().unwrap().into_count(), Some(10));
        let bad = Pipeline::cnfs(&Domain::values([Value::Int(1)]));
        assert!(matches!(bad.run(), Err(Error::NonStrict { .. })));
    }
}
