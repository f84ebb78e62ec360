//! The coordinator loop.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;
use std::time::Instant;

use num_traits::ToPrimitive;
use serde::Serialize;

use super::transport::{Fragment, JobTransport, LocalPool, Task};
use super::{JobStats, Planner, PoolConfig, SliceJob, Strategy};
use crate::error::{Error, Result, Slicing};
use crate::pipeline::{Accumulator, Method, Output, Partial, Pipeline, StreamProcessor, Transform};
use crate::value::Value;

/// Per-job record kept for inspection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct JobRecord {
    pub job: SliceJob,
    pub stats: JobStats,
    pub attempts: u32,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub output: Output,
    pub strategy: Strategy,
    pub workers: usize,
    /// Successful jobs in job order.
    pub jobs: Vec<JobRecord>,
    /// The deadline stopped dispatching before the input was exhausted.
    pub deadline_hit: bool,
}

/// Runs `p` on a fresh pool of local worker threads.
pub fn execute_parallel(p: &Pipeline, cfg: &PoolConfig, seed: u64) -> Result<RunReport> {
    let mut pool = LocalPool::new(cfg.workers);
    execute_with(p, cfg, seed, &mut pool)
}

fn strategy_for(p: &Pipeline) -> Strategy {
    match (p.method(), p.domain().slicing()) {
        (Method::Iterate, Slicing::Full) => Strategy::Full,
        (Method::Iterate, Slicing::Filtered) => Strategy::Filtered,
        _ => Strategy::Fallback,
    }
}

/// Where merged partials go: straight into the action, or through the
/// stages from the first `take` onwards.
enum Sink<'p> {
    Absorb(Accumulator),
    Stream(StreamProcessor<'p>),
}

/// Runs `p` over any transport.
pub fn execute_with(p: &Pipeline, cfg: &PoolConfig, seed: u64, transport: &mut dyn JobTransport) -> Result<RunReport> {
    let strategy = strategy_for(p);
    let transforms = p.transforms();
    let cut = transforms
        .iter()
        .position(|t| matches!(t, Transform::Take(_)))
        .unwrap_or(transforms.len());
    let (local, rest) = transforms.split_at(cut);
    let action = p.action();
    let fragment = Arc::new(Fragment {
        domain: p.domain().clone(),
        transforms: local.to_vec(),
        action: action.clone(),
        gather: !rest.is_empty(),
    });
    let mut sink = if rest.is_empty() {
        Sink::Absorb(Accumulator::new(action))
    } else {
        Sink::Stream(StreamProcessor::new(rest, action, Accumulator::new(action)))
    };

    let total = match strategy {
        Strategy::Fallback => 0,
        _ => p.domain().span().to_u64().ok_or_else(|| Error::SizeOverflow {
            domain: p.domain().name().to_string(),
        })?,
    };
    let mut source = match strategy {
        Strategy::Fallback => Some(p.source(seed)?),
        _ => None,
    };

    let started = Instant::now();
    let mut planner = Planner::new(cfg);
    let mut next_offset = 0u64;
    let mut next_id = 0u64;
    let mut next_merge = 0u64;
    let mut in_flight: HashMap<u64, Task> = HashMap::new();
    let mut finished: BTreeMap<u64, (JobRecord, Partial)> = BTreeMap::new();
    let mut records = Vec::new();
    let mut dispatching = true;
    let mut deadline_hit = false;

    loop {
        while dispatching && in_flight.len() < transport.capacity() {
            if cfg.deadline.is_some_and(|d| started.elapsed() >= d) {
                deadline_hit = true;
                dispatching = false;
                break;
            }
            let span = planner.next_span();
            let (job, batch) = match source.as_mut() {
                None => {
                    if next_offset >= total {
                        dispatching = false;
                        break;
                    }
                    let len = span.min(total - next_offset);
                    (
                        SliceJob {
                            id: next_id,
                            strategy,
                            offset: next_offset,
                            span: len,
                        },
                        None,
                    )
                }
                Some(src) => {
                    let batch = src.by_ref().take(span as usize).collect::<Result<Vec<Value>>>()?;
                    if batch.is_empty() {
                        dispatching = false;
                        break;
                    }
                    (
                        SliceJob {
                            id: next_id,
                            strategy,
                            offset: next_offset,
                            span: batch.len() as u64,
                        },
                        Some(Arc::from(batch)),
                    )
                }
            };
            next_offset += job.span;
            next_id += 1;
            let task = Task {
                job,
                attempt: 0,
                batch,
                fragment: fragment.clone(),
            };
            transport.submit(task.clone())?;
            in_flight.insert(job.id, task);
        }
        if in_flight.is_empty() {
            break;
        }

        let res = transport.receive()?;
        let mut task = in_flight.remove(&res.job.id).expect("result for a submitted job");
        match res.result {
            Ok(partial) => {
                planner.record(res.stats);
                let record = JobRecord {
                    job: res.job,
                    stats: res.stats,
                    attempts: res.attempt + 1,
                };
                finished.insert(res.job.id, (record, partial));
            }
            Err(_) if res.attempt == 0 => {
                task.attempt = 1;
                transport.submit(task.clone())?;
                in_flight.insert(task.job.id, task);
            }
            Err(e) => {
                return Err(Error::JobFailed {
                    job: res.job.to_json(),
                    source: Box::new(e),
                })
            }
        }

        while let Some((record, partial)) = finished.remove(&next_merge) {
            records.push(record);
            next_merge += 1;
            match &mut sink {
                Sink::Absorb(acc) => {
                    acc.absorb(action, partial)?;
                    if acc.is_done() {
                        dispatching = false;
                    }
                }
                Sink::Stream(proc) => {
                    let Partial::List(items) = partial else {
                        unreachable!("gathering jobs return lists")
                    };
                    for v in items {
                        if proc.is_done() {
                            break;
                        }
                        proc.push(v)?;
                    }
                    if proc.is_done() {
                        dispatching = false;
                    }
                }
            }
        }
    }

    if next_merge != next_id {
        return Err(Error::IncompleteExecution { job: next_merge });
    }
    let acc = match sink {
        Sink::Absorb(acc) => acc,
        Sink::Stream(proc) => proc.into_accumulator(),
    };
    Ok(RunReport {
        output: acc.finish(action)?,
        strategy,
        workers: cfg.workers,
        jobs: records,
        deadline_hit,
    })
}
