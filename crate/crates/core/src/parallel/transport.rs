//! Moving jobs to workers and results back.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::thread::JoinHandle;
use std::time::Instant;

use crossbeam_channel::{unbounded, Receiver, Sender};

use super::{JobStats, SliceJob, Strategy};
use crate::domain::{Domain, Signal};
use crate::error::{Error, Result};
use crate::pipeline::{Accumulator, Action, Flow, Partial, StreamProcessor, Transform};
use crate::value::Value;

/// The part of a pipeline that runs on workers.
pub struct Fragment {
    pub(crate) domain: Domain,
    pub(crate) transforms: Vec<Transform>,
    pub(crate) action: Action,
    /// Return plain element lists; the coordinator finishes the pipeline.
    pub(crate) gather: bool,
}

impl Fragment {
    fn execute(&self, job: &SliceJob, batch: Option<&[Value]>, stats: &mut JobStats) -> Result<Partial> {
        let acc = if self.gather {
            Accumulator::list()
        } else {
            Accumulator::partial(&self.action)
        };
        let mut proc = StreamProcessor::new(&self.transforms, &self.action, acc);
        match job.strategy {
            Strategy::Full => {
                for v in self.domain.iter_slice_full(job.offset, job.span)? {
                    stats.produced += 1;
                    if proc.push(v?)? == Flow::Stop {
                        break;
                    }
                }
            }
            Strategy::Filtered => {
                for signal in self.domain.iter_slice(job.offset, job.span)? {
                    match signal? {
                        Signal::Skipped(n) => stats.skipped += n,
                        Signal::Element(v) => {
                            stats.produced += 1;
                            if proc.push(v)? == Flow::Stop {
                                break;
                            }
                        }
                    }
                }
            }
            Strategy::Fallback => {
                for v in batch.unwrap_or_default() {
                    stats.produced += 1;
                    if proc.push(v.clone())? == Flow::Stop {
                        break;
                    }
                }
            }
        }
        Ok(proc.into_accumulator().into_partial())
    }
}

/// A job with everything needed to run it.
#[derive(Clone)]
pub struct Task {
    pub job: SliceJob,
    /// 0 for the first try.
    pub attempt: u32,
    pub batch: Option<Arc<[Value]>>,
    pub fragment: Arc<Fragment>,
}

pub struct TaskResult {
    pub job: SliceJob,
    pub attempt: u32,
    pub result: Result<Partial>,
    pub stats: JobStats,
}

/// Runs a task in the current thread, turning panics into errors.
pub fn run_task(task: &Task) -> TaskResult {
    let start = Instant::now();
    let mut stats = JobStats {
        span: task.job.span,
        ..JobStats::default()
    };
    let outcome = catch_unwind(AssertUnwindSafe(|| {
        task.fragment.execute(&task.job, task.batch.as_deref(), &mut stats)
    }));
    stats.wall = start.elapsed();
    let result = outcome.unwrap_or_else(|payload| {
        let msg = payload
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| payload.downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "unknown panic".to_string());
        Err(Error::WorkerPanic(msg))
    });
    TaskResult {
        job: task.job,
        attempt: task.attempt,
        result,
        stats,
    }
}

/// How tasks reach workers. The coordinator only submits and receives;
/// a network transport would serialize [`SliceJob`] descriptors.
pub trait JobTransport {
    /// Number of tasks worth keeping in flight.
    fn capacity(&self) -> usize;
    fn submit(&mut self, task: Task) -> Result<()>;
    /// Blocks until some submitted task finishes.
    fn receive(&mut self) -> Result<TaskResult>;
}

/// Worker threads in this process.
pub struct LocalPool {
    workers: usize,
    tasks: Option<Sender<Task>>,
    results: Receiver<TaskResult>,
    handles: Vec<JoinHandle<()>>,
    /// Set on drop so queued tasks are discarded.
    closed: Arc<AtomicBool>,
}

impl LocalPool {
    pub fn new(workers: usize) -> LocalPool {
        let workers = workers.max(1);
        let (task_tx, task_rx) = unbounded::<Task>();
        let (result_tx, result_rx) = unbounded();
        let closed = Arc::new(AtomicBool::new(false));
        let handles = (0..workers)
            .map(|i| {
                let rx = task_rx.clone();
                let tx = result_tx.clone();
                let closed = closed.clone();
                std::thread::Builder::new()
                    .name(format!("canonforge-worker-{i}"))
                    .spawn(move || {
                        for task in rx {
                            if closed.load(Ordering::Relaxed) {
                                break;
                            }
                            if tx.send(run_task(&task)).is_err() {
                                break;
                            }
                        }
                    })
                    .expect("spawn worker thread")
            })
            .collect();
        LocalPool {
            workers,
            tasks: Some(task_tx),
            results: result_rx,
            handles,
            closed,
        }
    }
}

impl JobTransport for LocalPool {
    fn capacity(&self) -> usize {
        self.workers * 2
    }

    fn submit(&mut self, task: Task) -> Result<()> {
        self.tasks
            .as_ref()
            .expect("pool is open")
            .send(task)
            .map_err(|_| Error::WorkerPanic("all workers exited".to_string()))
    }

    fn receive(&mut self) -> Result<TaskResult> {
        self.results
            .recv()
            .map_err(|_| Error::WorkerPanic("all workers exited".to_string()))
    }
}

impl Drop for LocalPool {
    fn drop(&mut self) {
        self.closed.store(true, Ordering::Relaxed);
        self.tasks.take();
        for h in self.handles.drain(..) {
            let _ = h.join();
        }
    }
}
