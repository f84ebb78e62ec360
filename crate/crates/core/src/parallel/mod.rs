//! Sliced execution of pipelines on a pool of workers.
//!
//! The coordinator cuts the iteration space into jobs and merges partial
//! results in job order. Three strategies:
//!
//! * `Full`: a job is an (offset, span) window of positions; workers build
//!   their own iterator at the offset.
//! * `Filtered`: the same windows over a domain with filters. Workers walk
//!   them with a skip iterator, so every position is accounted for as either
//!   produced or skipped.
//! * `Fallback`: the coordinator produces elements itself and ships them in
//!   batches together with the rest of the pipeline.
//!
//! Job sizes adapt to the measured time per element (see [`plan`]).

mod execute;
mod transport;

use std::collections::VecDeque;
use std::time::Duration;

use serde::{Deserialize, Serialize};

pub use execute::{execute_parallel, execute_with, RunReport};
pub use transport::{run_task, Fragment, JobTransport, LocalPool, Task, TaskResult};

/// Environment variable overriding the worker count.
pub const WORKERS_ENV: &str = "CANONFORGE_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Full,
    Filtered,
    Fallback,
}

/// Transport-agnostic job descriptor: "start at `offset` and process `span`
/// positions". For `Fallback` the positions index the coordinator's stream
/// and the elements travel with the job.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SliceJob {
    pub id: u64,
    pub strategy: Strategy,
    pub offset: u64,
    pub span: u64,
}

impl SliceJob {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("descriptor serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct JobStats {
    pub span: u64,
    pub wall: Duration,
    /// Elements the job's iterator yielded.
    pub produced: u64,
    /// Positions reported as filtered out.
    pub skipped: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpanLimits {
    pub initial: u64,
    pub min: u64,
    pub max: u64,
}

impl Default for SpanLimits {
    fn default() -> Self {
        SpanLimits {
            initial: 1024,
            min: 16,
            max: 1 << 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoolConfig {
    pub workers: usize,
    pub target_job: Duration,
    pub limits: SpanLimits,
    /// Completed jobs the planner averages over.
    pub window: usize,
    /// Checked between jobs; the run returns what finished by then.
    pub deadline: Option<Duration>,
}

impl PoolConfig {
    pub fn new(workers: usize) -> PoolConfig {
        PoolConfig {
            workers: workers.max(1),
            target_job: Duration::from_millis(100),
            limits: SpanLimits::default(),
            window: 16,
            deadline: None,
        }
    }

    pub fn with_target_job_ms(mut self, ms: u64) -> PoolConfig {
        self.target_job = Duration::from_millis(ms.max(1));
        self
    }

    pub fn with_limits(mut self, limits: SpanLimits) -> PoolConfig {
        self.limits = limits;
        self
    }

    pub fn with_deadline(mut self, deadline: Duration) -> PoolConfig {
        self.deadline = Some(deadline);
        self
    }

    /// Replaces the worker count by `CANONFORGE_WORKERS` when it is set.
    pub fn with_env_override(mut self) -> PoolConfig {
        if let Some(w) = PoolConfig::workers_from_env() {
            self.workers = w;
        }
        self
    }

    pub fn workers_from_env() -> Option<usize> {
        std::env::var(WORKERS_ENV)
            .ok()?
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&w| w > 0)
    }
}

/// Span for the next job: `target / mean time per position` over the
/// recent jobs, clamped to the limits. Without history, the initial span.
pub fn plan(target: Duration, recent: &[JobStats], limits: &SpanLimits) -> u64 {
    let positions: u64 = recent.iter().map(|s| s.produced + s.skipped).sum();
    if positions == 0 {
        return limits.initial.clamp(limits.min, limits.max);
    }
    let wall: f64 = recent.iter().map(|s| s.wall.as_secs_f64()).sum();
    if wall <= 0.0 {
        return limits.max;
    }
    let per_position = wall / positions as f64;
    let span = (target.as_secs_f64() / per_position).round();
    (span.min(u64::MAX as f64) as u64).clamp(limits.min, limits.max)
}

/// Sliding window of recent job statistics.
#[derive(Debug, Clone)]
pub struct Planner {
    target: Duration,
    limits: SpanLimits,
    capacity: usize,
    recent: VecDeque<JobStats>,
}

impl Planner {
    pub fn new(cfg: &PoolConfig) -> Planner {
        Planner {
            target: cfg.target_job,
            limits: cfg.limits,
            capacity: cfg.window.max(1),
            recent: VecDeque::new(),
        }
    }

    pub fn record(&mut self, stats: JobStats) {
        if self.recent.len() == self.capacity {
            self.recent.pop_front();
        }
        self.recent.push_back(stats);
    }

    pub fn next_span(&self) -> u64 {
        let recent: Vec<JobStats> = self.recent.iter().copied().collect();
        plan(self.target, &recent, &self.limits)
    }
}
