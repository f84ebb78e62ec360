use crate::parallel::PoolConfig;

/// Environment variable holding the seed for `generate`.
pub const SEED_ENV: &str = "CANONFORGE_SEED";

/// Where and how a pipeline runs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExecutionContext {
    pool: Option<PoolConfig>,
    seed: Option<u64>,
}

impl ExecutionContext {
    pub fn serial() -> ExecutionContext {
        ExecutionContext::default()
    }

    pub fn pool(cfg: PoolConfig) -> ExecutionContext {
        ExecutionContext {
            pool: Some(cfg),
            seed: None,
        }
    }

    /// Serial unless `CANONFORGE_WORKERS` is set.
    pub fn from_env() -> ExecutionContext {
        match PoolConfig::workers_from_env() {
            Some(w) => ExecutionContext::pool(PoolConfig::new(w)),
            None => ExecutionContext::serial(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> ExecutionContext {
        self.seed = Some(seed);
        self
    }

    pub fn pool_config(&self) -> Option<&PoolConfig> {
        self.pool.as_ref()
    }

    /// Explicit seed, else `CANONFORGE_SEED`, else 0.
    pub fn seed(&self) -> u64 {
        self.seed
            .or_else(|| std::env::var(SEED_ENV).ok()?.trim().parse().ok())
            .unwrap_or(0)
    }
}
