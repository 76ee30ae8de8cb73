use ctrwkit_core::runner::Runner;
use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};

use crate::error::{config, Result};

/// Replications on a rayon pool. Results are collected in index order.
pub struct RayonRunner {
    pool: ThreadPool,
}

impl RayonRunner {
    /// `None` uses rayon's default thread count.
    pub fn new(threads: Option<usize>) -> Result<Self> {
        let mut b = ThreadPoolBuilder::new();
        if let Some(n) = threads {
            if n == 0 {
                return Err(config("--threads must be at least 1"));
            }
            b = b.num_threads(n);
        }
        let pool = b.build().map_err(|e| config(format!("thread pool: {e}")))?;
        Ok(Self { pool })
    }
}

impl Runner for RayonRunner {
    fn run<T, F>(&self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        self.pool.install(|| (0..count).into_par_iter().map(f).collect())
    }
}
