//! Fan-out of independent replications over a worker pool.
//!
//! Replication `i` is a pure function of its index, and results come back in
//! index order, so every downstream reduction is independent of the worker
//! count.

use rayon::prelude::*;
use rayon::ThreadPoolBuilder;

use crate::error::{BenchError, Result};

/// Evaluates `f(0), …, f(reps − 1)` on `workers` threads (all cores if
/// `None`) and returns the results in index order.
pub fn replicate<T, F>(reps: u64, workers: Option<usize>, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    let mut builder = ThreadPoolBuilder::new();
    if let Some(w) = workers {
        builder = builder.num_threads(w);
    }
    let pool = builder
        .build()
        .map_err(|e| BenchError::Numerical(format!("cannot start worker pool: {e}")))?;
    pool.install(|| (0..reps).into_par_iter().map(&f).collect())
}
