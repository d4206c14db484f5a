//! Order-preserving parallel evaluation of sweep points.

use rayon::prelude::*;

use crate::error::{CliError, Result};

/// Evaluate `f` at indices `0..n` on at most `jobs` worker threads. The
/// result vector is in index order whatever the scheduling.
pub fn run_indexed<T, F>(n: usize, jobs: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {jobs} worker threads: {e}")))?;
    Ok(pool.install(|| (0..n).into_par_iter().map(&f).collect()))
}
