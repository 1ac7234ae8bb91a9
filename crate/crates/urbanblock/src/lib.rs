//! File formats, batch jobs and the command line around `urbanblock-core`.

pub mod cli;
pub mod dataset;
pub mod error;
pub mod formats;
pub mod geo_io;
pub mod image_io;
pub mod metrics_run;
pub mod report;

pub use error::{Error, Result};

/// Environment variable bounding the worker pool.
pub const WORKERS_ENV: &str = "URBANBLOCK_WORKERS";

/// Worker pool sized by [`WORKERS_ENV`], else one worker per core.
pub fn worker_pool() -> Result<rayon::ThreadPool> {
    let n = match std::env::var(WORKERS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Error::Config(format!("{WORKERS_ENV} must be a positive integer, got {v:?}")))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map_err(|e| Error::Config(e.to_string()))
}
