//! Worker pools. Output never depends on the worker count; only timing does.

use rayon::{ThreadPool, ThreadPoolBuildError, ThreadPoolBuilder};

/// Cores available to this process, or 1 if that cannot be determined.
pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

pub fn worker_pool(workers: usize) -> Result<ThreadPool, ThreadPoolBuildError> {
    ThreadPoolBuilder::new().num_threads(workers.max(1)).build()
}

/// Runs `f` on a dedicated pool of `workers` threads.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T, ThreadPoolBuildError> {
    Ok(worker_pool(workers)?.install(f))
}
