//! Parallel execution switch. With the `parallel` feature (default), work can
//! fan out over rayon; without it everything runs sequentially. Results are
//! collected by index, so output never depends on the execution mode or the
//! number of worker threads.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parallelism {
    Sequential,
    #[cfg(feature = "parallel")]
    Rayon,
}

impl Default for Parallelism {
    #[cfg(feature = "parallel")]
    fn default() -> Self {
        Parallelism::Rayon
    }
    #[cfg(not(feature = "parallel"))]
    fn default() -> Self {
        Parallelism::Sequential
    }
}

/// Pin the global worker-pool size. A no-op without the `parallel` feature,
/// and silently keeps the existing pool if one was already built.
#[cfg(feature = "parallel")]
pub fn configure_threads(threads: Option<usize>) {
    if let Some(t) = threads {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global();
    }
}

#[cfg(not(feature = "parallel"))]
pub fn configure_threads(_threads: Option<usize>) {}

/// Map `0..count` through `f`, preserving index order in the output.
pub fn run_indexed<T, F>(count: u64, parallelism: Parallelism, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    match parallelism {
        Parallelism::Sequential => (0..count).map(f).collect(),
        #[cfg(feature = "parallel")]
        Parallelism::Rayon => (0..count).into_par_iter().map(f).collect(),
    }
}
