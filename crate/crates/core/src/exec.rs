//! Data-parallel execution over index ranges.
//!
//! With the `parallel` feature an [`Executor`] with more than one worker owns
//! a dedicated rayon pool. Without the feature, or with a single worker,
//! everything runs sequentially on the caller's thread. Results are always
//! returned in index order, so downstream reductions do not depend on the
//! schedule.

#[cfg(feature = "parallel")]
use std::sync::Arc;

#[derive(Clone)]
pub struct Executor {
    workers: usize,
    #[cfg(feature = "parallel")]
    pool: Option<Arc<rayon::ThreadPool>>,
}

impl std::fmt::Debug for Executor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Executor").field("workers", &self.workers).finish()
    }
}

impl Executor {
    /// `workers` is clamped to at least one.
    pub fn new(workers: usize) -> Self {
        let workers = workers.max(1);
        #[cfg(feature = "parallel")]
        {
            let pool = (workers > 1).then(|| {
                Arc::new(
                    rayon::ThreadPoolBuilder::new()
                        .num_threads(workers)
                        .build()
                        .expect("failed to build rayon thread pool"),
                )
            });
            Executor { workers, pool }
        }
        #[cfg(not(feature = "parallel"))]
        Executor { workers }
    }

    pub fn sequential() -> Self {
        Executor::new(1)
    }

    /// One worker per available core.
    pub fn available() -> Self {
        Executor::new(std::thread::available_parallelism().map_or(1, |n| n.get()))
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    pub fn is_parallel(&self) -> bool {
        #[cfg(feature = "parallel")]
        {
            self.pool.is_some()
        }
        #[cfg(not(feature = "parallel"))]
        false
    }

    /// `(0..n).map(f)` collected in order.
    pub fn map<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if let Some(pool) = &self.pool {
            use rayon::prelude::*;
            return pool.install(|| (0..n).into_par_iter().map(&f).collect());
        }
        (0..n).map(f).collect()
    }

    /// Fills `out` chunk by chunk; `f(start, chunk)` writes `out[start..]`.
    pub fn for_each_chunk<T, F>(&self, out: &mut [T], chunk: usize, f: F)
    where
        T: Send,
        F: Fn(usize, &mut [T]) + Sync + Send,
    {
        let chunk = chunk.max(1);
        #[cfg(feature = "parallel")]
        if let Some(pool) = &self.pool {
            use rayon::prelude::*;
            pool.install(|| {
                out.par_chunks_mut(chunk)
                    .enumerate()
                    .for_each(|(c, slice)| f(c * chunk, slice))
            });
            return;
        }
        for (c, slice) in out.chunks_mut(chunk).enumerate() {
            f(c * chunk, slice);
        }
    }
}

impl Default for Executor {
    fn default() -> Self {
        Executor::sequential()
    }
}
