//! Execution mode switch for the data-parallel loops.
//!
//! With the `parallel` feature the library uses rayon for independent iterations; without it,
//! or with [`Execution::Sequential`], every loop runs on the calling thread with identical
//! results.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How independent iterations are executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Execution {
    Sequential,
    /// Uses rayon when the `parallel` feature is enabled; sequential otherwise.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

// Below this many items the thread-pool overhead dominates.
#[cfg(feature = "parallel")]
const PARALLEL_THRESHOLD: usize = 32;

impl Execution {
    #[cfg(feature = "parallel")]
    fn fans_out(self, len: usize) -> bool {
        self == Execution::Parallel && len >= PARALLEL_THRESHOLD
    }

    /// `items.iter().map(f).collect()`, order-preserving.
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.fans_out(items.len()) {
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }

    /// The first `Some` in index order of `f(0), f(1), …, f(count - 1)`.
    pub fn find_map_first<R, F>(self, count: u64, f: F) -> Option<R>
    where
        R: Send,
        F: Fn(u64) -> Option<R> + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.fans_out(usize::try_from(count).unwrap_or(usize::MAX)) {
            return (0..count).into_par_iter().find_map_first(f);
        }
        (0..count).find_map(f)
    }
}
