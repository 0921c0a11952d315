//! Sequential / data-parallel execution switch.
//!
//! With the `parallel` feature the hot loops (column solves of the inverse,
//! independent experiment cells, randomized sweeps) run on the rayon pool.
//! Without it, or when [`Execution::Sequential`] is requested, the same
//! closures run in order on the calling thread. Results are always merged
//! in index order so both paths produce identical output.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Execution {
    Sequential,
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

impl Execution {
    /// True when work will actually be spread across threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }

    /// Maps `f` over `items`, preserving order.
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Execution::Parallel {
            use rayon::prelude::*;
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }

    /// Splits `0..n` into contiguous chunks, folds each with `fold`, and
    /// returns the per-chunk results in chunk order.
    pub fn fold_chunks<R, F>(self, n: usize, chunk: usize, fold: F) -> Vec<R>
    where
        R: Send,
        F: Fn(std::ops::Range<usize>) -> R + Sync + Send,
    {
        let chunk = chunk.max(1);
        let ranges: Vec<_> = (0..n).step_by(chunk).map(|s| s..(s + chunk).min(n)).collect();
        self.map(&ranges, |r| fold(r.clone()))
    }
}
