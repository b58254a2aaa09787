//! Execution policy for the data-parallel loops.
//!
//! With the `parallel` feature (on by default) [`Execution::Parallel`] runs on
//! the current rayon pool. Without it both variants run sequentially. Only
//! element-wise maps are parallelized; reductions always run in index order so
//! results are bitwise identical across policies and thread counts.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
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
    /// Whether this policy actually fans out in the current build.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }

    /// `(0..n).map(f).collect()`, in index order regardless of policy.
    pub fn map_range<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Execution::Parallel {
            return (0..n).into_par_iter().with_min_len(16).map(f).collect();
        }
        (0..n).map(f).collect()
    }

    /// `items.iter().map(f).collect()`, in order regardless of policy.
    pub fn map_slice<S, T, F>(self, items: &[S], f: F) -> Vec<T>
    where
        S: Sync,
        T: Send,
        F: Fn(&S) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Execution::Parallel {
            return items.par_iter().with_min_len(16).map(f).collect();
        }
        items.iter().map(f).collect()
    }

    /// Same as [`map_range`](Self::map_range) but without a minimum chunk
    /// length, for loops whose body is itself expensive (one trial per item).
    pub fn map_tasks<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Execution::Parallel {
            return (0..n).into_par_iter().map(f).collect();
        }
        (0..n).map(f).collect()
    }
}
