//! Thin switch between rayon and plain iterators.
//!
//! Every helper keeps the output order of the sequential version, so results
//! only depend on how work is partitioned, never on scheduling.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `0..n` and collects in index order.
pub fn map_range<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Maps `f` over a slice and collects in order.
pub fn map_slice<S, T, F>(items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Sums integer results of `f` over an inclusive integer range.
pub fn sum_i64_range<F>(lo: i64, hi: i64, f: F) -> u64
where
    F: Fn(i64) -> u64 + Sync + Send,
{
    if hi < lo {
        return 0;
    }
    #[cfg(feature = "parallel")]
    {
        (lo..=hi).into_par_iter().map(f).sum()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (lo..=hi).map(f).sum()
    }
}

/// Number of worker threads the helpers will use.
pub fn current_threads() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}
