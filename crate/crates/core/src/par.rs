//! Data-parallel helpers with a sequential fallback.
//!
//! Every helper returns the same result under both strategies: searches report the
//! first hit in input order, never the first to finish.

use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parallelism {
    Sequential,
    /// Uses the rayon pool when the `parallel` feature is enabled, otherwise
    /// behaves like `Sequential`.
    Parallel,
}

impl Default for Parallelism {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Parallelism::Parallel
        } else {
            Parallelism::Sequential
        }
    }
}

impl Parallelism {
    #[cfg(feature = "parallel")]
    fn parallel(self) -> bool {
        self == Parallelism::Parallel
    }
}

/// The first `Some` produced by `f`, in slice order.
pub fn find_map_first<T, R, F>(mode: Parallelism, items: &[T], f: F) -> Option<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Option<R> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode.parallel() {
        return items.par_iter().find_map_first(f);
    }
    let _ = mode;
    items.iter().find_map(f)
}

/// The first `Some` produced by `f`, in increasing index order.
pub fn find_map_first_range<R, F>(mode: Parallelism, range: Range<u64>, f: F) -> Option<R>
where
    R: Send,
    F: Fn(u64) -> Option<R> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode.parallel() {
        return range.into_par_iter().find_map_first(f);
    }
    let _ = mode;
    range.into_iter().find_map(f)
}

/// `f` applied to every item, results in input order.
pub fn map<T, R, F>(mode: Parallelism, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode.parallel() {
        return items.par_iter().map(f).collect();
    }
    let _ = mode;
    items.iter().map(f).collect()
}

/// Like [`map`] but stops at the first error in input order.
pub fn try_map<T, R, E, F>(mode: Parallelism, items: &[T], f: F) -> Result<Vec<R>, E>
where
    T: Sync,
    R: Send,
    E: Send,
    F: Fn(&T) -> Result<R, E> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode.parallel() {
        let all: Vec<Result<R, E>> = items.par_iter().map(f).collect();
        return all.into_iter().collect();
    }
    let _ = mode;
    items.iter().map(f).collect()
}
