//! Thin dispatch layer between the rayon data-parallel path and the
//! sequential fallback (`--no-default-features`).
//!
//! All callers produce results that are independent of worker count: every
//! parallel loop is a pure per-index map whose randomness, if any, comes from
//! an index-derived stream.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Runs `f` on a pool with `workers` threads (0 = default-sized pool).
///
/// Without the `parallel` feature this just calls `f`; `workers` is ignored.
#[cfg(feature = "parallel")]
pub fn with_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    if workers == 0 {
        f()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .expect("failed to build thread pool");
        pool.install(f)
    }
}

#[cfg(not(feature = "parallel"))]
pub fn with_pool<T: Send>(_workers: usize, f: impl FnOnce() -> T + Send) -> T {
    f()
}

/// Maps `f` over `0..n`, in parallel when the feature is enabled.
#[cfg(feature = "parallel")]
pub(crate) fn map_indexed<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indexed<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    (0..n).map(f).collect()
}

/// Like [`map_indexed`] but with a per-worker scratch value built by `init`.
#[cfg(feature = "parallel")]
pub(crate) fn map_with_scratch<T: Send, S: Send>(
    n: usize,
    init: impl Fn() -> S + Sync + Send,
    f: impl Fn(&mut S, usize) -> T + Sync + Send,
) -> Vec<T> {
    (0..n)
        .into_par_iter()
        .map_init(&init, |scratch, i| f(scratch, i))
        .collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_with_scratch<T: Send, S: Send>(
    n: usize,
    init: impl Fn() -> S + Sync + Send,
    f: impl Fn(&mut S, usize) -> T + Sync + Send,
) -> Vec<T> {
    let mut scratch = init();
    (0..n).map(|i| f(&mut scratch, i)).collect()
}

/// Sorts each inner slice in parallel when the feature is enabled.
#[cfg(feature = "parallel")]
pub(crate) fn for_each_mut<T: Send>(items: &mut [T], f: impl Fn(&mut T) + Sync + Send) {
    items.par_iter_mut().for_each(f);
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn for_each_mut<T: Send>(items: &mut [T], f: impl Fn(&mut T) + Sync + Send) {
    items.iter_mut().for_each(f);
}
