//! Data-parallel helpers. With the `parallel` feature these dispatch to
//! rayon; without it they run the same closures sequentially in index order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Calls `f(i, row_i)` for every `width`-sized row of `out` and collects the
/// return values in row order.
#[cfg(feature = "parallel")]
pub(crate) fn map_rows_mut<T, R, F>(out: &mut [T], width: usize, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(usize, &mut [T]) -> R + Sync + Send,
{
    out.par_chunks_mut(width).enumerate().map(|(i, row)| f(i, row)).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_rows_mut<T, R, F>(out: &mut [T], width: usize, f: F) -> Vec<R>
where
    F: Fn(usize, &mut [T]) -> R,
{
    out.chunks_mut(width).enumerate().map(|(i, row)| f(i, row)).collect()
}

#[cfg(feature = "parallel")]
pub(crate) fn map_range<R, F>(range: std::ops::Range<u64>, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(u64) -> R + Sync + Send,
{
    range.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_range<R, F>(range: std::ops::Range<u64>, f: F) -> Vec<R>
where
    F: Fn(u64) -> R,
{
    range.map(f).collect()
}

/// Runs `f` on a pool of `workers` threads (0 means the global pool).
#[cfg(feature = "parallel")]
pub fn with_workers<R: Send>(workers: usize, f: impl FnOnce() -> R + Send) -> R {
    if workers == 0 {
        return f();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn with_workers<R: Send>(_workers: usize, f: impl FnOnce() -> R + Send) -> R {
    f()
}

pub fn parallel_enabled() -> bool {
    cfg!(feature = "parallel")
}
