//! Grid executor for the data-parallel sweep loops.
//!
//! With the `parallel` feature (default) [`map_grid`] fans the closure out
//! over rayon's thread pool; without it the sequential path is compiled in.
//! Collection preserves index order and each point is an independent pure
//! computation, so the output is bitwise identical either way.

/// Evaluate `f` on `0..n` and collect in index order.
#[cfg(feature = "parallel")]
pub fn map_grid<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

/// Evaluate `f` on `0..n` and collect in index order.
#[cfg(not(feature = "parallel"))]
pub fn map_grid<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    map_grid_seq(n, f)
}

/// Sequential reference executor; always available so callers and benches
/// can compare against the parallel path.
pub fn map_grid_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}
