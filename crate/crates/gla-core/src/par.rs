//! Data-parallel map helpers with a sequential fallback.
//!
//! Everything in this crate that iterates over an ω-grid, a k-grid or a batch
//! of independent configurations goes through [`map_grid`]. With the default
//! `parallel` feature the work is distributed with rayon; without it the same
//! call degrades to a plain sequential map, which keeps results bit-identical
//! between the two builds (each grid point is computed independently).
//! [`map_grid_seq`] is always sequential and exists so benchmarks can compare
//! the two paths inside one binary.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[cfg(feature = "parallel")]
pub fn map_grid<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_grid<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Sequential reference implementation (used by benches as the baseline).
pub fn map_grid_seq<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}
