//! Data-parallel helpers with a sequential fallback.
//!
//! Results are always collected in index order, so the chosen path never
//! changes the output.

use crate::config::Execution;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Evaluates `f(i)` for `i in 0..n` and returns the results in index order.
pub fn map_indexed<T, F>(exec: Execution, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => (0..n).into_par_iter().map(f).collect(),
        _ => (0..n).map(f).collect(),
    }
}

/// Applies `f(i, row)` to every `width`-long row of `data`, returning the
/// per-row results in row order.
pub fn map_rows_mut<T, F>(exec: Execution, data: &mut [f64], width: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &mut [f64]) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => data
            .par_chunks_mut(width)
            .enumerate()
            .map(|(i, row)| f(i, row))
            .collect(),
        _ => data
            .chunks_mut(width)
            .enumerate()
            .map(|(i, row)| f(i, row))
            .collect(),
    }
}

/// First error in index order, or all values.
pub fn first_error<T, E>(results: Vec<Result<T, E>>) -> Result<Vec<T>, E> {
    results.into_iter().collect()
}
