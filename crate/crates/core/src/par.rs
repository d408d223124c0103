//! Data-parallel primitives with a sequential fallback.
//!
//! With the default `parallel` feature the helpers fan work out over rayon;
//! without it they run plain iterators. Both paths produce bit-identical
//! results: parallelism is only applied where each output element is computed
//! independently (ordered map) or where the reduction is exact integer
//! addition, which is associative and commutative.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Ordered map over a slice.
#[cfg(feature = "parallel")]
pub(crate) fn map_slice<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_slice<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Ordered map over an index range.
#[cfg(feature = "parallel")]
pub(crate) fn map_range<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_range<U, F>(n: usize, f: F) -> Vec<U>
where
    F: Fn(usize) -> U,
{
    (0..n).map(f).collect()
}

/// Componentwise integer sum of rows selected by `pick` out of `n` sources.
/// `pick` must return a slice of exactly `dim` values. Exactness of integer
/// addition makes the result independent of how rayon partitions the range.
#[cfg(feature = "parallel")]
pub(crate) fn sum_rows<'a, F>(n: usize, dim: usize, pick: F) -> Vec<i32>
where
    F: Fn(usize) -> &'a [i32] + Sync + Send,
{
    (0..n)
        .into_par_iter()
        .fold(
            || vec![0i32; dim],
            |mut acc, i| {
                for (a, v) in acc.iter_mut().zip(pick(i)) {
                    *a += v;
                }
                acc
            },
        )
        .reduce(
            || vec![0i32; dim],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        )
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn sum_rows<'a, F>(n: usize, dim: usize, pick: F) -> Vec<i32>
where
    F: Fn(usize) -> &'a [i32],
{
    let mut acc = vec![0i32; dim];
    for i in 0..n {
        for (a, v) in acc.iter_mut().zip(pick(i)) {
            *a += v;
        }
    }
    acc
}
