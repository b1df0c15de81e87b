//! Deterministic data-parallel kernels.
//!
//! Every reduction is split into fixed-size chunks; chunk partials are
//! computed in any order (in parallel when the `parallel` feature is on)
//! but always combined in index order. Results are therefore bit-identical
//! across thread counts and between the parallel and sequential builds.

use num_complex::Complex64;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Chunk granularity for reductions and fills.
pub const CHUNK: usize = 1 << 12;

fn chunk_bounds(n: usize, chunk_id: usize) -> (usize, usize) {
    let lo = chunk_id * CHUNK;
    (lo, usize::min(lo + CHUNK, n))
}

fn num_chunks(n: usize) -> usize {
    n.div_ceil(CHUNK)
}

/// Sum of `f(i)` for `i in 0..n`, chunked and combined in index order.
pub fn sum_f64<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let partials = partials(n, |lo, hi| (lo..hi).map(&f).sum::<f64>());
    partials.into_iter().sum()
}

/// Complex analogue of [`sum_f64`].
pub fn sum_c64<F>(n: usize, f: F) -> Complex64
where
    F: Fn(usize) -> Complex64 + Sync,
{
    let partials = partials(n, |lo, hi| {
        (lo..hi).map(&f).fold(Complex64::ZERO, |a, b| a + b)
    });
    partials.into_iter().fold(Complex64::ZERO, |a, b| a + b)
}

#[cfg(feature = "parallel")]
fn partials<T, G>(n: usize, per_chunk: G) -> Vec<T>
where
    T: Send,
    G: Fn(usize, usize) -> T + Sync,
{
    (0..num_chunks(n))
        .into_par_iter()
        .map(|c| {
            let (lo, hi) = chunk_bounds(n, c);
            per_chunk(lo, hi)
        })
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn partials<T, G>(n: usize, per_chunk: G) -> Vec<T>
where
    T: Send,
    G: Fn(usize, usize) -> T + Sync,
{
    (0..num_chunks(n))
        .map(|c| {
            let (lo, hi) = chunk_bounds(n, c);
            per_chunk(lo, hi)
        })
        .collect()
}

/// Fill `out[i] = f(i)` for every index.
pub fn fill_c64<F>(out: &mut [Complex64], f: F)
where
    F: Fn(usize) -> Complex64 + Sync,
{
    fill_impl(out, f);
}

/// Fill `out[i] = f(i)` for every index.
pub fn fill_f64<F>(out: &mut [f64], f: F)
where
    F: Fn(usize) -> f64 + Sync,
{
    fill_impl(out, f);
}

/// In-place `y[i] += a * x[i]`.
#[cfg(feature = "parallel")]
pub fn axpy_c64(y: &mut [Complex64], a: Complex64, x: &[Complex64]) {
    y.par_chunks_mut(CHUNK).zip(x.par_chunks(CHUNK)).for_each(|(yc, xc)| {
        for (yi, xi) in yc.iter_mut().zip(xc) {
            *yi += a * xi;
        }
    });
}

/// In-place `y[i] += a * x[i]`.
#[cfg(not(feature = "parallel"))]
pub fn axpy_c64(y: &mut [Complex64], a: Complex64, x: &[Complex64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

#[cfg(feature = "parallel")]
fn fill_impl<T, F>(out: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    out.par_chunks_mut(CHUNK).enumerate().for_each(|(c, chunk)| {
        let base = c * CHUNK;
        for (off, slot) in chunk.iter_mut().enumerate() {
            *slot = f(base + off);
        }
    });
}

#[cfg(not(feature = "parallel"))]
fn fill_impl<T, F>(out: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    for (i, slot) in out.iter_mut().enumerate() {
        *slot = f(i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sum_matches_sequential_fold() {
        let n = 3 * CHUNK + 17;
        let by_chunks = sum_f64(n, |i| (i as f64).sin());
        let mut plain = 0.0;
        let mut partial = 0.0;
        for i in 0..n {
            partial += (i as f64).sin();
            if (i + 1) % CHUNK == 0 {
                plain += partial;
                partial = 0.0;
            }
        }
        plain += partial;
        assert_eq!(by_chunks, plain);
    }

    #[test]
    fn fill_writes_every_index() {
        let mut v = vec![0.0; 2 * CHUNK + 3];
        fill_f64(&mut v, |i| i as f64);
        for (i, x) in v.iter().enumerate() {
            assert_eq!(*x, i as f64);
        }
    }
}
