//! Small dense linear-algebra helpers shared across modules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Eigenvalues of a complex Hermitian matrix, ascending.
///
/// Uses the real symmetric embedding `[[A, -B], [B, A]]` of `H = A + iB`,
/// whose spectrum is that of `H` with every eigenvalue doubled; adjacent
/// pairs of the sorted embedded spectrum are averaged back out.
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "matrix must be square");
    if n == 0 {
        return Vec::new();
    }
    let mut emb = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = m[(i, j)];
            emb[(i, j)] = z.re;
            emb[(i + n, j + n)] = z.re;
            emb[(i, j + n)] = -z.im;
            emb[(i + n, j)] = z.im;
        }
    }
    let eig = emb.symmetric_eigen();
    let mut all: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    all.sort_by(|a, b| a.partial_cmp(b).unwrap());
    all.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect()
}

/// Eigen-decomposition of a real symmetric matrix: `(eigenvalues, vectors)`
/// with eigenvalues ascending and vectors in matching columns.
pub fn symmetric_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::<f64>::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

/// Matrix exponential `exp(a)` by scaling and squaring with a Taylor core.
pub fn expm(a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "matrix must be square");
    let norm = a.iter().map(|z| z.norm()).fold(0.0, f64::max) * n as f64;
    let squarings = if norm > 0.25 {
        (norm / 0.25).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a / Complex64::from(2f64.powi(squarings as i32));
    let mut result = DMatrix::<Complex64>::identity(n, n);
    let mut term = DMatrix::<Complex64>::identity(n, n);
    for k in 1..=40 {
        term = (&term * &scaled) / Complex64::from(k as f64);
        result += &term;
        let tail: f64 = term.iter().map(|z| z.norm()).sum();
        if tail < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Ordinary least squares `basis * beta ~= y` via QR.
///
/// Returns `(beta, residual_norm, covariance_scale)` where the last entry
/// is `(X^T X)^{-1}` for standard-error estimates.
pub fn least_squares(basis: &DMatrix<f64>, y: &DVector<f64>) -> Result<(DVector<f64>, f64, DMatrix<f64>)> {
    let n = basis.nrows();
    let p = basis.ncols();
    if n < p {
        return Err(Error::TooFewPoints { required: p, got: n });
    }
    let xtx = basis.transpose() * basis;
    let xty = basis.transpose() * y;
    let chol = xtx.clone().cholesky().ok_or(Error::RankDeficient)?;
    let beta = chol.solve(&xty);
    let inv = chol.inverse();
    let resid = (y - basis * &beta).norm();
    Ok((beta, resid, inv))
}

/// Least-squares polynomial fit of degree `degree` on points `(x, y)`,
/// returning a callable evaluator. The abscissa is affinely rescaled to
/// [-1, 1] before fitting to keep the Vandermonde system well conditioned.
pub fn polynomial_fit(xs: &[f64], ys: &[f64], degree: usize) -> Result<impl Fn(f64) -> f64> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch { expected: xs.len(), got: ys.len() });
    }
    let n = xs.len();
    let degree = degree.min(n.saturating_sub(1));
    let (lo, hi) = xs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let span = if hi > lo { hi - lo } else { 1.0 };
    let rescale = move |x: f64| 2.0 * (x - lo) / span - 1.0;
    let mut basis = DMatrix::<f64>::zeros(n, degree + 1);
    for (i, &x) in xs.iter().enumerate() {
        let u = rescale(x);
        let mut p = 1.0;
        for d in 0..=degree {
            basis[(i, d)] = p;
            p *= u;
        }
    }
    let y = DVector::from_column_slice(ys);
    let (beta, _, _) = least_squares(&basis, &y)?;
    Ok(move |x: f64| {
        let u = rescale(x);
        let mut acc = 0.0;
        let mut p = 1.0;
        for d in 0..beta.len() {
            acc += beta[d] * p;
            p *= u;
        }
        acc
    })
}
