//! Post-processing: growth fits, spreading classification, bimodality
//! detection and numerical U(1) bounds.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::observables::{effective_region_spanning, sz_variance, EffectiveRegion, FcsDistribution};
use crate::pauli::{commutator_norm_symbolic, sz_total, Axis, Boundary, HamiltonianSpec, PauliTerm};
use crate::state::{apply_operator, basis_state, evolve_krylov_op, KrylovOptions};

/// Least-squares fit over the basis `{1, x, 1/x}`.
#[derive(Debug, Clone, Serialize)]
pub struct FitResult {
    pub beta0: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub residual_norm: f64,
    pub points: usize,
    pub beta1_stderr: f64,
}

impl FitResult {
    /// The linear coefficient is consistent with zero when it is smaller
    /// than `max(0.05, 3 standard errors)`.
    pub fn beta1_consistent_with_zero(&self) -> bool {
        self.beta1.abs() < (3.0 * self.beta1_stderr).max(0.05)
    }
}

pub fn fit_growth(xs: &[f64], ys: &[f64]) -> Result<FitResult> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch { expected: xs.len(), got: ys.len() });
    }
    let mut distinct = xs.to_vec();
    distinct.sort_by(|a, b| a.partial_cmp(b).unwrap());
    distinct.dedup_by(|a, b| a == b);
    if distinct.len() < 4 {
        return Err(Error::TooFewPoints { required: 4, got: distinct.len() });
    }
    if xs.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::Invalid("fit abscissas must be positive".into()));
    }
    let n = xs.len();
    let mut basis = DMatrix::<f64>::zeros(n, 3);
    for (i, &x) in xs.iter().enumerate() {
        basis[(i, 0)] = 1.0;
        basis[(i, 1)] = x;
        basis[(i, 2)] = 1.0 / x;
    }
    let y = DVector::from_column_slice(ys);
    let (beta, residual_norm, inv) = linalg::least_squares(&basis, &y)?;
    let sigma_sq = if n > 3 { residual_norm.powi(2) / (n - 3) as f64 } else { 0.0 };
    Ok(FitResult {
        beta0: beta[0],
        beta1: beta[1],
        beta2: beta[2],
        residual_norm,
        points: n,
        beta1_stderr: (sigma_sq * inv[(1, 1)]).sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpreadingClass {
    Ballistic,
    Confined,
    Undetermined,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpreadingReport {
    pub classification: SpreadingClass,
    /// Slope of the region size against time over the trailing half.
    pub slope: f64,
    /// Two-standard-error confidence band of the slope.
    pub slope_confidence: (f64, f64),
    pub saturation: Option<f64>,
}

fn linear_regression(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|&x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(&x, &y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs.iter().zip(ys).map(|(&x, &y)| (y - intercept - slope * x).powi(2)).sum();
    let dof = (xs.len() as f64 - 2.0).max(1.0);
    let stderr = (rss / dof / sxx).sqrt();
    (slope, stderr)
}

/// Slope of `ys` against `xs` over the trailing half of the series, with
/// a two-standard-error confidence band.
pub fn trailing_slope(xs: &[f64], ys: &[f64]) -> Result<(f64, (f64, f64))> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch { expected: xs.len(), got: ys.len() });
    }
    if xs.len() < 5 {
        return Err(Error::TooFewPoints { required: 5, got: xs.len() });
    }
    let start = xs.len() / 2;
    let (slope, stderr) = linear_regression(&xs[start..], &ys[start..]);
    Ok((slope, (slope - 2.0 * stderr, slope + 2.0 * stderr)))
}

/// Classifies the growth of the effective-region size over time by a
/// linear regression on the trailing half of the series.
pub fn classify_spreading(times: &[f64], regions: &[EffectiveRegion]) -> Result<SpreadingReport> {
    let sizes: Vec<f64> = regions.iter().map(|r| r.size() as f64).collect();
    classify_spreading_sizes(times, &sizes)
}

pub fn classify_spreading_sizes(times: &[f64], sizes: &[f64]) -> Result<SpreadingReport> {
    if times.len() != sizes.len() {
        return Err(Error::DimensionMismatch { expected: times.len(), got: sizes.len() });
    }
    if times.len() < 5 {
        return Err(Error::TooFewPoints { required: 5, got: times.len() });
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Invalid("times must be strictly increasing".into()));
    }
    let start = times.len() / 2;
    let (ts, ss) = (&times[start..], &sizes[start..]);
    let (slope, stderr) = linear_regression(ts, ss);
    let band = (slope - 2.0 * stderr, slope + 2.0 * stderr);
    let spread = ss.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
        - ss.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    let classification = if spread < 1.0 {
        SpreadingClass::Confined
    } else if band.0 > 0.0 {
        SpreadingClass::Ballistic
    } else {
        SpreadingClass::Undetermined
    };
    let saturation = if classification == SpreadingClass::Confined {
        Some(ss.iter().sum::<f64>() / ss.len() as f64)
    } else {
        None
    };
    Ok(SpreadingReport { classification, slope, slope_confidence: band, saturation })
}

#[derive(Debug, Clone, Serialize)]
pub struct Peak {
    pub m: f64,
    pub height: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BimodalityReport {
    pub peaks: Vec<Peak>,
    pub separated: bool,
    /// Interior valley minimum over the smaller dominant peak height;
    /// present only when exactly two dominant peaks exist.
    pub valley_ratio: Option<f64>,
    /// Whether the even-magnetization selection rule was detected and the
    /// search restricted to the odd sublattice (plus the top outcome).
    pub parity_restricted: bool,
}

/// Detects whether a magnetization distribution has the two-separated-peak
/// structure of a cat state.
///
/// When the spin-flip selection rule is active (all even outcomes empty
/// except possibly the maximal one), the distribution is scanned on the
/// odd-m support plus the maximal outcome. A peak is dominant when it
/// carries more than 5% of the total mass; the distribution is separated
/// when exactly two dominant peaks exist and the valley between them drops
/// below `valley_threshold` times the smaller peak height.
pub fn detect_bimodality(fcs: &FcsDistribution, valley_threshold: f64) -> BimodalityReport {
    let total: f64 = fcs.p.iter().sum();
    let floor = 1e-10 * total.max(1e-300);

    // detect the parity selection rule on even-length chains
    let mut parity_restricted = false;
    if fcs.length % 2 == 0 {
        let mut even_occupied = false;
        let mut odd_occupied = false;
        for (&m, &p) in fcs.ms.iter().zip(&fcs.p) {
            let mi = m.round() as i64;
            if mi == (fcs.length / 2) as i64 {
                continue;
            }
            if p > floor {
                if mi.rem_euclid(2) == 0 {
                    even_occupied = true;
                } else {
                    odd_occupied = true;
                }
            }
        }
        parity_restricted = odd_occupied && !even_occupied;
    }

    let support: Vec<(f64, f64)> = if parity_restricted {
        let mut s: Vec<(f64, f64)> = fcs
            .ms
            .iter()
            .zip(&fcs.p)
            .filter(|(&m, _)| (m.round() as i64).rem_euclid(2) != 0)
            .map(|(&m, &p)| (m, p))
            .collect();
        let top = (fcs.length / 2) as f64;
        let p_top = *fcs.p.last().unwrap_or(&0.0);
        if p_top > floor {
            s.push((top, p_top));
        }
        s
    } else {
        fcs.ms.iter().zip(&fcs.p).map(|(&m, &p)| (m, p)).collect()
    };

    // local maxima on the support sequence
    let heights: Vec<f64> = support.iter().map(|&(_, p)| p).collect();
    let n = heights.len();
    let mut peak_idx: Vec<usize> = Vec::new();
    for i in 0..n {
        let left_ok = i == 0 || heights[i] > heights[i - 1];
        let right_ok = i + 1 == n || heights[i] >= heights[i + 1];
        if left_ok && right_ok && heights[i] > floor {
            peak_idx.push(i);
        }
    }

    // basin masses: split at the minimum between consecutive peaks
    let mut boundaries: Vec<usize> = vec![0];
    for pair in peak_idx.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let valley = (a + 1..=b)
            .min_by(|&i, &j| heights[i].partial_cmp(&heights[j]).unwrap())
            .unwrap_or(b);
        boundaries.push(valley);
    }
    boundaries.push(n);
    let peaks: Vec<Peak> = peak_idx
        .iter()
        .enumerate()
        .map(|(which, &i)| {
            let lo = boundaries[which];
            let hi = boundaries[which + 1];
            let mass: f64 = heights[lo..hi].iter().sum();
            Peak { m: support[i].0, height: heights[i], mass }
        })
        .collect();

    let dominant: Vec<&Peak> = peaks.iter().filter(|p| p.mass > 0.05 * total).collect();
    let (separated, valley_ratio) = if dominant.len() == 2 {
        let (i0, i1) = {
            let a = support.iter().position(|&(m, _)| m == dominant[0].m).unwrap();
            let b = support.iter().position(|&(m, _)| m == dominant[1].m).unwrap();
            (a.min(b), a.max(b))
        };
        let valley = heights[i0 + 1..i1].iter().fold(f64::INFINITY, |a, &b| a.min(b));
        let smaller = dominant[0].height.min(dominant[1].height);
        if smaller > 0.0 {
            let ratio = valley / smaller;
            (ratio < valley_threshold, Some(ratio))
        } else {
            (false, None)
        }
    } else {
        (false, None)
    };

    BimodalityReport { peaks, separated, valley_ratio, parity_restricted }
}

/// Numerical check of the U(1) bounds: after flipping `s` spins and
/// evolving under a magnetization-conserving Hamiltonian, the expectation
/// of a translation-invariant extensive observable deviates from its
/// polarized value by at most `2s ||O_A|| |A|`, and its variance exceeds
/// the polarized one by at most `4s ||O_A||^2 |A| |Ω_eps(t)|`.
#[derive(Debug, Clone, Serialize)]
pub struct U1Report {
    pub times: Vec<f64>,
    pub expectation_ratios: Vec<f64>,
    pub variance_ratios: Vec<f64>,
    pub region_sizes: Vec<usize>,
    pub max_ratio_expectation: f64,
    pub max_ratio_variance: f64,
    /// Largest drift of `Var(S^z)` from its initial value.
    pub max_var_sz_drift: f64,
    pub density_norm: f64,
    pub support: usize,
    pub flips: usize,
}

fn shifted_density(
    density: &[PauliTerm],
    shift: usize,
    length: usize,
    boundary: Boundary,
    support: usize,
) -> Result<Vec<PauliTerm>> {
    if boundary == Boundary::Open && shift + support > length {
        return Ok(Vec::new());
    }
    density
        .iter()
        .map(|t| {
            let factors: Vec<(usize, Axis)> =
                t.factors().iter().map(|f| ((f.site + shift) % length, f.axis)).collect();
            PauliTerm::new(t.coefficient(), &factors)
        })
        .collect()
}

pub fn u1_macroscopic_check(
    h: &HamiltonianSpec,
    flips: &[usize],
    density: &[PauliTerm],
    times: &[f64],
    epsilon: f64,
) -> Result<U1Report> {
    let length = h.length();
    if flips.is_empty() {
        return Err(Error::Invalid("at least one flipped spin required".into()));
    }
    for &f in flips {
        if f >= length {
            return Err(Error::SiteOutOfRange { site: f, length });
        }
    }
    if density.is_empty() {
        return Err(Error::Invalid("empty observable density".into()));
    }
    let comm = commutator_norm_symbolic(h, &sz_total(length))?;
    if comm > 1e-10 {
        return Err(Error::Invalid(format!(
            "hamiltonian does not conserve the magnetization (commutator norm {comm:e})"
        )));
    }
    let support = density.iter().filter_map(|t| t.max_site()).max().unwrap_or(0) + 1;

    // operator norm of the density on its own support
    let local = HamiltonianSpec::new(support, Boundary::Open, "density", density.to_vec())?;
    let norm = linalg::hermitian_eigenvalues(&local.dense_matrix()?)
        .into_iter()
        .map(f64::abs)
        .fold(0.0, f64::max);

    // the extensive translation-invariant observable
    let mut terms: Vec<PauliTerm> = Vec::new();
    for shift in 0..length {
        terms.extend(shifted_density(density, shift, length, h.boundary(), support)?);
    }
    let observable = HamiltonianSpec::new(length, h.boundary(), "extensive", terms)?.compile();

    let up = basis_state(length, 0)?;
    let up_image = apply_operator(&observable, &up)?;
    let up_mean = up.inner(&up_image)?.re;
    let up_var = up_image.inner(&up_image)?.re - up_mean * up_mean;

    let mut mask = 0usize;
    for &f in flips {
        mask |= 1 << f;
    }
    let initial = basis_state(length, mask)?;
    let var_sz_initial = sz_variance(&initial);
    let seed_left = *flips.iter().min().unwrap();
    let seed_right = *flips.iter().max().unwrap();

    let s = flips.len() as f64;
    let bound_expectation = 2.0 * s * norm * support as f64;

    let op = h.compile();
    let options = KrylovOptions::default();
    let mut report = U1Report {
        times: times.to_vec(),
        expectation_ratios: Vec::new(),
        variance_ratios: Vec::new(),
        region_sizes: Vec::new(),
        max_ratio_expectation: f64::NEG_INFINITY,
        max_ratio_variance: f64::NEG_INFINITY,
        max_var_sz_drift: 0.0,
        density_norm: norm,
        support,
        flips: flips.len(),
    };
    let mut state = initial;
    let mut reached = 0.0;
    for &t in times {
        if t < reached {
            return Err(Error::Invalid("times must be non-decreasing".into()));
        }
        state = evolve_krylov_op(&op, &state, t - reached, &options)?.0;
        reached = t;

        let image = apply_operator(&observable, &state)?;
        let mean = state.inner(&image)?.re;
        let var = image.inner(&image)?.re - mean * mean;
        let region = effective_region_spanning(&state, seed_left, seed_right, epsilon)?;
        let bound_variance = 4.0 * s * norm * norm * support as f64 * region.size() as f64;

        let ratio_e = (mean - up_mean).abs() / bound_expectation;
        let ratio_v = (var - up_var) / bound_variance;
        report.expectation_ratios.push(ratio_e);
        report.variance_ratios.push(ratio_v);
        report.region_sizes.push(region.size());
        report.max_ratio_expectation = report.max_ratio_expectation.max(ratio_e);
        report.max_ratio_variance = report.max_ratio_variance.max(ratio_v);
        report.max_var_sz_drift =
            report.max_var_sz_drift.max((sz_variance(&state) - var_sz_initial).abs());
    }
    Ok(report)
}
