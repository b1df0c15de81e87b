//! Quantum Fisher information lower bound over extensive observables with
//! single-site densities `O[{n}] = sum_j n_j . sigma_j`, `|n_j| = 1`.
//!
//! For a pure state the Fisher information is four times the variance, so
//! the bound per site is `N = max Var(O) / |region|`. The maximizer solves
//! the blockwise eigenproblem `K v = (D ⊗ I_3) v` with unit 3-blocks; the
//! iterative solver normalizes `K v` block by block until stationary, and
//! reports `sum_j ||(K v)_j||` at the fixed point.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

use super::CovarianceMatrix;

#[derive(Debug, Clone, Copy)]
pub struct QuantumnessOptions {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for QuantumnessOptions {
    fn default() -> Self {
        Self { tolerance: 1e-10, max_iterations: 10_000, seed: 0x5eed }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct QuantumnessResult {
    /// The per-site bound `sum_j ||(K v)_j|| / |region|`.
    pub value: f64,
    /// Optimizing unit direction per site.
    pub directions: Vec<[f64; 3]>,
    pub iterations: usize,
    pub converged: bool,
    /// `v^T K v`, the variance of the optimizing observable; equals
    /// `value * |region|` at a true fixed point.
    pub variance: f64,
    /// Value found by the dense multi-start oracle, when that solver ran.
    pub dense_value: Option<f64>,
    /// Per-iteration values, for the solver trace.
    pub trace: Vec<f64>,
}

fn block_norms(w: &DVector<f64>, sites: usize) -> Vec<f64> {
    (0..sites)
        .map(|j| (w[3 * j].powi(2) + w[3 * j + 1].powi(2) + w[3 * j + 2].powi(2)).sqrt())
        .collect()
}

fn normalize_blocks(v: &mut DVector<f64>, sites: usize) {
    for j in 0..sites {
        let n = (v[3 * j].powi(2) + v[3 * j + 1].powi(2) + v[3 * j + 2].powi(2)).sqrt();
        if n > 0.0 {
            for a in 0..3 {
                v[3 * j + a] /= n;
            }
        }
    }
}

fn random_unit_block(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let b: [f64; 3] =
            [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let n = (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt();
        if n > 1e-3 {
            return [b[0] / n, b[1] / n, b[2] / n];
        }
    }
}

fn directions_of(v: &DVector<f64>, sites: usize) -> Vec<[f64; 3]> {
    (0..sites).map(|j| [v[3 * j], v[3 * j + 1], v[3 * j + 2]]).collect()
}

/// Blockwise-normalized power iteration for the constrained maximizer.
pub fn quantumness_iterative(
    k: &CovarianceMatrix,
    options: &QuantumnessOptions,
) -> Result<QuantumnessResult> {
    let sites = k.sites();
    if sites == 0 {
        return Err(Error::EmptyRegion);
    }
    let dim = 3 * sites;
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);

    // all blocks along x with a small random tilt, to leave symmetric
    // stationary saddles
    let mut v = DVector::<f64>::zeros(dim);
    for j in 0..sites {
        v[3 * j] = 1.0;
        for a in 0..3 {
            v[3 * j + a] += 1e-3 * rng.gen_range(-1.0..1.0);
        }
    }
    normalize_blocks(&mut v, sites);

    let mut trace = Vec::new();
    let mut last_value = f64::NAN;
    let mut converged = false;
    let mut iterations = 0;
    for iter in 0..options.max_iterations {
        iterations = iter + 1;
        let w = &k.entries * &v;
        let norms = block_norms(&w, sites);
        let mut next = w;
        let mut degenerate = false;
        for (j, &n) in norms.iter().enumerate() {
            if n < 1e-14 {
                // measure-zero start: restart the dead block
                let b = random_unit_block(&mut rng);
                for a in 0..3 {
                    next[3 * j + a] = b[a];
                }
                degenerate = true;
            } else {
                for a in 0..3 {
                    next[3 * j + a] /= n;
                }
            }
        }
        let value: f64 = norms.iter().sum();
        trace.push(value / sites as f64);
        let block_change: f64 = (0..sites)
            .map(|j| {
                (0..3)
                    .map(|a| (next[3 * j + a] - v[3 * j + a]).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max);
        let value_change = (value - last_value).abs();
        v = next;
        last_value = value;
        if !degenerate && block_change < options.tolerance && value_change < options.tolerance {
            converged = true;
            break;
        }
    }

    let w = &k.entries * &v;
    let value = block_norms(&w, sites).iter().sum::<f64>();
    let variance = v.dot(&(&k.entries * &v));
    Ok(QuantumnessResult {
        value: value / sites as f64,
        directions: directions_of(&v, sites),
        iterations,
        converged,
        variance,
        dense_value: None,
        trace,
    })
}

/// Dense oracle: multi-start projected gradient ascent on `v^T K v` with
/// unit 3-blocks. Exhaustive-start global maximizer for small regions.
pub fn quantumness_dense(k: &CovarianceMatrix) -> Result<QuantumnessResult> {
    let sites = k.sites();
    if sites == 0 {
        return Err(Error::EmptyRegion);
    }
    if sites > 8 {
        return Err(Error::LengthCap { length: sites, cap: 8 });
    }
    let dim = 3 * sites;
    let mut rng = ChaCha8Rng::seed_from_u64(0x0dac1e);

    let mut starts: Vec<DVector<f64>> = Vec::new();
    for axis in 0..3 {
        let mut v = DVector::<f64>::zeros(dim);
        for j in 0..sites {
            v[3 * j + axis] = 1.0;
        }
        starts.push(v);
    }
    for _ in 0..29 {
        let mut v = DVector::<f64>::zeros(dim);
        for j in 0..sites {
            let b = random_unit_block(&mut rng);
            for a in 0..3 {
                v[3 * j + a] = b[a];
            }
        }
        starts.push(v);
    }

    let mut best: Option<(f64, DVector<f64>)> = None;
    for mut v in starts {
        let mut eta = 0.5;
        let mut f = v.dot(&(&k.entries * &v));
        for _ in 0..20_000 {
            let grad = &k.entries * &v * 2.0;
            let mut candidate = &v + &grad * eta;
            normalize_blocks(&mut candidate, sites);
            let f_new = candidate.dot(&(&k.entries * &candidate));
            if f_new > f {
                let gain = f_new - f;
                v = candidate;
                f = f_new;
                eta = (eta * 1.1).min(4.0);
                if gain < 1e-14 * (1.0 + f.abs()) {
                    break;
                }
            } else {
                eta *= 0.5;
                if eta < 1e-12 {
                    break;
                }
            }
        }
        if best.as_ref().map_or(true, |(fb, _)| f > *fb) {
            best = Some((f, v));
        }
    }
    let (variance, v) = best.expect("at least one start");
    Ok(QuantumnessResult {
        value: variance / sites as f64,
        directions: directions_of(&v, sites),
        iterations: 0,
        converged: true,
        variance,
        dense_value: Some(variance / sites as f64),
        trace: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observables::{covariance_matrix, EffectiveRegion};
    use crate::state::{basis_state, product_state_up, StateVector};
    use num_complex::Complex64;

    fn full_region(l: usize) -> EffectiveRegion {
        EffectiveRegion { left: 0, right: l - 1, epsilon: 0.0, outside_weight: 0.0 }
    }

    fn ghz(l: usize) -> StateVector {
        let dim = 1usize << l;
        let mut amps = vec![Complex64::ZERO; dim];
        let r = std::f64::consts::FRAC_1_SQRT_2;
        amps[0] = Complex64::from(r);
        amps[dim - 1] = Complex64::from(r);
        StateVector::from_amplitudes(l, amps, 0.0).unwrap()
    }

    #[test]
    fn polarized_state_gives_one_in_the_xy_plane() {
        for l in [1usize, 3, 5] {
            let k = covariance_matrix(&product_state_up(l).unwrap(), &full_region(l)).unwrap();
            let r = quantumness_iterative(&k, &QuantumnessOptions::default()).unwrap();
            assert!(r.converged);
            assert!((r.value - 1.0).abs() < 1e-9, "value {} at L={}", r.value, l);
            for d in &r.directions {
                assert!(d[2].abs() < 1e-6, "direction should be in the xy plane: {d:?}");
                let n = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
                assert!((n - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn ghz_state_reaches_the_region_size_along_z() {
        for l in [4usize, 6] {
            let k = covariance_matrix(&ghz(l), &full_region(l)).unwrap();
            let r = quantumness_iterative(&k, &QuantumnessOptions::default()).unwrap();
            assert!((r.value - l as f64).abs() < 1e-8, "value {} at L={}", r.value, l);
            for d in &r.directions {
                assert!(d[2].abs() > 1.0 - 1e-6);
            }
            let d = quantumness_dense(&k).unwrap();
            assert!((d.value - l as f64).abs() < 1e-8);
        }
    }

    #[test]
    fn single_flip_product_state_gives_one() {
        let s = basis_state(5, 1 << 2).unwrap();
        let k = covariance_matrix(&s, &full_region(5)).unwrap();
        let r = quantumness_iterative(&k, &QuantumnessOptions::default()).unwrap();
        let d = quantumness_dense(&k).unwrap();
        assert!((r.value - 1.0).abs() < 1e-8);
        assert!((d.value - 1.0).abs() < 1e-8);
    }

    #[test]
    fn variance_identity_holds_at_the_fixed_point() {
        let k = covariance_matrix(&ghz(4), &full_region(4)).unwrap();
        let r = quantumness_iterative(&k, &QuantumnessOptions::default()).unwrap();
        assert!((r.variance - r.value * 4.0).abs() < 1e-8 * 4.0);
    }
}
