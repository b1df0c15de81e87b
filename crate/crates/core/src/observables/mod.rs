//! Diagnostics of the measurement protocol: magnetization profiles, the
//! effective region grown by the perturbation, full counting statistics,
//! spin covariance matrices and the quantumness lower bound.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::state::StateVector;

mod covariance;
mod quantumness;

pub use covariance::{covariance_matrix, pauli_string_expectation, CovarianceMatrix};
pub use quantumness::{quantumness_dense, quantumness_iterative, QuantumnessOptions, QuantumnessResult};

/// Per-site `<sigma^z>` at a fixed time.
#[derive(Debug, Clone, Serialize)]
pub struct MagnetizationProfile {
    pub values: Vec<f64>,
    pub time: f64,
    pub theta: f64,
}

pub fn magnetization_profile(state: &StateVector, theta: f64) -> MagnetizationProfile {
    let values = (0..state.length())
        .map(|site| state.sz_site(site).expect("site in range"))
        .collect();
    MagnetizationProfile { values, time: state.time(), theta }
}

/// Magnetization deficit `L/2 - <S^z>` relative to the polarized state.
pub fn delta_sz(state: &StateVector) -> f64 {
    state.length() as f64 / 2.0 - state.sz_expectation()
}

/// Smallest contiguous block around the measurement site outside of which
/// the state is all-up within weight `epsilon`.
///
/// The outside-down weight of a block `B` is
/// `w_out(B) = 1 - sum_{n with no down spin outside B} |psi_n|^2`,
/// a proxy for the deviation of the complement from the all-up state that
/// is computable without forming reduced density matrices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EffectiveRegion {
    pub left: usize,
    pub right: usize,
    pub epsilon: f64,
    pub outside_weight: f64,
}

impl EffectiveRegion {
    pub fn size(&self) -> usize {
        self.right - self.left + 1
    }

    pub fn contains(&self, site: usize) -> bool {
        self.left <= site && site <= self.right
    }
}

fn outside_weight(state: &StateVector, left: usize, right: usize) -> f64 {
    let mask: usize = if right - left + 1 >= state.length() {
        state.dimension() - 1
    } else {
        ((1usize << (right - left + 1)) - 1) << left
    };
    // sum over submasks of `mask` (basis states that are all-up outside)
    let mut inside = 0.0;
    let mut sub = mask;
    loop {
        inside += state.amplitude(sub).norm_sqr();
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & mask;
    }
    (1.0 - inside).max(0.0)
}

/// Effective region grown from the single measurement site.
pub fn effective_region(state: &StateVector, site: usize, epsilon: f64) -> Result<EffectiveRegion> {
    effective_region_spanning(state, site, site, epsilon)
}

/// Effective region containing the whole seed block `[seed_left, seed_right]`.
///
/// Greedy growth: the edge whose one-site extension lowers the outside-down
/// weight more is extended first; exact ties extend both edges. A final
/// shrink pass enforces one-site minimality.
pub fn effective_region_spanning(
    state: &StateVector,
    seed_left: usize,
    seed_right: usize,
    epsilon: f64,
) -> Result<EffectiveRegion> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    let length = state.length();
    if seed_right >= length || seed_left > seed_right {
        return Err(Error::SiteOutOfRange { site: seed_right, length });
    }
    let (mut left, mut right) = (seed_left, seed_right);
    let mut w = outside_weight(state, left, right);
    while w > epsilon {
        let can_left = left > 0;
        let can_right = right + 1 < length;
        assert!(can_left || can_right, "outside weight {w} above epsilon on the full chain");
        let w_left = if can_left { outside_weight(state, left - 1, right) } else { f64::INFINITY };
        let w_right = if can_right { outside_weight(state, left, right + 1) } else { f64::INFINITY };
        if w_left < w_right {
            left -= 1;
            w = w_left;
        } else if w_right < w_left {
            right += 1;
            w = w_right;
        } else {
            if can_left {
                left -= 1;
            }
            if can_right {
                right += 1;
            }
            w = outside_weight(state, left, right);
        }
    }
    // shrink pass: drop edge sites that are not needed to stay under epsilon
    loop {
        if left < seed_left {
            let w_try = outside_weight(state, left + 1, right);
            if w_try <= epsilon {
                left += 1;
                w = w_try;
                continue;
            }
        }
        if right > seed_right {
            let w_try = outside_weight(state, left, right - 1);
            if w_try <= epsilon {
                right -= 1;
                w = w_try;
                continue;
            }
        }
        break;
    }
    Ok(EffectiveRegion { left, right, epsilon, outside_weight: w })
}

/// Full counting statistics of the total magnetization.
///
/// `G(k) = <exp(i 2πk/(L+1) S^z)>` on a grid of `L+1` consecutive integer
/// `k`, and `P(m)` its exact finite Fourier transform over the `L+1`
/// magnetization outcomes. `S^z` is diagonal in the computational basis
/// (`m(index) = L/2 - popcount`), so `G` reduces to a phase sum over the
/// magnetization histogram.
#[derive(Debug, Clone, Serialize)]
pub struct FcsDistribution {
    pub length: usize,
    pub theta: f64,
    /// `k` grid, `-floor(L/2) ..= L - floor(L/2)`.
    pub ks: Vec<i64>,
    pub g: Vec<Complex64>,
    /// Magnetization outcomes `m = L/2 - #down`, ascending.
    pub ms: Vec<f64>,
    pub p: Vec<f64>,
    /// Set when `L` is not divisible by 4, outside the labeling convention
    /// in which the maximal magnetization is an even integer.
    pub nonstandard_length: bool,
}

impl FcsDistribution {
    /// Probability of the integer outcome `m` (even-length chains).
    pub fn probability(&self, m: i64) -> f64 {
        let idx = (m as f64 + self.length as f64 / 2.0).round() as usize;
        self.p[idx]
    }
}

pub fn fcs(state: &StateVector, theta: f64) -> FcsDistribution {
    let length = state.length();
    let hist = state.magnetization_histogram();
    let half_l = length as f64 / 2.0;
    let points = length + 1;
    let k0 = -((length / 2) as i64);
    let ks: Vec<i64> = (0..points as i64).map(|i| k0 + i).collect();
    let phi = 2.0 * std::f64::consts::PI / points as f64;

    let g: Vec<Complex64> = ks
        .iter()
        .map(|&k| {
            let mut acc = Complex64::ZERO;
            for (down, &weight) in hist.iter().enumerate() {
                let m = half_l - down as f64;
                acc += weight * Complex64::new(0.0, phi * k as f64 * m).exp();
            }
            acc
        })
        .collect();

    let ms: Vec<f64> = (0..points).map(|i| half_l - (length - i) as f64).collect();
    let p: Vec<f64> = ms
        .iter()
        .map(|&m| {
            let mut acc = Complex64::ZERO;
            for (&k, &gk) in ks.iter().zip(&g) {
                acc += Complex64::new(0.0, -phi * k as f64 * m).exp() * gk;
            }
            acc.re / points as f64
        })
        .collect();

    FcsDistribution { length, theta, ks, g, ms, p, nonstandard_length: length % 4 != 0 }
}

/// Variance of the total magnetization, computed directly from the
/// histogram, independent of the counting-statistics pipeline.
pub fn sz_variance(state: &StateVector) -> f64 {
    let hist = state.magnetization_histogram();
    let half_l = state.length() as f64 / 2.0;
    let mean: f64 = hist.iter().enumerate().map(|(c, w)| w * (half_l - c as f64)).sum();
    hist.iter()
        .enumerate()
        .map(|(c, w)| w * (half_l - c as f64 - mean).powi(2))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{apply_y_rotation, basis_state, product_state_up};

    #[test]
    fn profile_of_polarized_and_flipped_states() {
        let up = product_state_up(6).unwrap();
        assert!(magnetization_profile(&up, 0.0).values.iter().all(|&v| (v - 1.0).abs() < 1e-14));
        let flipped = basis_state(6, 1 << 3).unwrap();
        let prof = magnetization_profile(&flipped, std::f64::consts::FRAC_PI_2);
        for (site, &v) in prof.values.iter().enumerate() {
            let expect = if site == 3 { -1.0 } else { 1.0 };
            assert!((v - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn delta_sz_examples() {
        let up = product_state_up(6).unwrap();
        assert!(delta_sz(&up).abs() < 1e-14);
        let theta = 0.9;
        let tilted = apply_y_rotation(&up, 2, theta).unwrap();
        assert!((delta_sz(&tilted) - theta.sin().powi(2)).abs() < 1e-13);
    }

    #[test]
    fn region_of_a_product_state_is_a_single_site() {
        let up = product_state_up(8).unwrap();
        let r = effective_region(&up, 4, 1e-3).unwrap();
        assert_eq!((r.left, r.right), (4, 4));
        assert_eq!(r.outside_weight, 0.0);

        let flipped = basis_state(8, 1 << 5).unwrap();
        let r = effective_region(&flipped, 5, 1e-3).unwrap();
        assert_eq!((r.left, r.right), (5, 5));
        assert_eq!(r.outside_weight, 0.0);
    }

    #[test]
    fn epsilon_must_be_a_probability() {
        let up = product_state_up(4).unwrap();
        assert!(effective_region(&up, 2, 0.0).is_err());
        assert!(effective_region(&up, 2, 1.0).is_err());
    }

    #[test]
    fn region_grows_around_local_superposition() {
        let mut s = product_state_up(8).unwrap();
        s = apply_y_rotation(&s, 4, 0.7).unwrap();
        s = apply_y_rotation(&s, 3, 0.4).unwrap();
        s = apply_y_rotation(&s, 5, 0.4).unwrap();
        let r = effective_region(&s, 4, 1e-6).unwrap();
        assert!(r.contains(3) && r.contains(5));
        assert!(r.outside_weight <= 1e-6);
        if r.left < 4 {
            assert!(outside_weight(&s, r.left + 1, r.right) > 1e-6);
        }
        if r.right > 4 {
            assert!(outside_weight(&s, r.left, r.right - 1) > 1e-6);
        }
    }

    #[test]
    fn fcs_of_polarized_state_is_a_delta() {
        let up = product_state_up(8).unwrap();
        let f = fcs(&up, 0.0);
        assert!(!f.nonstandard_length);
        assert!((f.g[0].norm() - 1.0).abs() < 1e-12);
        assert!((f.probability(4) - 1.0).abs() < 1e-12);
        let total: f64 = f.p.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        for &p in &f.p {
            assert!(p >= -1e-12);
        }
    }

    #[test]
    fn fcs_moments_match_direct_computation() {
        let mut s = product_state_up(8).unwrap();
        for (site, th) in [(4usize, 0.9), (3usize, 0.3), (6usize, 1.3)] {
            s = apply_y_rotation(&s, site, th).unwrap();
        }
        let f = fcs(&s, 0.0);
        let mean: f64 = f.ms.iter().zip(&f.p).map(|(m, p)| m * p).sum();
        let second: f64 = f.ms.iter().zip(&f.p).map(|(m, p)| m * m * p).sum();
        assert!((mean - s.sz_expectation()).abs() < 1e-10);
        assert!((second - mean * mean - sz_variance(&s)).abs() < 1e-9);
    }

    #[test]
    fn fcs_generic_theta_keeps_cos2_on_top() {
        let theta = 0.77;
        let s = apply_y_rotation(&product_state_up(8).unwrap(), 4, theta).unwrap();
        let f = fcs(&s, theta);
        assert!((f.probability(4) - theta.cos().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn odd_chain_is_flagged_but_consistent() {
        let s = apply_y_rotation(&product_state_up(5).unwrap(), 2, 0.4).unwrap();
        let f = fcs(&s, 0.4);
        assert!(f.nonstandard_length);
        let total: f64 = f.p.iter().sum();
        assert!((total - 1.0).abs() < 1e-10);
        let mean: f64 = f.ms.iter().zip(&f.p).map(|(m, p)| m * p).sum();
        assert!((mean - s.sz_expectation()).abs() < 1e-10);
    }
}
