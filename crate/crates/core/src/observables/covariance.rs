//! Spin covariance matrix on a region:
//! `K[(n,a),(m,b)] = (1/2)<{sigma_n^a, sigma_m^b}> - <sigma_n^a><sigma_m^b>`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::par;
use crate::pauli::{algebra, Axis, PauliFactor};
use crate::state::StateVector;

use super::EffectiveRegion;

const AXES: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

/// Real symmetric covariance matrix of the single-site Pauli operators on
/// a region, indexed as `3 * (site - left) + axis`.
#[derive(Debug, Clone)]
pub struct CovarianceMatrix {
    pub region: EffectiveRegion,
    pub entries: DMatrix<f64>,
}

impl CovarianceMatrix {
    pub fn sites(&self) -> usize {
        self.region.size()
    }
}

/// `<psi| sigma-string |psi>` for a canonical Pauli string (one factor per
/// site). Products with repeated sites must be reduced through
/// `algebra::mul_factors` first.
pub fn pauli_string_expectation(state: &StateVector, factors: &[PauliFactor]) -> Result<Complex64> {
    let mut flip = 0u64;
    let mut phase_mask = 0u64;
    let mut ny = 0u32;
    for f in factors {
        if f.site >= state.length() {
            return Err(Error::SiteOutOfRange { site: f.site, length: state.length() });
        }
        let bit = 1u64 << f.site;
        match f.axis {
            Axis::X => flip |= bit,
            Axis::Y => {
                flip |= bit;
                phase_mask |= bit;
                ny += 1;
            }
            Axis::Z => phase_mask |= bit,
        }
    }
    let scalar = match ny % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    };
    let amps = state.amplitudes();
    let value = par::sum_c64(amps.len(), |n| {
        let sign = if ((n as u64 & phase_mask).count_ones() & 1) == 1 { -1.0 } else { 1.0 };
        amps[n ^ flip as usize].conj() * scalar * sign * amps[n]
    });
    Ok(value)
}

/// Covariance matrix of the single-site Paulis on `region`.
pub fn covariance_matrix(state: &StateVector, region: &EffectiveRegion) -> Result<CovarianceMatrix> {
    if region.right >= state.length() || region.left > region.right {
        return Err(Error::EmptyRegion);
    }
    let sites = region.size();
    let dim = 3 * sites;

    // first moments
    let mut means = vec![0.0; dim];
    for u in 0..sites {
        for (a, &axis) in AXES.iter().enumerate() {
            let f = [PauliFactor { site: region.left + u, axis }];
            means[3 * u + a] = pauli_string_expectation(state, &f)?.re;
        }
    }

    let mut entries = DMatrix::<f64>::zeros(dim, dim);
    for row in 0..dim {
        let (u, a) = (row / 3, row % 3);
        for col in row..dim {
            let (v, b) = (col / 3, col % 3);
            let factors = [
                PauliFactor { site: region.left + u, axis: AXES[a] },
                PauliFactor { site: region.left + v, axis: AXES[b] },
            ];
            let (phase, product) = algebra::mul_factors(&factors[..1], &factors[1..]);
            let raw = phase * pauli_string_expectation(state, &product)?;
            let value = raw.re - means[row] * means[col];
            entries[(row, col)] = value;
            entries[(col, row)] = value;
        }
    }
    Ok(CovarianceMatrix { region: *region, entries })
}
