//! Spectrum equivalence between the transistor chain and its dual
//! tau-spin model.
//!
//! On a periodic chain the zero string-charge sector of the transistor
//! Hamiltonian, further resolved by zero momentum and the two `sigma^z`
//! parities, carries the same spectrum as the zero-momentum,
//! zero-magnetization, positive flip-parity sector of the dual chain. The
//! `sigma^z`-parity values are fixed by the chain length: at `L % 4 == 2`
//! half filling forces the global `tau^z` parity to `-1`, and the
//! sublattice parity on the direct side follows it.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pauli::{build_h1, build_h_tau, Boundary, H1Params, HTauParams};

use super::{sector_spectrum, SectorSpec};

#[derive(Debug, Clone, Serialize)]
pub struct DualityReport {
    pub matches: bool,
    /// Largest eigenvalue deviation; absent when the dimensions differ.
    pub max_deviation: Option<f64>,
    pub dimension_direct: usize,
    pub dimension_dual: usize,
    /// The length-dependent parity value used on both sides.
    pub parity_value: i8,
    pub eigenvalues: Vec<f64>,
}

/// Diagonalizes both sides in the dual sector pair and compares the sorted
/// spectra. A dimension mismatch is reported, never silently truncated.
pub fn duality_spectrum_check(params: &HTauParams, length: usize) -> Result<DualityReport> {
    if length % 2 != 0 {
        return Err(Error::InvalidSector("duality check needs an even length".into()));
    }
    if !(4..=14).contains(&length) {
        return Err(Error::LengthCap { length, cap: 14 });
    }
    let parity_value: i8 = if length % 4 == 0 { 1 } else { -1 };

    let h1 = build_h1(
        &H1Params {
            j: params.j,
            gamma: params.gamma,
            w: params.w,
            delta: 0.0,
            dz: params.dz,
            hz: params.hz,
        },
        length,
        Boundary::Periodic,
    )?;
    let sigma_sector = SectorSpec {
        momentum: Some(0),
        parity_z: Some(1),
        parity_z_even: Some(parity_value),
        semilocal_zero: true,
        ..SectorSpec::new(length)
    };
    let direct = sector_spectrum(&h1, &sigma_sector)?;

    let h_tau = build_h_tau(params, length, Boundary::Periodic)?;
    let tau_sector = SectorSpec {
        magnetization: Some(0),
        momentum: Some(0),
        parity_x: Some(1),
        parity_z: Some(parity_value),
        ..SectorSpec::new(length)
    };
    let dual = sector_spectrum(&h_tau, &tau_sector)?;

    let (matches, max_deviation) = if direct.dimension == dual.dimension {
        let dev = direct
            .eigenvalues
            .iter()
            .zip(&dual.eigenvalues)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        (dev <= 1e-9, Some(dev))
    } else {
        (false, None)
    };
    Ok(DualityReport {
        matches,
        max_deviation,
        dimension_direct: direct.dimension,
        dimension_dual: dual.dimension,
        parity_value,
        eigenvalues: dual.eigenvalues,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dual_xx_point_spectra_match() {
        let p = HTauParams { j: 1.0, gamma: 1.0, w: 0.0, dz: 0.0, hz: 0.3 };
        let r = duality_spectrum_check(&p, 8).unwrap();
        assert_eq!(r.dimension_direct, r.dimension_dual);
        assert!(r.matches, "max deviation {:?}", r.max_deviation);
    }

    #[test]
    fn field_only_point_is_diagonal_on_both_sides() {
        let p = HTauParams { j: 0.0, gamma: 0.7, w: 0.4, dz: 0.0, hz: 1.0 };
        let r = duality_spectrum_check(&p, 8).unwrap();
        assert!(r.matches, "max deviation {:?}", r.max_deviation);
    }

    #[test]
    fn generic_point_spectra_match_at_l10() {
        let p = HTauParams { j: 1.0, gamma: 0.5, w: 0.7, dz: 0.6, hz: 0.0 };
        let r = duality_spectrum_check(&p, 10).unwrap();
        assert_eq!(r.parity_value, -1);
        assert!(r.dimension_direct > 0);
        assert!(r.matches, "dims {}/{} max deviation {:?}", r.dimension_direct, r.dimension_dual, r.max_deviation);
    }

    #[test]
    fn odd_length_rejected() {
        let p = HTauParams { j: 1.0, gamma: 0.5, w: 0.7, dz: 0.6, hz: 0.0 };
        assert!(duality_spectrum_check(&p, 7).is_err());
    }
}
