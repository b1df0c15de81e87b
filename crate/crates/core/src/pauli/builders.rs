//! Builders for every Hamiltonian family used by the protocol.
//!
//! All builders expand their densities into individually Hermitian
//! real-coefficient Pauli strings and drop strings whose coefficient is
//! exactly zero.

use serde::{Deserialize, Serialize};

use super::{Axis, Boundary, HamiltonianSpec, PauliTerm};
use crate::error::{Error, Result};

/// Couplings of the three-site transistor chain.
///
/// Every density is gated by the middle-site down projector, so `|⇑⟩` is
/// annihilated by all interaction terms and picks up only the field energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct H1Params {
    pub j: f64,
    pub gamma: f64,
    pub w: f64,
    pub delta: f64,
    pub dz: f64,
    pub hz: f64,
}

/// Couplings of the generic pairwise model, indexed by range `r >= 1`
/// (entry `0` of each list is the nearest-neighbour coupling).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct H2Params {
    pub j: Vec<f64>,
    pub gamma_x: Vec<f64>,
    pub gamma_y: Vec<f64>,
    pub gamma_z: Vec<f64>,
    pub d_x: Vec<f64>,
    pub d_y: Vec<f64>,
    pub d_z: Vec<f64>,
    pub hz: f64,
}

impl H2Params {
    fn max_range(&self) -> usize {
        [&self.j, &self.gamma_x, &self.gamma_y, &self.gamma_z, &self.d_x, &self.d_y, &self.d_z]
            .iter()
            .map(|v| v.len())
            .max()
            .unwrap_or(0)
    }

    fn at(list: &[f64], r: usize) -> f64 {
        list.get(r - 1).copied().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum H0Variant {
    Ising,
    TiltedIsing,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct H0Params {
    pub h0z: f64,
    pub h0x: f64,
}

/// Couplings of the dual tau-spin chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HTauParams {
    pub j: f64,
    pub gamma: f64,
    pub w: f64,
    pub dz: f64,
    pub hz: f64,
}

fn require_finite(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFiniteParameter { name, value })
    }
}

struct TermList {
    length: usize,
    terms: Vec<PauliTerm>,
}

impl TermList {
    fn new(length: usize) -> Self {
        Self { length, terms: Vec::new() }
    }

    fn push(&mut self, coefficient: f64, factors: &[(usize, Axis)]) -> Result<()> {
        if coefficient == 0.0 {
            return Ok(());
        }
        let wrapped: Vec<(usize, Axis)> =
            factors.iter().map(|&(s, a)| (s % self.length, a)).collect();
        self.terms.push(PauliTerm::new(coefficient, &wrapped)?);
        Ok(())
    }
}

/// Transistor-chain Hamiltonian: per-site densities
/// `(1 - sigma^z_l)/8 [J s_{l-1}.S.s_{l+1} + D^z (s_{l-1} x s_{l+1})^z]`
/// plus the longitudinal field `-(hz/2) sigma^z_l`.
pub fn build_h1(params: &H1Params, length: usize, boundary: Boundary) -> Result<HamiltonianSpec> {
    if length < 3 {
        return Err(Error::ChainTooShort { required: 3, got: length });
    }
    require_finite("j", params.j)?;
    require_finite("gamma", params.gamma)?;
    require_finite("w", params.w)?;
    require_finite("delta", params.delta)?;
    require_finite("dz", params.dz)?;
    require_finite("hz", params.hz)?;

    let cxx = params.j * (1.0 + params.gamma) / 2.0;
    let cyy = params.j * (1.0 - params.gamma) / 2.0;
    let cxy = params.j * params.w + params.dz;
    let cyx = params.j * params.w - params.dz;
    let czz = params.j * params.delta;

    let mut out = TermList::new(length);
    let cells: Vec<usize> = match boundary {
        Boundary::Open => (1..length - 1).collect(),
        Boundary::Periodic => (0..length).collect(),
    };
    for l in cells {
        let left = (l + length - 1) % length;
        let right = (l + 1) % length;
        for (c, a, b) in [
            (cxx, Axis::X, Axis::X),
            (cyy, Axis::Y, Axis::Y),
            (cxy, Axis::X, Axis::Y),
            (cyx, Axis::Y, Axis::X),
            (czz, Axis::Z, Axis::Z),
        ] {
            out.push(c / 8.0, &[(left, a), (right, b)])?;
            out.push(-c / 8.0, &[(left, a), (l, Axis::Z), (right, b)])?;
        }
    }
    for l in 0..length {
        out.push(-params.hz / 2.0, &[(l, Axis::Z)])?;
    }
    HamiltonianSpec::new(length, boundary, "h1", out.terms)
}

/// Generic pairwise model with the couplings constrained so that `|⇑⟩` is
/// an exact eigenstate. The transverse field components are derived from
/// `J_r`, `gamma_r^{x,y}` and `D_r^{x,y}`; on an open chain they become
/// site dependent near the edges where interaction partners are missing,
/// which keeps the eigenstate exact.
pub fn build_h2(params: &H2Params, length: usize, boundary: Boundary) -> Result<HamiltonianSpec> {
    if length < 2 {
        return Err(Error::ChainTooShort { required: 2, got: length });
    }
    for (name, list) in [
        ("j", &params.j),
        ("gamma_x", &params.gamma_x),
        ("gamma_y", &params.gamma_y),
        ("gamma_z", &params.gamma_z),
        ("d_x", &params.d_x),
        ("d_y", &params.d_y),
        ("d_z", &params.d_z),
    ] {
        for &v in list.iter() {
            require_finite(name, v)?;
        }
    }
    require_finite("hz", params.hz)?;
    let r_max = params.max_range();
    if r_max >= length {
        return Err(Error::RangeTooLarge { range: r_max, length });
    }

    let pair_exists = |l: usize, r: usize| match boundary {
        Boundary::Open => l + r < length,
        Boundary::Periodic => true,
    };

    let mut out = TermList::new(length);
    for r in 1..=r_max {
        let j = H2Params::at(&params.j, r);
        let gx = H2Params::at(&params.gamma_x, r);
        let gy = H2Params::at(&params.gamma_y, r);
        let gz = H2Params::at(&params.gamma_z, r);
        let dx = H2Params::at(&params.d_x, r);
        let dy = H2Params::at(&params.d_y, r);
        let dz = H2Params::at(&params.d_z, r);
        for l in 0..length {
            if !pair_exists(l, r) {
                continue;
            }
            let m = (l + r) % length;
            out.push(j / 4.0, &[(l, Axis::X), (m, Axis::X)])?;
            out.push(j / 4.0, &[(l, Axis::Y), (m, Axis::Y)])?;
            out.push(j * (1.0 + gz) / 4.0, &[(l, Axis::Z), (m, Axis::Z)])?;
            out.push(j * gx / 8.0 - dy / 4.0, &[(l, Axis::X), (m, Axis::Z)])?;
            out.push(j * gx / 8.0 + dy / 4.0, &[(l, Axis::Z), (m, Axis::X)])?;
            out.push(j * gy / 8.0 + dx / 4.0, &[(l, Axis::Y), (m, Axis::Z)])?;
            out.push(j * gy / 8.0 - dx / 4.0, &[(l, Axis::Z), (m, Axis::Y)])?;
            out.push(dz / 4.0, &[(l, Axis::X), (m, Axis::Y)])?;
            out.push(-dz / 4.0, &[(l, Axis::Y), (m, Axis::X)])?;
        }
    }
    for n in 0..length {
        let mut hx = 0.0;
        let mut hy = 0.0;
        for r in 1..=r_max {
            let has_right = pair_exists(n, r);
            let has_left = match boundary {
                Boundary::Open => n >= r,
                Boundary::Periodic => true,
            };
            let cp = if has_right { 1.0 } else { 0.0 };
            let cm = if has_left { 1.0 } else { 0.0 };
            let j = H2Params::at(&params.j, r);
            hx += j * H2Params::at(&params.gamma_x, r) * (cp + cm) / 4.0
                - H2Params::at(&params.d_y, r) * (cp - cm) / 2.0;
            hy += j * H2Params::at(&params.gamma_y, r) * (cp + cm) / 4.0
                + H2Params::at(&params.d_x, r) * (cp - cm) / 2.0;
        }
        out.push(-hx / 2.0, &[(n, Axis::X)])?;
        out.push(-hy / 2.0, &[(n, Axis::Y)])?;
        out.push(-params.hz / 2.0, &[(n, Axis::Z)])?;
    }
    HamiltonianSpec::new(length, boundary, "h2", out.terms)
}

/// Transverse-field Ising chain, with an optional longitudinal tilt that
/// breaks the spin-flip symmetry.
pub fn build_h0(variant: H0Variant, params: &H0Params, length: usize, boundary: Boundary) -> Result<HamiltonianSpec> {
    if length < 2 {
        return Err(Error::ChainTooShort { required: 2, got: length });
    }
    require_finite("h0z", params.h0z)?;
    if variant == H0Variant::TiltedIsing {
        require_finite("h0x", params.h0x)?;
    }
    let mut out = TermList::new(length);
    let bonds: Vec<usize> = match boundary {
        Boundary::Open => (0..length - 1).collect(),
        Boundary::Periodic => (0..length).collect(),
    };
    for l in bonds {
        out.push(-0.25, &[(l, Axis::X), (l + 1, Axis::X)])?;
    }
    for l in 0..length {
        out.push(-0.25 * params.h0z, &[(l, Axis::Z)])?;
        if variant == H0Variant::TiltedIsing {
            out.push(-0.25 * params.h0x, &[(l, Axis::X)])?;
        }
    }
    let label = match variant {
        H0Variant::Ising => "ising",
        H0Variant::TiltedIsing => "tilted_ising",
    };
    HamiltonianSpec::new(length, boundary, label, out.terms)
}

/// Dual tau-spin chain: an XX density dressed by `(1 ± gamma)` z-z factors,
/// chiral two-site terms weighted by `dz ± j w`, and a `-(hz/2) z z` bond.
pub fn build_h_tau(params: &HTauParams, length: usize, boundary: Boundary) -> Result<HamiltonianSpec> {
    if length < 4 {
        return Err(Error::ChainTooShort { required: 4, got: length });
    }
    require_finite("j", params.j)?;
    require_finite("gamma", params.gamma)?;
    require_finite("w", params.w)?;
    require_finite("dz", params.dz)?;
    require_finite("hz", params.hz)?;

    let c_plain = params.j * (1.0 + params.gamma) / 16.0;
    let c_dressed = params.j * (1.0 - params.gamma) / 16.0;
    let c_right = (params.dz + params.j * params.w) / 8.0;
    let c_left = (params.dz - params.j * params.w) / 8.0;

    let mut out = TermList::new(length);
    let cells: Vec<usize> = match boundary {
        Boundary::Open => (1..length.saturating_sub(2)).collect(),
        Boundary::Periodic => (0..length).collect(),
    };
    for l in cells {
        let lm = (l + length - 1) % length;
        let l1 = (l + 1) % length;
        let l2 = (l + 2) % length;
        out.push(c_plain, &[(l, Axis::X), (l1, Axis::X)])?;
        out.push(c_plain, &[(l, Axis::Y), (l1, Axis::Y)])?;
        out.push(c_dressed, &[(lm, Axis::Z), (l, Axis::X), (l1, Axis::X), (l2, Axis::Z)])?;
        out.push(c_dressed, &[(lm, Axis::Z), (l, Axis::Y), (l1, Axis::Y), (l2, Axis::Z)])?;
        out.push(c_right, &[(l, Axis::X), (l1, Axis::Y), (l2, Axis::Z)])?;
        out.push(-c_right, &[(l, Axis::Y), (l1, Axis::X), (l2, Axis::Z)])?;
        out.push(c_left, &[(lm, Axis::Z), (l, Axis::X), (l1, Axis::Y)])?;
        out.push(-c_left, &[(lm, Axis::Z), (l, Axis::Y), (l1, Axis::X)])?;
    }
    let bonds: Vec<usize> = match boundary {
        Boundary::Open => (0..length - 1).collect(),
        Boundary::Periodic => (0..length).collect(),
    };
    for l in bonds {
        out.push(-params.hz / 2.0, &[(l, Axis::Z), ((l + 1) % length, Axis::Z)])?;
    }
    HamiltonianSpec::new(length, boundary, "h_tau", out.terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{commutator_norm, sz_total, verify_scar, parity_z};

    #[test]
    fn h1_integrable_point_has_two_strings_per_cell() {
        let p = H1Params { j: 2.8, gamma: 1.0, w: 0.0, delta: 0.0, dz: 0.0, hz: 0.0 };
        let h = build_h1(&p, 8, Boundary::Open).unwrap();
        assert_eq!(h.terms().len(), 12);
        for t in h.terms() {
            assert!((t.coefficient().abs() - 2.8 / 8.0).abs() < 1e-15);
        }
    }

    #[test]
    fn h1_field_only() {
        let p = H1Params { j: 0.0, gamma: 0.0, w: 0.0, delta: 0.0, dz: 0.0, hz: 1.0 };
        let h = build_h1(&p, 4, Boundary::Open).unwrap();
        assert_eq!(h.terms().len(), 4);
        for t in h.terms() {
            assert_eq!(t.coefficient(), -0.5);
            assert_eq!(t.weight(), 1);
        }
    }

    #[test]
    fn h1_generic_point_is_a_scar_with_zero_energy() {
        let p = H1Params { j: 1.0, gamma: 0.5, w: 0.7, delta: 0.0, dz: 0.6, hz: 0.0 };
        let h = build_h1(&p, 8, Boundary::Open).unwrap();
        let e = verify_scar(&h).unwrap();
        assert!(e.abs() < 1e-14);
        assert!(h.hermiticity_defect().unwrap() < 1e-14);
    }

    #[test]
    fn h1_too_short_rejected() {
        let p = H1Params { j: 1.0, gamma: 0.0, w: 0.0, delta: 0.0, dz: 0.0, hz: 0.0 };
        assert!(build_h1(&p, 2, Boundary::Open).is_err());
    }

    #[test]
    fn h2_all_zero_is_empty() {
        let h = build_h2(&H2Params::default(), 6, Boundary::Open).unwrap();
        assert!(h.terms().is_empty());
        assert_eq!(verify_scar(&h).unwrap(), 0.0);
    }

    #[test]
    fn h2_fig5_couplings_form_a_scar() {
        let p = H2Params {
            j: vec![1.0, 1.0],
            gamma_z: vec![-0.6, -0.6],
            d_y: vec![-0.9],
            ..H2Params::default()
        };
        for boundary in [Boundary::Open, Boundary::Periodic] {
            let h = build_h2(&p, 8, boundary).unwrap();
            let e = verify_scar(&h).unwrap();
            // diagonal energy: sum over bonds of J_r (1 + gamma^z_r) / 4
            let bonds: f64 = match boundary {
                Boundary::Open => (7 + 6) as f64,
                Boundary::Periodic => 16.0,
            };
            assert!((e - bonds * 0.25 * 0.4).abs() < 1e-12);
        }
    }

    #[test]
    fn h2_scar_survives_transverse_anisotropy_on_open_chain() {
        let p = H2Params {
            j: vec![1.0, 0.4],
            gamma_x: vec![0.3, -0.2],
            gamma_y: vec![-0.5],
            gamma_z: vec![0.1],
            d_x: vec![0.2, 0.1],
            d_y: vec![-0.7],
            d_z: vec![0.25],
            hz: 0.3,
        };
        for boundary in [Boundary::Open, Boundary::Periodic] {
            let h = build_h2(&p, 9, boundary).unwrap();
            verify_scar(&h).unwrap();
            assert!(h.hermiticity_defect().unwrap() < 1e-14);
        }
    }

    #[test]
    fn h2_xxz_conserves_total_sz() {
        let p = H2Params { j: vec![1.0], gamma_z: vec![-0.6], ..H2Params::default() };
        let h = build_h2(&p, 6, Boundary::Open).unwrap();
        let norm = commutator_norm(&h, &sz_total(6)).unwrap();
        assert!(norm < 1e-12, "commutator norm {norm}");
    }

    #[test]
    fn h2_range_must_fit() {
        let p = H2Params { j: vec![0.0, 0.0, 0.0, 1.0], ..H2Params::default() };
        assert!(matches!(build_h2(&p, 4, Boundary::Open), Err(Error::RangeTooLarge { .. })));
    }

    #[test]
    fn ising_bond_count_open() {
        let h = build_h0(H0Variant::Ising, &H0Params { h0z: 0.0, h0x: 0.0 }, 4, Boundary::Open).unwrap();
        assert_eq!(h.terms().len(), 3);
        for t in h.terms() {
            assert_eq!(t.coefficient(), -0.25);
            assert_eq!(t.weight(), 2);
        }
    }

    #[test]
    fn ising_commutes_with_global_parity() {
        let h = build_h0(H0Variant::Ising, &H0Params { h0z: 2.0, h0x: 0.0 }, 4, Boundary::Open).unwrap();
        assert!(commutator_norm(&h, &parity_z(4)).unwrap() < 1e-13);
        let tilted =
            build_h0(H0Variant::TiltedIsing, &H0Params { h0z: 0.7, h0x: 0.5 }, 4, Boundary::Open).unwrap();
        assert!(commutator_norm(&tilted, &parity_z(4)).unwrap() > 0.1);
    }

    #[test]
    fn ising_is_not_a_scar() {
        let h = build_h0(H0Variant::Ising, &H0Params { h0z: 1.0, h0x: 0.0 }, 6, Boundary::Open).unwrap();
        assert!(matches!(verify_scar(&h), Err(Error::ResidualTooLarge { .. })));
    }

    #[test]
    fn h_tau_field_only_is_ising_zz() {
        let p = HTauParams { j: 0.0, gamma: 0.3, w: 0.9, dz: 0.0, hz: 1.0 };
        let h = build_h_tau(&p, 6, Boundary::Periodic).unwrap();
        assert_eq!(h.terms().len(), 6);
        for t in h.terms() {
            assert_eq!(t.coefficient(), -0.5);
            assert_eq!(t.weight(), 2);
        }
    }

    #[test]
    fn h_tau_hermitian_at_l8() {
        let p = HTauParams { j: 1.0, gamma: 1.0, w: 0.0, dz: 0.0, hz: 0.3 };
        let h = build_h_tau(&p, 8, Boundary::Periodic).unwrap();
        assert!(h.hermiticity_defect().unwrap() < 1e-14);
        let generic = HTauParams { j: 1.0, gamma: 0.5, w: 0.7, dz: 0.6, hz: 0.0 };
        let h = build_h_tau(&generic, 8, Boundary::Periodic).unwrap();
        assert!(h.hermiticity_defect().unwrap() < 1e-14);
    }
}
