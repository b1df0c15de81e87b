//! Symmetry-sector construction and dense sector spectra.
//!
//! Sectors are built from diagonal filters (magnetization, `sigma^z`
//! parities, zero string charge), translation orbits for a momentum
//! quantum number, and a numerical projection for the off-diagonal
//! flip-all parity. Sector matrices are verified not to leak out of the
//! requested subspace.

use std::collections::{HashMap, HashSet};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::pauli::HamiltonianSpec;

mod duality;
mod stats;

pub use duality::{duality_spectrum_check, DualityReport};
pub use stats::{gap_ratios, spacing_stats, spacing_stats_pooled, unfold, SpacingStats, UnfoldedSpacings};

/// Quantum numbers selecting a symmetry sector. All filters are optional;
/// requested symmetries must actually commute with the Hamiltonian, which
/// [`sector_matrix`] verifies by a leakage check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SectorSpec {
    pub length: usize,
    /// Total magnetization `m = L/2 - #down` (integer, even lengths).
    pub magnetization: Option<i64>,
    /// Momentum index `k` in `[0, L)` under one-site translation.
    pub momentum: Option<usize>,
    /// Global `prod sigma^z` parity.
    pub parity_z: Option<i8>,
    /// `prod sigma^z` over the even (0-based) sublattice.
    pub parity_z_even: Option<i8>,
    /// Flip-all parity `prod sigma^x`.
    pub parity_x: Option<i8>,
    /// Restrict to the zero eigenspace of the summed string charge.
    pub semilocal_zero: bool,
}

impl SectorSpec {
    pub fn new(length: usize) -> Self {
        Self {
            length,
            magnetization: None,
            momentum: None,
            parity_z: None,
            parity_z_even: None,
            parity_x: None,
            semilocal_zero: false,
        }
    }
}

/// Orthonormal sector basis as sparse combinations of computational states.
#[derive(Debug, Clone)]
pub struct SectorBasis {
    pub spec: SectorSpec,
    pub states: Vec<Vec<(u64, Complex64)>>,
}

impl SectorBasis {
    pub fn dimension(&self) -> usize {
        self.states.len()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SectorSpectrum {
    pub spec: SectorSpec,
    pub eigenvalues: Vec<f64>,
    pub dimension: usize,
}

#[inline]
fn translate(n: u64, length: usize) -> u64 {
    let mask = (1u64 << length) - 1;
    ((n << 1) | (n >> (length - 1))) & mask
}

#[inline]
fn flip_all(n: u64, length: usize) -> u64 {
    !n & ((1u64 << length) - 1)
}

/// Integer string-charge sum `2 * S̃^z` eigenvalue... the sum of prefix
/// `sigma^z` products, without the 1/2 prefactor.
fn string_charge_sum(n: u64, length: usize) -> i64 {
    let mut sum = 0i64;
    let mut prefix = 1i64;
    for j in 0..length {
        sum += prefix;
        if (n >> j) & 1 == 1 {
            prefix = -prefix;
        }
    }
    sum
}

fn passes_diagonal_filters(n: u64, spec: &SectorSpec) -> bool {
    let length = spec.length;
    if let Some(m) = spec.magnetization {
        let down = n.count_ones() as i64;
        if 2 * down != length as i64 - 2 * m {
            return false;
        }
    }
    if let Some(p) = spec.parity_z {
        let sign = if n.count_ones() % 2 == 0 { 1 } else { -1 };
        if sign != p as i64 {
            return false;
        }
    }
    if let Some(p) = spec.parity_z_even {
        let even_mask = {
            let mut m = 0u64;
            let mut j = 0;
            while j < length {
                m |= 1 << j;
                j += 2;
            }
            m
        };
        let sign = if (n & even_mask).count_ones() % 2 == 0 { 1 } else { -1 };
        if sign != p as i64 {
            return false;
        }
    }
    if spec.semilocal_zero && string_charge_sum(n, length) != 0 {
        return false;
    }
    true
}

/// Builds the orthonormal basis of the requested sector. An empty sector
/// is valid and yields dimension 0.
pub fn build_sector_basis(spec: &SectorSpec) -> Result<SectorBasis> {
    let length = spec.length;
    if length == 0 || length > 24 {
        return Err(Error::LengthCap { length, cap: 24 });
    }
    if let Some(m) = spec.magnetization {
        if (length as i64 - 2 * m) % 2 != 0 || !(0..=length as i64).contains(&(length as i64 / 2 - m)) {
            return Err(Error::InvalidSector(format!("magnetization {m} unreachable at L={length}")));
        }
    }
    if let Some(k) = spec.momentum {
        if k >= length {
            return Err(Error::InvalidSector(format!("momentum {k} out of range")));
        }
    }
    for p in [spec.parity_z, spec.parity_z_even, spec.parity_x] {
        if let Some(v) = p {
            if v != 1 && v != -1 {
                return Err(Error::InvalidSector(format!("parity value {v} must be ±1")));
            }
        }
    }

    let dim = 1u64 << length;
    let filtered: Vec<u64> = (0..dim).filter(|&n| passes_diagonal_filters(n, spec)).collect();

    let mut states: Vec<Vec<(u64, Complex64)>> = Vec::new();
    match spec.momentum {
        None => {
            for &n in &filtered {
                states.push(vec![(n, Complex64::ONE)]);
            }
        }
        Some(k) => {
            let in_set: HashSet<u64> = filtered.iter().copied().collect();
            let mut visited: HashSet<u64> = HashSet::with_capacity(filtered.len());
            for &rep in &filtered {
                if visited.contains(&rep) {
                    continue;
                }
                // walk the orbit; ascending iteration makes `rep` its minimum
                let mut orbit = vec![rep];
                let mut cur = translate(rep, length);
                while cur != rep {
                    if !in_set.contains(&cur) {
                        return Err(Error::InvalidSector(
                            "diagonal filters are not translation invariant".into(),
                        ));
                    }
                    orbit.push(cur);
                    cur = translate(cur, length);
                }
                for &s in &orbit {
                    visited.insert(s);
                }
                let period = orbit.len();
                if (k * period) % length != 0 {
                    continue;
                }
                let norm = 1.0 / (period as f64).sqrt();
                let phi = 2.0 * std::f64::consts::PI * k as f64 / length as f64;
                let state: Vec<(u64, Complex64)> = orbit
                    .iter()
                    .enumerate()
                    .map(|(s, &n)| (n, Complex64::new(0.0, phi * s as f64).exp() * norm))
                    .collect();
                states.push(state);
            }
        }
    }

    if let Some(px) = spec.parity_x {
        states = project_parity_x(states, length, px)?;
    }

    let mut basis = SectorBasis { spec: *spec, states };
    for state in &mut basis.states {
        state.sort_by_key(|&(n, _)| n);
    }
    Ok(basis)
}

/// Project a basis onto the ±1 eigenspace of the flip-all parity and
/// re-orthonormalize. The parity must map the spanned space to itself.
fn project_parity_x(
    states: Vec<Vec<(u64, Complex64)>>,
    length: usize,
    sign: i8,
) -> Result<Vec<Vec<(u64, Complex64)>>> {
    let dim = states.len();
    if dim == 0 {
        return Ok(states);
    }
    let inverted = invert_index(&states);
    // matrix of the parity in the current basis
    let mut parity = DMatrix::<Complex64>::zeros(dim, dim);
    for (i, state) in states.iter().enumerate() {
        let mut leak = 0.0;
        for &(n, a) in state {
            let m = flip_all(n, length);
            match inverted.get(&m) {
                Some(rows) => {
                    for &(j, c) in rows {
                        parity[(j, i)] += c.conj() * a;
                    }
                }
                None => leak += a.norm_sqr(),
            }
        }
        if leak > 1e-20 {
            return Err(Error::InvalidSector(
                "flip-all parity leaves the filtered space; add the matching filters".into(),
            ));
        }
    }
    // P = (1 + sign * parity) / 2, then modified Gram-Schmidt on its columns
    let half = Complex64::from(0.5);
    let s = Complex64::from(sign as f64);
    let mut columns: Vec<Vec<Complex64>> = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| {
                    let id = if i == j { Complex64::ONE } else { Complex64::ZERO };
                    half * (id + s * parity[(j, i)])
                })
                .collect()
        })
        .collect();
    let mut kept: Vec<Vec<Complex64>> = Vec::new();
    for col in columns.drain(..) {
        let mut v = col;
        for basis_vec in &kept {
            let overlap: Complex64 =
                basis_vec.iter().zip(&v).map(|(b, x)| b.conj() * x).sum();
            for (x, b) in v.iter_mut().zip(basis_vec) {
                *x -= overlap * b;
            }
        }
        let norm: f64 = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            for x in &mut v {
                *x /= Complex64::from(norm);
            }
            kept.push(v);
        }
    }
    // expand back to computational states
    let mut projected: Vec<Vec<(u64, Complex64)>> = Vec::with_capacity(kept.len());
    for coeffs in kept {
        let mut acc: HashMap<u64, Complex64> = HashMap::new();
        for (i, c) in coeffs.iter().enumerate() {
            if c.norm_sqr() < 1e-28 {
                continue;
            }
            for &(n, a) in &states[i] {
                *acc.entry(n).or_insert(Complex64::ZERO) += c * a;
            }
        }
        let mut state: Vec<(u64, Complex64)> =
            acc.into_iter().filter(|(_, a)| a.norm_sqr() > 1e-28).collect();
        state.sort_by_key(|&(n, _)| n);
        projected.push(state);
    }
    Ok(projected)
}

fn invert_index(states: &[Vec<(u64, Complex64)>]) -> HashMap<u64, Vec<(usize, Complex64)>> {
    let mut inverted: HashMap<u64, Vec<(usize, Complex64)>> = HashMap::new();
    for (j, state) in states.iter().enumerate() {
        for &(n, c) in state {
            inverted.entry(n).or_default().push((j, c));
        }
    }
    inverted
}

/// Dense Hermitian matrix of `h` in the sector basis. Errors if the
/// operator leaks out of the sector.
pub fn sector_matrix(h: &HamiltonianSpec, basis: &SectorBasis) -> Result<DMatrix<Complex64>> {
    if h.length() != basis.spec.length {
        return Err(Error::DimensionMismatch { expected: basis.spec.length, got: h.length() });
    }
    let dim = basis.dimension();
    let mut matrix = DMatrix::<Complex64>::zeros(dim, dim);
    if dim == 0 {
        return Ok(matrix);
    }
    let op = h.compile();
    let inverted = invert_index(&basis.states);
    for (i, state) in basis.states.iter().enumerate() {
        let input: HashMap<u64, Complex64> = state.iter().copied().collect();
        let image = op.apply_map(&input);
        let mut norm_sq = 0.0;
        for (&n, &a) in &image {
            norm_sq += a.norm_sqr();
            if let Some(rows) = inverted.get(&n) {
                for &(j, c) in rows {
                    matrix[(j, i)] += c.conj() * a;
                }
            }
        }
        // residual of the image after removing its in-sector part
        let mut residual = image;
        for j in 0..dim {
            let coeff = matrix[(j, i)];
            if coeff.norm_sqr() == 0.0 {
                continue;
            }
            for &(n, c) in &basis.states[j] {
                *residual.entry(n).or_insert(Complex64::ZERO) -= coeff * c;
            }
        }
        let leakage: f64 = residual.values().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if leakage > 1e-10 * norm_sq.sqrt().max(1.0) {
            return Err(Error::SectorLeakage { leakage });
        }
    }
    // clean roundoff asymmetry
    let adjoint = matrix.adjoint();
    Ok((matrix + adjoint) * Complex64::from(0.5))
}

/// Eigenvalues of `h` restricted to a sector, sorted ascending.
pub fn sector_spectrum(h: &HamiltonianSpec, spec: &SectorSpec) -> Result<SectorSpectrum> {
    let basis = build_sector_basis(spec)?;
    let matrix = sector_matrix(h, &basis)?;
    let eigenvalues = linalg::hermitian_eigenvalues(&matrix);
    Ok(SectorSpectrum { spec: *spec, dimension: basis.dimension(), eigenvalues })
}

/// All `(momentum, flip-parity)` blocks of the zero-magnetization sector,
/// the natural pool for level statistics of the tau-spin model. Momenta
/// above `L/2` duplicate conjugate spectra and are skipped.
pub fn zero_magnetization_blocks(h: &HamiltonianSpec, length: usize) -> Result<Vec<SectorSpectrum>> {
    if length % 2 != 0 {
        return Err(Error::InvalidSector("zero magnetization needs an even length".into()));
    }
    let mut blocks = Vec::new();
    for k in 0..=length / 2 {
        for px in [1i8, -1] {
            let spec = SectorSpec {
                magnetization: Some(0),
                momentum: Some(k),
                parity_x: Some(px),
                ..SectorSpec::new(length)
            };
            let spectrum = sector_spectrum(h, &spec)?;
            if spectrum.dimension > 0 {
                blocks.push(spectrum);
            }
        }
    }
    Ok(blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{build_h_tau, Axis, Boundary, HTauParams, PauliTerm};

    #[test]
    fn momentum_zero_half_filling_dimension_at_l4() {
        // two down spins on four sites: orbits {0011} (size 4) and {0101}
        // (size 2) contribute one k=0 state each
        let spec = SectorSpec {
            magnetization: Some(0),
            momentum: Some(0),
            ..SectorSpec::new(4)
        };
        let basis = build_sector_basis(&spec).unwrap();
        assert_eq!(basis.dimension(), 2);
        for state in &basis.states {
            let norm: f64 = state.iter().map(|(_, a)| a.norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn all_up_sector_is_one_dimensional() {
        let spec = SectorSpec {
            magnetization: Some(2),
            momentum: Some(0),
            ..SectorSpec::new(4)
        };
        let basis = build_sector_basis(&spec).unwrap();
        assert_eq!(basis.dimension(), 1);
    }

    #[test]
    fn momentum_magnetization_sectors_are_complete() {
        let l = 6;
        let mut total = 0;
        for m in -3..=3i64 {
            for k in 0..l {
                let spec = SectorSpec {
                    magnetization: Some(m),
                    momentum: Some(k),
                    ..SectorSpec::new(l)
                };
                total += build_sector_basis(&spec).unwrap().dimension();
            }
        }
        assert_eq!(total, 1 << l);
    }

    #[test]
    fn zero_hamiltonian_gives_zero_matrix() {
        let h = HamiltonianSpec::new(4, Boundary::Periodic, "zero", vec![]).unwrap();
        let spec = SectorSpec { magnetization: Some(0), momentum: Some(0), ..SectorSpec::new(4) };
        let basis = build_sector_basis(&spec).unwrap();
        let m = sector_matrix(&h, &basis).unwrap();
        assert!(m.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn diagonal_hamiltonian_is_diagonal_in_any_magnetization_basis() {
        let terms = (0..4)
            .map(|l| PauliTerm::new(0.7, &[(l, Axis::Z), ((l + 1) % 4, Axis::Z)]).unwrap())
            .collect();
        let h = HamiltonianSpec::new(4, Boundary::Periodic, "zz", terms).unwrap();
        let spec = SectorSpec { magnetization: Some(0), momentum: Some(0), ..SectorSpec::new(4) };
        let basis = build_sector_basis(&spec).unwrap();
        let m = sector_matrix(&h, &basis).unwrap();
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                if i != j {
                    assert!(m[(i, j)].norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn tau_chain_sector_block_is_hermitian_with_real_spectrum() {
        let p = HTauParams { j: 1.0, gamma: 0.5, w: 0.7, dz: 0.6, hz: 0.0 };
        let h = build_h_tau(&p, 8, Boundary::Periodic).unwrap();
        let spec = SectorSpec {
            magnetization: Some(0),
            momentum: Some(0),
            parity_x: Some(1),
            ..SectorSpec::new(8)
        };
        let basis = build_sector_basis(&spec).unwrap();
        assert!(basis.dimension() > 0);
        // orthonormality
        for (i, a) in basis.states.iter().enumerate() {
            for (j, b) in basis.states.iter().enumerate() {
                let mut overlap = Complex64::ZERO;
                let bm: HashMap<u64, Complex64> = b.iter().copied().collect();
                for &(n, c) in a {
                    if let Some(&d) = bm.get(&n) {
                        overlap += c.conj() * d;
                    }
                }
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((overlap - Complex64::from(expect)).norm() < 1e-12);
            }
        }
        let m = sector_matrix(&h, &basis).unwrap();
        assert!((&m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-12);
        let spectrum = sector_spectrum(&h, &spec).unwrap();
        assert_eq!(spectrum.eigenvalues.len(), spectrum.dimension);
    }

    #[test]
    fn momentum_requires_translation_closed_filters() {
        // fixing the even-sublattice parity alone is not translation closed
        let spec = SectorSpec {
            momentum: Some(0),
            parity_z_even: Some(1),
            ..SectorSpec::new(4)
        };
        assert!(matches!(build_sector_basis(&spec), Err(Error::InvalidSector(_))));
    }
}
