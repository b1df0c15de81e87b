//! Symbolic Pauli-string Hamiltonians and their compiled bitmask form.
//!
//! A [`HamiltonianSpec`] is a plain weighted sum of Pauli strings with real
//! coefficients. Compilation turns each string into a flip mask (x/y
//! factors), a phase mask (y/z factors) and a complex scalar carrying the
//! `i^{#y}` prefactor, so applying a term to a basis state is one XOR, one
//! popcount parity and one multiply.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub mod builders;
pub mod semilocal;

pub use builders::{build_h0, build_h1, build_h2, build_h_tau, H0Params, H0Variant, H1Params, H2Params, HTauParams};
pub use semilocal::{semilocal_charge, SemilocalString};

/// Largest chain length for which dense matrices are built.
pub const DENSE_CAP: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Open,
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliFactor {
    pub site: usize,
    pub axis: Axis,
}

/// One real-coefficient Pauli string. Factors are kept sorted by site and
/// sites never repeat; a term with no factors is a multiple of the identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliTerm {
    coefficient: f64,
    factors: Vec<PauliFactor>,
}

impl PauliTerm {
    pub fn new(coefficient: f64, factors: &[(usize, Axis)]) -> Result<Self> {
        if !coefficient.is_finite() {
            return Err(Error::NonFiniteParameter { name: "coefficient", value: coefficient });
        }
        let mut factors: Vec<PauliFactor> =
            factors.iter().map(|&(site, axis)| PauliFactor { site, axis }).collect();
        factors.sort_by_key(|f| f.site);
        for pair in factors.windows(2) {
            if pair[0].site == pair[1].site {
                return Err(Error::RepeatedSite { site: pair[0].site });
            }
        }
        Ok(Self { coefficient, factors })
    }

    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    pub fn factors(&self) -> &[PauliFactor] {
        &self.factors
    }

    /// Number of sites carrying a non-identity factor.
    pub fn weight(&self) -> usize {
        self.factors.len()
    }

    pub fn max_site(&self) -> Option<usize> {
        self.factors.last().map(|f| f.site)
    }
}

/// A chain Hamiltonian as an explicit list of Pauli strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianSpec {
    length: usize,
    boundary: Boundary,
    label: String,
    terms: Vec<PauliTerm>,
}

impl HamiltonianSpec {
    pub fn new(length: usize, boundary: Boundary, label: impl Into<String>, terms: Vec<PauliTerm>) -> Result<Self> {
        if length == 0 || length > 63 {
            return Err(Error::LengthCap { length, cap: 63 });
        }
        for term in &terms {
            if let Some(max) = term.max_site() {
                if max >= length {
                    return Err(Error::SiteOutOfRange { site: max, length });
                }
            }
        }
        Ok(Self { length, boundary, label: label.into(), terms })
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn compile(&self) -> CompiledOperator {
        CompiledOperator::new(self)
    }

    /// Dense matrix over the full 2^L basis. Guarded by [`DENSE_CAP`].
    pub fn dense_matrix(&self) -> Result<DMatrix<Complex64>> {
        if self.length > DENSE_CAP {
            return Err(Error::LengthCap { length: self.length, cap: DENSE_CAP });
        }
        Ok(self.compile().matrix())
    }

    /// Largest entrywise deviation from the conjugate transpose.
    pub fn hermiticity_defect(&self) -> Result<f64> {
        let m = self.dense_matrix()?;
        let defect = (&m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        Ok(defect)
    }
}

/// Bitmask-compiled form of a [`HamiltonianSpec`].
#[derive(Debug, Clone)]
pub struct CompiledOperator {
    length: usize,
    terms: Vec<CompiledTerm>,
}

#[derive(Debug, Clone, Copy)]
pub struct CompiledTerm {
    /// Sites carrying an x or y factor; applying the term XORs this mask.
    pub flip: u64,
    /// Sites carrying a y or z factor; the sign is the parity of
    /// `input_index & phase`.
    pub phase: u64,
    /// Real coefficient times `i^{#y}`.
    pub scalar: Complex64,
}

impl CompiledOperator {
    fn new(spec: &HamiltonianSpec) -> Self {
        let terms = spec
            .terms
            .iter()
            .map(|term| {
                let mut flip = 0u64;
                let mut phase = 0u64;
                let mut ny = 0u32;
                for f in &term.factors {
                    let bit = 1u64 << f.site;
                    match f.axis {
                        Axis::X => flip |= bit,
                        Axis::Y => {
                            flip |= bit;
                            phase |= bit;
                            ny += 1;
                        }
                        Axis::Z => phase |= bit,
                    }
                }
                let i_pow = match ny % 4 {
                    0 => Complex64::new(1.0, 0.0),
                    1 => Complex64::new(0.0, 1.0),
                    2 => Complex64::new(-1.0, 0.0),
                    _ => Complex64::new(0.0, -1.0),
                };
                CompiledTerm { flip, phase, scalar: i_pow * term.coefficient }
            })
            .collect();
        Self { length: spec.length, terms }
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn dimension(&self) -> usize {
        1usize << self.length
    }

    pub fn terms(&self) -> &[CompiledTerm] {
        &self.terms
    }

    /// Amplitude of `O|psi>` at `out_index`, gathering from the input.
    #[inline]
    pub fn gathered(&self, amps: &[Complex64], out_index: usize) -> Complex64 {
        let mut acc = Complex64::ZERO;
        for t in &self.terms {
            let src = out_index ^ t.flip as usize;
            let sign = if ((src as u64 & t.phase).count_ones() & 1) == 1 { -1.0 } else { 1.0 };
            acc += t.scalar * sign * amps[src];
        }
        acc
    }

    /// Apply to a sparse amplitude map (used for symmetry-sector bases).
    pub fn apply_map(&self, input: &HashMap<u64, Complex64>) -> HashMap<u64, Complex64> {
        let mut out: HashMap<u64, Complex64> = HashMap::with_capacity(input.len() * (1 + self.terms.len()));
        for (&n, &a) in input {
            for t in &self.terms {
                let sign = if ((n & t.phase).count_ones() & 1) == 1 { -1.0 } else { 1.0 };
                *out.entry(n ^ t.flip).or_insert(Complex64::ZERO) += t.scalar * sign * a;
            }
        }
        out
    }

    /// Dense matrix of the operator.
    pub fn matrix(&self) -> DMatrix<Complex64> {
        let dim = self.dimension();
        let mut m = DMatrix::<Complex64>::zeros(dim, dim);
        for t in &self.terms {
            for n in 0..dim {
                let sign = if ((n as u64 & t.phase).count_ones() & 1) == 1 { -1.0 } else { 1.0 };
                m[(n ^ t.flip as usize, n)] += t.scalar * sign;
            }
        }
        m
    }
}

/// Total magnetization `S^z = (1/2) sum_l sigma^z_l`.
pub fn sz_total(length: usize) -> HamiltonianSpec {
    let terms = (0..length)
        .map(|l| PauliTerm::new(0.5, &[(l, Axis::Z)]).expect("valid term"))
        .collect();
    HamiltonianSpec::new(length, Boundary::Open, "sz", terms).expect("valid spec")
}

/// Global spin-flip parity `prod_l sigma^z_l`.
pub fn parity_z(length: usize) -> HamiltonianSpec {
    let factors: Vec<(usize, Axis)> = (0..length).map(|l| (l, Axis::Z)).collect();
    let term = PauliTerm::new(1.0, &factors).expect("valid term");
    HamiltonianSpec::new(length, Boundary::Open, "parity_z", vec![term]).expect("valid spec")
}

/// Sublattice parity `prod sigma^z` over sites congruent to `offset` mod 2.
pub fn parity_z_sublattice(length: usize, offset: usize) -> HamiltonianSpec {
    let factors: Vec<(usize, Axis)> =
        (0..length).filter(|l| l % 2 == offset % 2).map(|l| (l, Axis::Z)).collect();
    let term = PauliTerm::new(1.0, &factors).expect("valid term");
    HamiltonianSpec::new(length, Boundary::Open, "parity_z_sublattice", vec![term]).expect("valid spec")
}

/// Checks that `|⇑⟩` (basis index 0) is an eigenstate and returns its energy.
///
/// The action on the single basis state is accumulated sparsely, so this
/// works at any length. Fails with the off-eigenstate residual otherwise.
pub fn verify_scar(h: &HamiltonianSpec) -> Result<f64> {
    let compiled = h.compile();
    let mut amps: HashMap<u64, Complex64> = HashMap::new();
    for t in compiled.terms() {
        // phase parity of index 0 is always even
        *amps.entry(t.flip).or_insert(Complex64::ZERO) += t.scalar;
    }
    let energy = amps.remove(&0).unwrap_or(Complex64::ZERO);
    let residual: f64 = amps.values().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if residual > 1e-12 {
        return Err(Error::ResidualTooLarge { residual });
    }
    if energy.im.abs() > 1e-12 {
        return Err(Error::NonRealExpectation { imag: energy.im });
    }
    Ok(energy.re)
}

/// Frobenius norm of `[A, B]` from dense matrices. Capped at [`DENSE_CAP`].
pub fn commutator_norm(a: &HamiltonianSpec, b: &HamiltonianSpec) -> Result<f64> {
    if a.length != b.length {
        return Err(Error::DimensionMismatch { expected: a.length, got: b.length });
    }
    let ma = a.dense_matrix()?;
    let mb = b.dense_matrix()?;
    let comm = &ma * &mb - &mb * &ma;
    Ok(comm.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
}

/// Frobenius norm of `[A, B]` by Pauli algebra, exact at any length.
///
/// Expands the commutator in the Pauli-string basis and uses
/// `||sum_u d_u P_u||_F^2 = 2^L sum_u |d_u|^2`.
pub fn commutator_norm_symbolic(a: &HamiltonianSpec, b: &HamiltonianSpec) -> Result<f64> {
    if a.length != b.length {
        return Err(Error::DimensionMismatch { expected: a.length, got: b.length });
    }
    let mut acc: HashMap<Vec<PauliFactor>, Complex64> = HashMap::new();
    for ta in &a.terms {
        for tb in &b.terms {
            let (p_ab, f_ab) = algebra::mul_factors(&ta.factors, &tb.factors);
            let (p_ba, _) = algebra::mul_factors(&tb.factors, &ta.factors);
            let weight = ta.coefficient * tb.coefficient * (p_ab - p_ba);
            if weight != Complex64::ZERO {
                *acc.entry(f_ab).or_insert(Complex64::ZERO) += weight;
            }
        }
    }
    let sum: f64 = acc.values().map(|c| c.norm_sqr()).sum();
    Ok((sum * 2f64.powi(a.length as i32)).sqrt())
}

pub(crate) mod algebra {
    use super::{Axis, PauliFactor};
    use num_complex::Complex64;
    use std::collections::BTreeMap;

    /// Single-site product `sigma^a sigma^b = phase * sigma^c`.
    fn mul_single(a: Axis, b: Axis) -> (Complex64, Option<Axis>) {
        use Axis::*;
        let i = Complex64::new(0.0, 1.0);
        match (a, b) {
            (X, X) | (Y, Y) | (Z, Z) => (Complex64::ONE, None),
            (X, Y) => (i, Some(Z)),
            (Y, X) => (-i, Some(Z)),
            (Y, Z) => (i, Some(X)),
            (Z, Y) => (-i, Some(X)),
            (Z, X) => (i, Some(Y)),
            (X, Z) => (-i, Some(Y)),
        }
    }

    /// Product of two Pauli strings as `(phase, canonical factors)`.
    pub fn mul_factors(a: &[PauliFactor], b: &[PauliFactor]) -> (Complex64, Vec<PauliFactor>) {
        let mut sites: BTreeMap<usize, (Option<Axis>, Option<Axis>)> = BTreeMap::new();
        for f in a {
            sites.entry(f.site).or_insert((None, None)).0 = Some(f.axis);
        }
        for f in b {
            sites.entry(f.site).or_insert((None, None)).1 = Some(f.axis);
        }
        let mut phase = Complex64::ONE;
        let mut out = Vec::with_capacity(sites.len());
        for (site, pair) in sites {
            let axis = match pair {
                (Some(x), None) | (None, Some(x)) => Some(x),
                (Some(x), Some(y)) => {
                    let (p, c) = mul_single(x, y);
                    phase *= p;
                    c
                }
                (None, None) => unreachable!(),
            };
            if let Some(axis) = axis {
                out.push(PauliFactor { site, axis });
            }
        }
        (phase, out)
    }
}
