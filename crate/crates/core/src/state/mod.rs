//! Dense state vectors and the operator-application kernel.
//!
//! Basis convention: bit `j` of an amplitude index is 0 for spin up and 1
//! for spin down at site `j`; index 0 is the polarized state `|⇑⟩`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::par;
use crate::pauli::{CompiledOperator, HamiltonianSpec};

mod krylov;
mod protocol;
mod trotter;

pub use krylov::{evolve_krylov, evolve_krylov_op, EvolutionMethod, EvolutionReport, KrylovOptions};
pub use protocol::{center_site, flipped_branch, prepare_protocol_state, Evolver, PreQuench};
pub use trotter::evolve_trotter;

/// Default cap on the chain length (two complex buffers at this size fit
/// in desk-scale memory).
pub const LENGTH_CAP: usize = 24;

#[derive(Debug, Clone)]
pub struct StateVector {
    length: usize,
    time: f64,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn from_amplitudes(length: usize, amps: Vec<Complex64>, time: f64) -> Result<Self> {
        if amps.len() != 1usize << length {
            return Err(Error::DimensionMismatch { expected: 1usize << length, got: amps.len() });
        }
        Ok(Self { length, time, amps })
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn dimension(&self) -> usize {
        self.amps.len()
    }

    /// Evolution time this state has reached.
    pub fn time(&self) -> f64 {
        self.time
    }

    pub(crate) fn set_time(&mut self, t: f64) {
        self.time = t;
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn norm(&self) -> f64 {
        par::sum_f64(self.amps.len(), |i| self.amps[i].norm_sqr()).sqrt()
    }

    pub fn normalized(mut self) -> Self {
        let n = self.norm();
        if n > 0.0 {
            let inv = 1.0 / n;
            for a in &mut self.amps {
                *a *= inv;
            }
        }
        self
    }

    pub fn scaled(mut self, factor: Complex64) -> Self {
        for a in &mut self.amps {
            *a *= factor;
        }
        self
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.length != other.length {
            return Err(Error::DimensionMismatch { expected: self.dimension(), got: other.dimension() });
        }
        Ok(par::sum_c64(self.amps.len(), |i| self.amps[i].conj() * other.amps[i]))
    }

    /// Euclidean distance to another state.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        if self.length != other.length {
            return Err(Error::DimensionMismatch { expected: self.dimension(), got: other.dimension() });
        }
        Ok(par::sum_f64(self.amps.len(), |i| (self.amps[i] - other.amps[i]).norm_sqr()).sqrt())
    }

    /// Fidelity-insensitive distance: minimum over a global phase.
    pub fn distance_up_to_phase(&self, other: &Self) -> Result<f64> {
        let overlap = self.inner(other)?;
        let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { Complex64::ONE };
        let d2 = par::sum_f64(self.amps.len(), |i| (self.amps[i] * phase - other.amps[i]).norm_sqr());
        Ok(d2.sqrt())
    }

    /// `<sigma^z_site>`.
    pub fn sz_site(&self, site: usize) -> Result<f64> {
        if site >= self.length {
            return Err(Error::SiteOutOfRange { site, length: self.length });
        }
        let bit = 1usize << site;
        Ok(par::sum_f64(self.amps.len(), |i| {
            let w = self.amps[i].norm_sqr();
            if i & bit == 0 {
                w
            } else {
                -w
            }
        }))
    }

    /// `<S^z> = (1/2) sum_l <sigma^z_l>`, computed from the popcount of
    /// each basis index.
    pub fn sz_expectation(&self) -> f64 {
        let half_l = self.length as f64 / 2.0;
        par::sum_f64(self.amps.len(), |i| {
            self.amps[i].norm_sqr() * (half_l - i.count_ones() as f64)
        })
    }

    /// Probability weight in each total-magnetization sector, indexed by
    /// the number of down spins.
    pub fn magnetization_histogram(&self) -> Vec<f64> {
        let mut hist = vec![0.0; self.length + 1];
        for (i, a) in self.amps.iter().enumerate() {
            hist[i.count_ones() as usize] += a.norm_sqr();
        }
        hist
    }
}

/// The polarized product state `|⇑⟩`.
pub fn product_state_up(length: usize) -> Result<StateVector> {
    if length == 0 || length > LENGTH_CAP {
        return Err(Error::LengthCap { length, cap: LENGTH_CAP });
    }
    let mut amps = vec![Complex64::ZERO; 1usize << length];
    amps[0] = Complex64::ONE;
    Ok(StateVector { length, time: 0.0, amps })
}

/// A single computational basis state.
pub fn basis_state(length: usize, index: usize) -> Result<StateVector> {
    if length == 0 || length > LENGTH_CAP {
        return Err(Error::LengthCap { length, cap: LENGTH_CAP });
    }
    let dim = 1usize << length;
    if index >= dim {
        return Err(Error::DimensionMismatch { expected: dim, got: index });
    }
    let mut amps = vec![Complex64::ZERO; dim];
    amps[index] = Complex64::ONE;
    Ok(StateVector { length, time: 0.0, amps })
}

/// Single-site rotation taking `|↑⟩` to `cosθ|↑⟩ + sinθ|↓⟩`.
pub fn apply_y_rotation(state: &StateVector, site: usize, theta: f64) -> Result<StateVector> {
    if site >= state.length {
        return Err(Error::SiteOutOfRange { site, length: state.length });
    }
    let (c, s) = (theta.cos(), theta.sin());
    let bit = 1usize << site;
    let amps = &state.amps;
    let mut out = vec![Complex64::ZERO; amps.len()];
    par::fill_c64(&mut out, |i| {
        if i & bit == 0 {
            amps[i] * c - amps[i | bit] * s
        } else {
            amps[i & !bit] * s + amps[i] * c
        }
    });
    Ok(StateVector { length: state.length, time: state.time, amps: out })
}

/// Exact linear action `O|psi>`; the result is in general unnormalized.
pub fn apply_operator(op: &CompiledOperator, state: &StateVector) -> Result<StateVector> {
    if op.length() != state.length {
        return Err(Error::DimensionMismatch { expected: op.dimension(), got: state.dimension() });
    }
    let amps = &state.amps;
    let mut out = vec![Complex64::ZERO; amps.len()];
    par::fill_c64(&mut out, |m| op.gathered(amps, m));
    Ok(StateVector { length: state.length, time: state.time, amps: out })
}

/// `<psi|O|psi>` without materializing `O|psi>`.
pub fn expectation_complex(op: &CompiledOperator, state: &StateVector) -> Result<Complex64> {
    if op.length() != state.length {
        return Err(Error::DimensionMismatch { expected: op.dimension(), got: state.dimension() });
    }
    let amps = &state.amps;
    Ok(par::sum_c64(amps.len(), |m| amps[m].conj() * op.gathered(amps, m)))
}

/// Real expectation value of a Hermitian operator. The imaginary part must
/// vanish to numerical precision and is stripped.
pub fn expectation(op: &CompiledOperator, state: &StateVector) -> Result<f64> {
    let z = expectation_complex(op, state)?;
    if z.im.abs() > 1e-12 * (1.0 + z.re.abs()) {
        return Err(Error::NonRealExpectation { imag: z.im });
    }
    Ok(z.re)
}

/// Convenience wrapper compiling the spec first.
pub fn expectation_of(h: &HamiltonianSpec, state: &StateVector) -> Result<f64> {
    expectation(&h.compile(), state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{Axis, Boundary, PauliTerm};

    fn op_single(l: usize, site: usize, axis: Axis) -> CompiledOperator {
        let t = PauliTerm::new(1.0, &[(site, axis)]).unwrap();
        HamiltonianSpec::new(l, Boundary::Open, "t", vec![t]).unwrap().compile()
    }

    #[test]
    fn product_state_examples() {
        let s = product_state_up(2).unwrap();
        assert_eq!(s.amplitude(0), Complex64::ONE);
        assert_eq!(s.amplitude(1), Complex64::ZERO);
        assert_eq!(s.amplitude(2), Complex64::ZERO);
        assert_eq!(s.amplitude(3), Complex64::ZERO);

        let s = product_state_up(8).unwrap();
        assert!((s.sz_expectation() - 4.0).abs() < 1e-14);

        let s = product_state_up(20).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-14);

        assert!(product_state_up(25).is_err());
    }

    #[test]
    fn y_rotation_examples() {
        let up = product_state_up(4).unwrap();
        let same = apply_y_rotation(&up, 0, 0.0).unwrap();
        assert!(same.distance(&up).unwrap() < 1e-15);

        let flipped = apply_y_rotation(&product_state_up(6).unwrap(), 3, std::f64::consts::FRAC_PI_2).unwrap();
        assert!((flipped.amplitude(1 << 3).re - 1.0).abs() < 1e-15);
        assert!((flipped.norm() - 1.0).abs() < 1e-14);

        let tilted = apply_y_rotation(&product_state_up(1).unwrap(), 0, std::f64::consts::FRAC_PI_4).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((tilted.amplitude(0).re - r).abs() < 1e-15);
        assert!((tilted.amplitude(1).re - r).abs() < 1e-15);

        assert!(apply_y_rotation(&up, 4, 0.1).is_err());
    }

    #[test]
    fn apply_operator_examples() {
        let up = product_state_up(1).unwrap();
        let z = apply_operator(&op_single(1, 0, Axis::Z), &up).unwrap();
        assert!(z.distance(&up).unwrap() < 1e-15);
        let x = apply_operator(&op_single(1, 0, Axis::X), &up).unwrap();
        assert_eq!(x.amplitude(1), Complex64::ONE);
        assert_eq!(x.amplitude(0), Complex64::ZERO);
    }

    #[test]
    fn expectation_examples() {
        let l = 8;
        let up = product_state_up(l).unwrap();
        let sz = crate::pauli::sz_total(l).compile();
        assert!((expectation(&sz, &up).unwrap() - 4.0).abs() < 1e-14);

        // one spin flipped with weight sin^2(theta)
        let theta = 0.37;
        let tilted = apply_y_rotation(&up, 4, theta).unwrap();
        let expect = l as f64 / 2.0 - theta.sin().powi(2);
        assert!((expectation(&sz, &tilted).unwrap() - expect).abs() < 1e-13);

        let flipped = basis_state(l, 1 << 4).unwrap();
        assert!((flipped.sz_site(4).unwrap() + 1.0).abs() < 1e-14);
    }

    #[test]
    fn magnetization_histogram_tracks_popcount() {
        let s = apply_y_rotation(&product_state_up(3).unwrap(), 1, 0.5).unwrap();
        let hist = s.magnetization_histogram();
        assert!((hist[0] - 0.5f64.cos().powi(2)).abs() < 1e-14);
        assert!((hist[1] - 0.5f64.sin().powi(2)).abs() < 1e-14);
        assert!(hist[2].abs() < 1e-15);
    }
}
