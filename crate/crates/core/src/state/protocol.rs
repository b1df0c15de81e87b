//! Preparation of the post-measurement state
//! `cosθ|⇑⟩ + sinθ e^{-iHt}|⇑↓⇑⟩`.
//!
//! Only the flipped branch is evolved; the polarized branch is an
//! eigenstate and contributes a phase that is gauged away by shifting the
//! Hamiltonian by the eigenstate energy. With a pre-quench the trick is
//! unavailable and the full state is evolved.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{verify_scar, HamiltonianSpec};
use crate::state::{
    apply_y_rotation, basis_state, evolve_krylov, evolve_trotter, product_state_up, KrylovOptions,
    StateVector,
};

#[derive(Debug, Clone, Copy)]
pub enum Evolver {
    Krylov(KrylovOptions),
    Trotter { dt: f64 },
}

impl Default for Evolver {
    fn default() -> Self {
        Evolver::Krylov(KrylovOptions::default())
    }
}

impl Evolver {
    pub fn evolve(&self, h: &HamiltonianSpec, state: &StateVector, t: f64) -> Result<StateVector> {
        match self {
            Evolver::Krylov(options) => Ok(evolve_krylov(h, state, t, options)?.0),
            Evolver::Trotter { dt } => Ok(evolve_trotter(h, state, t, *dt)?.0),
        }
    }
}

/// Evolution of the chain under a different Hamiltonian before the
/// measurement, modelling imperfect preparation.
#[derive(Debug, Clone)]
pub struct PreQuench {
    pub h0: HamiltonianSpec,
    pub t0: f64,
}

/// Default measurement site: the chain center.
pub fn center_site(length: usize) -> usize {
    length / 2
}

/// The evolved single-flip branch `e^{i E t} e^{-iHt} |⇑↓⇑⟩`, gauged so the
/// unflipped branch stays exactly `|⇑⟩`. Fails if `|⇑⟩` is not an
/// eigenstate of `h`.
pub fn flipped_branch(
    h: &HamiltonianSpec,
    site: usize,
    t: f64,
    evolver: &Evolver,
) -> Result<StateVector> {
    let length = h.length();
    if site >= length {
        return Err(Error::SiteOutOfRange { site, length });
    }
    let energy = verify_scar(h)?;
    let flipped = basis_state(length, 1usize << site)?;
    let evolved = evolver.evolve(h, &flipped, t)?;
    let gauge = Complex64::new(0.0, energy * t).exp();
    Ok(evolved.scaled(gauge))
}

/// Post-measurement state of the protocol at time `t`.
///
/// Without a pre-quench this is `cosθ|⇑⟩ + sinθ e^{-iHt}|⇑↓⇑⟩` with the
/// eigenstate energy gauged to zero. With a pre-quench, `|⇑⟩` is first
/// evolved under `h0` for `t0`, then rotated and evolved under `h`.
pub fn prepare_protocol_state(
    h: &HamiltonianSpec,
    theta: f64,
    site: usize,
    t: f64,
    pre_quench: Option<&PreQuench>,
    evolver: &Evolver,
) -> Result<StateVector> {
    let length = h.length();
    if site >= length {
        return Err(Error::SiteOutOfRange { site, length });
    }
    if !theta.is_finite() {
        return Err(Error::NonFiniteParameter { name: "theta", value: theta });
    }
    match pre_quench {
        None => {
            let branch = flipped_branch(h, site, t, evolver)?;
            let up = product_state_up(length)?;
            let (c, s) = (theta.cos(), theta.sin());
            let mut amps = vec![Complex64::ZERO; branch.dimension()];
            for (i, a) in amps.iter_mut().enumerate() {
                *a = up.amplitude(i) * c + branch.amplitude(i) * s;
            }
            let mut out = StateVector::from_amplitudes(length, amps, 0.0)?;
            out.set_time(t);
            Ok(out)
        }
        Some(pq) => {
            if pq.h0.length() != length {
                return Err(Error::DimensionMismatch {
                    expected: 1usize << length,
                    got: 1usize << pq.h0.length(),
                });
            }
            let before = evolver.evolve(&pq.h0, &product_state_up(length)?, pq.t0)?;
            let rotated = apply_y_rotation(&before, site, theta)?;
            evolver.evolve(h, &rotated, t)
        }
    }
}
