//! Krylov-subspace (Lanczos) time evolution `exp(-iHt)|psi>`.
//!
//! Hermitian Lanczos with full re-orthogonalization; the step size adapts
//! until the standard last-component residual estimate meets the tolerance
//! budget for each substep. Happy breakdown (an invariant subspace, e.g.
//! an eigenstate input) makes the step exact.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::par;
use crate::pauli::{CompiledOperator, HamiltonianSpec};
use crate::state::{expectation_complex, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EvolutionMethod {
    Krylov,
    Trotter,
}

/// What actually happened during an evolution call. The energy drift is
/// always reported, never silently discarded.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EvolutionReport {
    pub method: EvolutionMethod,
    pub steps: usize,
    pub max_residual: f64,
    pub energy_drift: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct KrylovOptions {
    /// Maximum Krylov dimension per substep.
    pub dim: usize,
    /// Total residual-estimate budget for the whole interval.
    pub tolerance: f64,
    /// Cap on substep attempts before giving up.
    pub max_substeps: usize,
}

impl Default for KrylovOptions {
    fn default() -> Self {
        Self { dim: 30, tolerance: 1e-10, max_substeps: 100_000 }
    }
}

pub fn evolve_krylov(
    h: &HamiltonianSpec,
    state: &StateVector,
    t: f64,
    options: &KrylovOptions,
) -> Result<(StateVector, EvolutionReport)> {
    evolve_krylov_op(&h.compile(), state, t, options)
}

/// Same as [`evolve_krylov`] for a pre-compiled operator.
pub fn evolve_krylov_op(
    op: &CompiledOperator,
    state: &StateVector,
    t: f64,
    options: &KrylovOptions,
) -> Result<(StateVector, EvolutionReport)> {
    if op.length() != state.length() {
        return Err(Error::DimensionMismatch { expected: op.dimension(), got: state.dimension() });
    }
    if !t.is_finite() {
        return Err(Error::NonFiniteParameter { name: "t", value: t });
    }
    let energy_before = expectation_complex(op, state)?.re;
    let scale = op.terms().iter().map(|c| c.scalar.norm()).sum::<f64>().max(1e-300);

    let mut current = state.clone();
    let mut report = EvolutionReport {
        method: EvolutionMethod::Krylov,
        steps: 0,
        max_residual: 0.0,
        energy_drift: 0.0,
    };
    if t != 0.0 {
        let mut remaining = t;
        let mut dt = t;
        let mut attempts = 0usize;
        while remaining != 0.0 {
            if dt.abs() > remaining.abs() {
                dt = remaining;
            }
            let budget = options.tolerance * (dt / t).abs();
            let (candidate, err) = lanczos_step(op, &current, dt, options.dim, scale);
            attempts += 1;
            if attempts > options.max_substeps {
                return Err(Error::NonConvergence { steps: attempts, residual: err });
            }
            if err <= budget || dt.abs() <= t.abs() * 1e-12 {
                current = candidate;
                remaining -= dt;
                report.steps += 1;
                report.max_residual = report.max_residual.max(err);
                if err < budget / 128.0 {
                    dt *= 2.0;
                }
            } else {
                dt *= 0.5;
            }
        }
    }
    current.set_time(state.time() + t);
    let energy_after = expectation_complex(op, &current)?.re;
    report.energy_drift = (energy_after - energy_before).abs();
    Ok((current, report))
}

/// One Lanczos step: returns `exp(-i H dt)|psi>` in the Krylov subspace
/// plus the residual estimate `beta_m |y_m|`.
fn lanczos_step(
    op: &CompiledOperator,
    state: &StateVector,
    dt: f64,
    max_dim: usize,
    scale: f64,
) -> (StateVector, f64) {
    let dim = state.dimension();
    let m = max_dim.max(2);
    let breakdown = 1e-14 * scale.max(1.0);

    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(m);
    let mut alpha: Vec<f64> = Vec::with_capacity(m);
    let mut beta: Vec<f64> = Vec::with_capacity(m);

    basis.push(state.amplitudes().to_vec());
    let mut happy = false;
    for j in 0..m {
        let vj = &basis[j];
        let mut w = vec![Complex64::ZERO; dim];
        par::fill_c64(&mut w, |i| op.gathered(vj, i));
        let aj = par::sum_c64(dim, |i| basis[j][i].conj() * w[i]).re;
        alpha.push(aj);
        // two passes of explicit re-orthogonalization against the whole basis
        for _ in 0..2 {
            for vi in basis.iter() {
                let c = par::sum_c64(dim, |i| vi[i].conj() * w[i]);
                if c.norm() > 0.0 {
                    par::axpy_c64(&mut w, -c, vi);
                }
            }
        }
        let bj = par::sum_f64(dim, |i| w[i].norm_sqr()).sqrt();
        beta.push(bj);
        if bj < breakdown {
            happy = true;
            break;
        }
        if j + 1 < m {
            let inv = 1.0 / bj;
            for a in &mut w {
                *a *= inv;
            }
            basis.push(w);
        }
    }

    let m_eff = alpha.len();
    let mut tri = DMatrix::<f64>::zeros(m_eff, m_eff);
    for j in 0..m_eff {
        tri[(j, j)] = alpha[j];
        if j + 1 < m_eff {
            tri[(j, j + 1)] = beta[j];
            tri[(j + 1, j)] = beta[j];
        }
    }
    let (vals, vecs) = linalg::symmetric_eigen(&tri);
    // y = Q exp(-i Lambda dt) Q^T e_1
    let mut y = vec![Complex64::ZERO; m_eff];
    for (k, yk) in y.iter_mut().enumerate() {
        let mut acc = Complex64::ZERO;
        for (j, &val) in vals.iter().enumerate() {
            let phase = Complex64::new(0.0, -val * dt).exp();
            acc += Complex64::from(vecs[(k, j)]) * phase * vecs[(0, j)];
        }
        *yk = acc;
    }

    let mut out = vec![Complex64::ZERO; dim];
    par::fill_c64(&mut out, |i| {
        let mut acc = Complex64::ZERO;
        for (k, vk) in basis.iter().enumerate() {
            acc += y[k] * vk[i];
        }
        acc
    });
    let err = if happy { 0.0 } else { beta[m_eff - 1] * y[m_eff - 1].norm() };
    let result = StateVector::from_amplitudes(state.length(), out, state.time()).expect("dimension preserved");
    (result, err)
}
