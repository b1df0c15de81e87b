//! Exact state-vector laboratory for spin-1/2 chains that host a fully
//! separable eigenstate (the polarized product state `|⇑⟩`).
//!
//! The crate covers the whole pipeline around the single-spin measurement
//! protocol on such a chain:
//!
//! - [`pauli`] — symbolic Pauli-string Hamiltonians, the model builders
//!   (transistor chain, generic pairwise model, Ising variants, the dual
//!   tau-spin model), semilocal string charges and structural checks.
//! - [`state`] — dense state vectors over the 2^L computational basis,
//!   bitmask operator application, Krylov and second-order Trotter time
//!   evolution, and the measurement-protocol state preparation.
//! - [`observables`] — magnetization profiles, the effective region grown
//!   by the perturbation, full counting statistics of the magnetization,
//!   spin covariance matrices and the quantumness lower bound.
//! - [`spectral`] — symmetry-sector bases, dense sector spectra, spacing
//!   unfolding, gap-ratio statistics and the duality spectrum check.
//! - [`analysis`] — growth fits, spreading classification, bimodality
//!   detection and numerical U(1) bounds.
//!
//! Basis convention, shared by every module: bit `j` of a basis index is
//! `0` for spin up and `1` for spin down at site `j`, so index `0` is
//! `|⇑⟩`. All data-parallel kernels produce results that are bit-identical
//! between the `parallel` (rayon) and sequential builds; see [`par`].

pub mod analysis;
pub mod error;
pub mod linalg;
pub mod observables;
pub mod par;
pub mod pauli;
pub mod spectral;
pub mod state;

pub use error::{Error, Result};
