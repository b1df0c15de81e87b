//! String charges: finite-chain truncations of the semi-infinite
//! `sigma^z` strings and their summed operator.

use super::{Axis, Boundary, HamiltonianSpec, PauliTerm};
use crate::error::{Error, Result};

/// The string `Pi^z(l) = prod_{j < l} sigma^z_j` on an open chain.
/// For `l = 0` the product is empty and the string is the identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SemilocalString {
    pub boundary_site: usize,
}

impl SemilocalString {
    pub fn term(&self, coefficient: f64) -> PauliTerm {
        let factors: Vec<(usize, Axis)> = (0..self.boundary_site).map(|j| (j, Axis::Z)).collect();
        PauliTerm::new(coefficient, &factors).expect("valid string term")
    }

    /// Eigenvalue of the string on a computational basis state.
    #[inline]
    pub fn eigenvalue(&self, index: u64) -> f64 {
        let mask = (1u64 << self.boundary_site) - 1;
        if ((index & mask).count_ones() & 1) == 1 {
            -1.0
        } else {
            1.0
        }
    }
}

/// The summed string charge `(1/2) sum_{l=0}^{L-1} Pi^z(l)` together with
/// its density strings.
pub fn semilocal_charge(length: usize) -> Result<(Vec<SemilocalString>, HamiltonianSpec)> {
    if length == 0 {
        return Err(Error::ChainTooShort { required: 1, got: 0 });
    }
    let strings: Vec<SemilocalString> =
        (0..length).map(|l| SemilocalString { boundary_site: l }).collect();
    let terms = strings.iter().map(|s| s.term(0.5)).collect();
    let spec = HamiltonianSpec::new(length, Boundary::Open, "semilocal_sz", terms)?;
    Ok((strings, spec))
}

/// Eigenvalue of the summed string charge on a basis state: half the sum of
/// the prefix `sigma^z` products.
#[inline]
pub fn semilocal_eigenvalue(index: u64, length: usize) -> f64 {
    let mut sum = 0i64;
    let mut prefix = 1i64;
    for j in 0..length {
        sum += prefix;
        if (index >> j) & 1 == 1 {
            prefix = -prefix;
        }
    }
    // the last prefix update is for the string with boundary at `length`,
    // which is not part of the sum
    let _ = prefix;
    0.5 * sum as f64
}
