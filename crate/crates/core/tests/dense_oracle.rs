//! Cross-checks of the bitmask kernels against naive dense linear algebra:
//! Kronecker-product operator construction and the dense matrix
//! exponential. The oracles here never touch the compiled fast path.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use scargrow_core::linalg;
use scargrow_core::pauli::{
    commutator_norm, commutator_norm_symbolic, Axis, Boundary, HamiltonianSpec, PauliTerm,
};
use scargrow_core::state::{apply_operator, evolve_krylov, KrylovOptions, StateVector};

fn pauli_matrix(axis: Option<Axis>) -> DMatrix<Complex64> {
    let (a, b, c, d) = match axis {
        None => (Complex64::ONE, Complex64::ZERO, Complex64::ZERO, Complex64::ONE),
        Some(Axis::X) => (Complex64::ZERO, Complex64::ONE, Complex64::ONE, Complex64::ZERO),
        Some(Axis::Y) => (
            Complex64::ZERO,
            Complex64::new(0.0, -1.0),
            Complex64::new(0.0, 1.0),
            Complex64::ZERO,
        ),
        Some(Axis::Z) => (Complex64::ONE, Complex64::ZERO, Complex64::ZERO, -Complex64::ONE),
    };
    DMatrix::from_row_slice(2, 2, &[a, b, c, d])
}

/// Dense matrix by explicit tensor products, site 0 on the least
/// significant bit.
fn kronecker_matrix(h: &HamiltonianSpec) -> DMatrix<Complex64> {
    let dim = 1usize << h.length();
    let mut total = DMatrix::<Complex64>::zeros(dim, dim);
    for term in h.terms() {
        let mut acc = DMatrix::<Complex64>::from_element(1, 1, Complex64::ONE);
        for site in (0..h.length()).rev() {
            let axis = term.factors().iter().find(|f| f.site == site).map(|f| f.axis);
            acc = acc.kronecker(&pauli_matrix(axis));
        }
        total += acc * Complex64::from(term.coefficient());
    }
    total
}

fn random_spec(rng: &mut ChaCha8Rng, length: usize, terms: usize) -> HamiltonianSpec {
    let axes = [Axis::X, Axis::Y, Axis::Z];
    let mut list = Vec::with_capacity(terms);
    for _ in 0..terms {
        let weight = rng.gen_range(1..=3.min(length));
        let mut sites: Vec<usize> = (0..length).collect();
        for i in (1..sites.len()).rev() {
            let j = rng.gen_range(0..=i);
            sites.swap(i, j);
        }
        let factors: Vec<(usize, Axis)> =
            sites[..weight].iter().map(|&s| (s, axes[rng.gen_range(0..3)])).collect();
        list.push(PauliTerm::new(rng.gen_range(-1.0..1.0), &factors).unwrap());
    }
    HamiltonianSpec::new(length, Boundary::Open, "random", list).unwrap()
}

fn random_state(rng: &mut ChaCha8Rng, length: usize) -> StateVector {
    let dim = 1usize << length;
    let amps: Vec<Complex64> =
        (0..dim).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    StateVector::from_amplitudes(length, amps, 0.0).unwrap().normalized()
}

#[test]
fn compiled_action_matches_kronecker_products() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let length = 6;
    for _ in 0..10 {
        let h = random_spec(&mut rng, length, 12);
        let dense = kronecker_matrix(&h);
        let op = h.compile();
        for _ in 0..10 {
            let psi = random_state(&mut rng, length);
            let fast = apply_operator(&op, &psi).unwrap();
            let vec = nalgebra::DVector::from_column_slice(psi.amplitudes());
            let slow = &dense * vec;
            let err: f64 = fast
                .amplitudes()
                .iter()
                .zip(slow.iter())
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(err < 1e-13, "apply error {err:e}");
        }
    }
}

#[test]
fn dense_matrix_builder_matches_kronecker_products() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..5 {
        let h = random_spec(&mut rng, 5, 10);
        let fast = h.dense_matrix().unwrap();
        let slow = kronecker_matrix(&h);
        let err = (&fast - &slow).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(err < 1e-13);
    }
}

fn hermitize(h: &HamiltonianSpec) -> DMatrix<Complex64> {
    let m = kronecker_matrix(h);
    let adj = m.adjoint();
    (m + adj) * Complex64::from(0.5)
}

#[test]
fn krylov_matches_dense_exponential_on_random_hamiltonians() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let length = 6;
    for round in 0..20 {
        let h = random_spec(&mut rng, length, 14);
        let dense = hermitize(&h);
        let t = rng.gen_range(0.2..2.0);
        let u = linalg::expm(&dense.map(|z| z * Complex64::new(0.0, -t)));
        let psi = random_state(&mut rng, length);
        let expect = &u * nalgebra::DVector::from_column_slice(psi.amplitudes());
        let (got, report) = evolve_krylov(&h, &psi, t, &KrylovOptions::default()).unwrap();
        let err: f64 = got
            .amplitudes()
            .iter()
            .zip(expect.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(err < 1e-9, "round {round}: vector error {err:e} after {} steps", report.steps);
    }
}

#[test]
fn symbolic_commutator_matches_dense_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..10 {
        let a = random_spec(&mut rng, 5, 8);
        let b = random_spec(&mut rng, 5, 8);
        let dense = commutator_norm(&a, &b).unwrap();
        let symbolic = commutator_norm_symbolic(&a, &b).unwrap();
        assert!(
            (dense - symbolic).abs() < 1e-9 * (1.0 + dense),
            "dense {dense} vs symbolic {symbolic}"
        );
    }
}
