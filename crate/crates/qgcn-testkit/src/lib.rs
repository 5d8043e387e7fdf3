//! Independent brute-force oracles for the qgcn test suites.
//!
//! Nothing in this crate depends on `qgcn-core`; every reference value is
//! computed by a structurally different route (dense matrices, exhaustive
//! restarts, contingency tables, Newton's method) so the tests comparing
//! against it are genuinely two-sided.

pub mod cluster;
pub mod densemat;
pub mod knn;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Seeded random real vector with entries in [-bound, bound].
pub fn random_vec(len: usize, bound: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| rng.gen_range(-bound..bound)).collect()
}

/// Seeded random normalized complex state of `num_qubits` qubits.
pub fn random_state(num_qubits: usize, seed: u64) -> Vec<num_complex::Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = 1 << num_qubits;
    let raw: Vec<num_complex::Complex64> = (0..dim)
        .map(|_| num_complex::Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm: f64 = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    raw.into_iter().map(|a| a / norm).collect()
}
