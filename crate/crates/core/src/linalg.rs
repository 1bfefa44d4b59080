//! Bounded-iteration wrapper around the nalgebra Hermitian eigensolver.
//!
//! The plain constructor iterates until the off-diagonal part is below
//! machine epsilon and can stall on exactly block-structured input. This
//! retries with a relaxed threshold instead.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex;

use crate::scalar::Real;

const MAX_ITERATIONS: usize = 10_000;
const EPS_FACTORS: [f64; 4] = [4.0, 64.0, 1024.0, 1.0e6];

fn thresholds<T: Real>() -> impl Iterator<Item = T> {
    EPS_FACTORS
        .iter()
        .map(|&f| T::default_epsilon() * T::from_f64_lossy(f))
}

/// Eigen-decomposition of a Hermitian matrix.
///
/// # Panics
/// If no relaxed threshold converges, which needs non-finite input.
pub(crate) fn hermitian_eigen<T: Real>(m: DMatrix<Complex<T>>) -> SymmetricEigen<Complex<T>, nalgebra::Dyn> {
    thresholds::<T>()
        .find_map(|eps| SymmetricEigen::try_new(m.clone(), eps, MAX_ITERATIONS))
        .expect("Hermitian eigensolver did not converge; input must be finite")
}
