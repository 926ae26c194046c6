//! Dense complex linear algebra and state utilities for a few two-level atoms.
//!
//! Conventions used throughout the crate:
//!
//! * `ħ = 1`; σᶻ|e⟩ = +|e⟩ and σᶻ|g⟩ = −|g⟩.
//! * Basis labels are strings over `{e, g}`; character `k` is atom `k + 1`.
//! * In the computational basis atom 1 is the most significant bit and `e`
//!   is the set bit, so `"ggg"` is index 0 and `"egg"` is index 4.
//! * Single-qubit amplitudes and 2×2 qubit operators are ordered `(e, g)`.

mod eigen;
mod measure;
mod operator;
mod state;

pub use eigen::{hermitian_eigensystem, propagate, EigenSystem, SpectralPropagator};
pub use measure::{extract_qubit, measure_qubit, outcome_probability, qubit_fidelity};
pub use operator::{pauli, Axis, DenseOperator};
pub use state::{basis_index, basis_label, computational_basis, QubitState, Spin, StateVector};

pub use num_complex::Complex64;

pub type CMatrix = nalgebra::DMatrix<Complex64>;
pub type CVector = nalgebra::DVector<Complex64>;

/// Algebraic identities (norms, hermiticity, probability sums).
pub const ALGEBRA_TOL: f64 = 1e-12;
/// Eigendecomposition residuals.
pub const EIGEN_TOL: f64 = 1e-10;
/// Cross-oracle comparisons.
pub const ORACLE_TOL: f64 = 1e-8;

pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Largest elementwise modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
