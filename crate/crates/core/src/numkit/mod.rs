//! Dense complex matrix kernel shared by every other module.

mod eigen;
pub mod io;
mod linsolve;
mod matrix;
mod orth;
pub mod random;

pub use eigen::{hermitian_eigen, singular_values, EigenDecomposition};
pub use linsolve::solve;
pub use matrix::{basis_vector, dot, vec_norm, ComplexMatrix, C64, I, ONE, ZERO};
pub use orth::{gram_schmidt, GramSchmidt, DEFAULT_REJECTION_TOL};

use crate::error::{shape_err, Result};

/// `AB − BA`.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !a.is_square() || a.shape() != b.shape() {
        return shape_err(format!(
            "commutator needs square matrices of equal size, got {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        ));
    }
    Ok(&(a * b) - &(b * a))
}

/// `Y*Y − YY*`.
pub fn self_commutator(y: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !y.is_square() {
        return shape_err(format!(
            "self-commutator needs a square matrix, got {}x{}",
            y.rows(),
            y.cols()
        ));
    }
    let ys = y.adjoint();
    let mut out = &(&ys * y) - &(y * &ys);
    // The result is Hermitian in exact arithmetic.
    out = out.hermitian_part();
    Ok(out)
}

/// Hilbert–Schmidt (Frobenius) norm.
pub fn hs_norm(a: &ComplexMatrix) -> f64 {
    a.norm_fro()
}

/// Trace norm: the sum of singular values.
pub fn trace_norm(a: &ComplexMatrix) -> Result<f64> {
    Ok(singular_values(a)?.iter().sum())
}

/// `‖U*U − I‖_F ≤ tolerance`.
pub fn is_unitary(u: &ComplexMatrix, tolerance: f64) -> bool {
    u.is_square() && unitarity_defect(u) <= tolerance
}

pub fn unitarity_defect(u: &ComplexMatrix) -> f64 {
    (&(&u.adjoint() * u) - &ComplexMatrix::identity(u.cols())).norm_fro()
}
