//! Symmetric matrices and the operator kernel.

mod ellipticity;
mod hessian;
mod operator;
pub mod sampling;
mod sym;

pub use ellipticity::{verify_ellipticity, EllipticityCheck, EllipticityReport, Violation};
pub use hessian::{hessian_xi, radial_hessian};
pub use operator::{EllipticOperator, OperatorKind};
pub use sym::{SymEigen, SymMatrix, MAX_DIM};

/// Ascending eigenvalues of a symmetric matrix.
pub fn eigenvalues_sym<T: crate::Real>(m: &SymMatrix<T>) -> Vec<T> {
    m.eigenvalues()
}

/// Evaluates `F(M)`.
pub fn eval_operator<T: crate::Real>(op: &EllipticOperator<T>, m: &SymMatrix<T>) -> crate::Result<T> {
    op.eval(m)
}
