//! Positively homogeneous, uniformly elliptic operators and the quantities
//! that govern power-nonlinearity problems `F(D²u) = |x|^{-γ} u^p`: scaling
//! exponents of fundamental solutions, critical exponents, monotone
//! viscosity solvers, principal half-eigenvalues and the supersolution /
//! homogeneous-solution constructions built from them.
//!
//! Every numeric routine is generic over [`Real`] (`f32` or `f64`); the
//! `*64` aliases at the crate root fix the scalar to `f64`.

pub mod error;
pub mod matcore;
pub mod scalar;
pub mod liouville;
pub mod scaling;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
pub use scalar::Real;

pub type SymMatrix64 = matcore::SymMatrix<f64>;
pub type EllipticOperator64 = matcore::EllipticOperator<f64>;
pub type RadialField64 = solver::RadialField<f64>;
pub type Field2D64 = solver::Field2D<f64>;
pub type RadialProblem64 = solver::RadialProblem<f64>;
pub type PlanarProblem64 = solver::PlanarProblem<f64>;
pub type EigenResult64 = spectral::EigenResult<f64>;
pub type HomogeneousProfile64 = liouville::HomogeneousProfile<f64>;
pub type PatchedSupersolution64 = liouville::PatchedSupersolution<f64>;
