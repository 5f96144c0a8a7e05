//! Monotone finite-difference solvers for `F(D²u) = f` with Dirichlet data.

mod analysis;
mod domain;
mod field;
pub mod linalg;
pub(crate) mod planar;
pub(crate) mod policy;
pub(crate) mod radial;

pub use analysis::{
    convergence_order_2d, convergence_order_radial, fundamental_profile, fundamental_profile_2d,
    fundamental_profile_radial, ConvergenceReport, ExponentFit, FundamentalProfile, PROFILE_FIT_TOLERANCE,
    PROFILE_LOG_THRESHOLD, PROFILE_OUTER_RADIUS, PROFILE_WINDOW,
};
pub use domain::{Domain, PlanarFn, PlanarProblem, RadialFn, RadialProblem, Spacing};
pub use field::{Field, Field2D, RadialField};
pub use planar::{residual_norm_2d, solve_dirichlet_2d, solve_dirichlet_2d_with};
pub use policy::{IterationOptions, SolveStats};
pub use radial::{residual_norm_radial, solve_dirichlet_radial, solve_dirichlet_radial_with, Solved};
