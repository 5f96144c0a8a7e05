//! Numerical counterparts of the Liouville-type arguments: lower bounds,
//! monotonicity of sphere minima, eigenvalue crossings, supersolution
//! constructions and homogeneous solutions.

pub mod certificate;
pub mod cone;
pub mod construction;
pub mod hadamard;
pub mod rescale;

pub use certificate::{
    critical_log_check, log_grid, nonexistence_certificate, CertificateOptions, CertificateReport, CriticalLogReport,
    Crossing, LOG_GRID,
};
pub use cone::{
    angular_hessian, cone_map_a, fixed_point, fixed_point_angular, fixed_point_radial, scalar_newton, ConeMapReport,
    FixedPointReport, HomogeneousProfile, Psi, ScalarNewton,
};
pub use construction::{bend_fundamental, build_global_supersolution, BendReport, Interface, PatchedSupersolution};
pub use hadamard::{fit_lower_bound, hadamard_check, sphere_min_curve, HadamardReport};
pub use rescale::Rescale;
