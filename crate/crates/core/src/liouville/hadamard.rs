//! Sphere minima, their monotonicity, and power-law lower bounds.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matcore::EllipticOperator;
use crate::scalar::{sup_norm, Real};
use crate::scaling::alpha_star;
use crate::solver::planar::PlanarGrid;
use crate::solver::radial::RadialGrid;
use crate::solver::{Domain, Field};

/// Angular samples used for planar sphere minima.
pub const CIRCLE_SAMPLES: usize = 256;
/// Relative tolerance of the monotonicity checks.
pub const HADAMARD_TOLERANCE: f64 = 1e-6;
/// Most negative discrete `F(D²u)` accepted as superharmonic.
pub const SUPERHARMONIC_SLACK: f64 = 1e-8;

/// `(r, min_{|x| = r} u)` for each requested radius.
pub fn sphere_min_curve<T: Real>(field: &Field<T>, radii: &[T]) -> Result<Vec<(T, T)>> {
    radii
        .iter()
        .map(|&r| {
            let m = match field {
                Field::Radial(f) => f.interpolate(r),
                Field::Planar(f) => f.circle_extrema(r, CIRCLE_SAMPLES).map(|p| p.0),
            };
            m.map(|m| (r, m)).ok_or_else(|| Error::ParameterDomain(format!("radius {r} outside the field")))
        })
        .collect()
}

/// Discrete `F(D²_h u)` at interior nodes.
pub(crate) fn discrete_operator<T: Real>(op: &EllipticOperator<T>, field: &Field<T>) -> Result<Vec<T>> {
    match field {
        Field::Radial(f) => {
            let grid = RadialGrid::for_operator(op, f.domain, f.spacing, f.cells())?;
            Ok(grid.unknowns().map(|i| grid.apply(op, i, &f.values)).collect())
        }
        Field::Planar(f) => {
            crate::solver::planar::check_stencil(op)?;
            let grid = PlanarGrid::build(f.domain, f.h)?;
            Ok(grid.nodes.iter().map(|&k| grid.apply(op, k, &f.values)).collect())
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HadamardReport<T> {
    pub alpha: T,
    /// Smallest discrete `F(D²u)` over interior nodes.
    pub min_operator_value: T,
    pub radii: Vec<T>,
    pub minima: Vec<T>,
    /// Largest increase of `m` between consecutive radii.
    pub max_increase: T,
    /// Largest decrease of `r^α m(r)` between consecutive radii.
    pub max_scaled_decrease: T,
    pub tolerance: T,
    pub minima_nonincreasing: bool,
    pub scaled_nondecreasing: bool,
}

impl<T: Real> HadamardReport<T> {
    pub fn passed(&self) -> bool {
        self.minima_nonincreasing && self.scaled_nondecreasing
    }
}

/// Checks that `m(r)` is nonincreasing and `r^α m(r)` nondecreasing, both to
/// `1e-6 ‖u‖`. `alpha` defaults to `α*(F)` for rotationally invariant operators.
/// Radial fields use every node; planar fields use 64 radii strictly inside
/// the annulus.
pub fn hadamard_check<T: Real>(op: &EllipticOperator<T>, field: &Field<T>, alpha: Option<T>) -> Result<HadamardReport<T>> {
    let values = discrete_operator(op, field)?;
    let min_operator_value = values.iter().fold(T::infinity(), |m, &v| m.min(v));
    let norm = sup_norm(field.values());
    if min_operator_value < -T::lit(SUPERHARMONIC_SLACK) * norm.max(T::one()) {
        return Err(Error::WrongRegime(format!(
            "field is not numerically F-superharmonic: min F(D^2u) = {min_operator_value}"
        )));
    }
    let alpha = match alpha {
        Some(a) => a,
        None => alpha_star(op, op.dim(), T::lit(1e-12))?.alpha_star,
    };
    let (radii, minima) = match field {
        Field::Radial(f) => (f.nodes.clone(), f.values.clone()),
        Field::Planar(f) => {
            let (r0, r1) = match f.domain {
                Domain::Annulus { r0, r1 } => (r0, r1),
                Domain::Ball { r1 } => (T::zero(), r1),
                Domain::Rectangle { .. } => {
                    return Err(Error::ParameterDomain("sphere minima need a radial domain".into()))
                }
            };
            let (a, b) = (r0 + T::lit(2.0) * f.h, r1 - T::lit(2.0) * f.h);
            let radii: Vec<T> = (0..64).map(|k| a + (b - a) * T::from_count(k) / T::lit(63.0)).collect();
            let curve = sphere_min_curve(field, &radii)?;
            curve.into_iter().unzip()
        }
    };
    let tolerance = T::lit(HADAMARD_TOLERANCE) * norm;
    let mut max_increase = T::neg_infinity();
    let mut max_scaled_decrease = T::neg_infinity();
    for k in 1..radii.len() {
        max_increase = max_increase.max(minima[k] - minima[k - 1]);
        let s0 = radii[k - 1].powf(alpha) * minima[k - 1];
        let s1 = radii[k].powf(alpha) * minima[k];
        max_scaled_decrease = max_scaled_decrease.max(s0 - s1);
    }
    Ok(HadamardReport {
        alpha,
        min_operator_value,
        radii,
        minima,
        max_increase,
        max_scaled_decrease,
        tolerance,
        minima_nonincreasing: max_increase <= tolerance,
        scaled_nondecreasing: max_scaled_decrease <= tolerance,
    })
}

/// Largest `c` with `u ≥ c r^{-α}` at every node.
pub fn fit_lower_bound<T: Real>(field: &Field<T>, alpha: T) -> Result<T> {
    let mut c = T::infinity();
    let mut visit = |r: T, u: T| -> Result<()> {
        if !(u > T::zero()) {
            return Err(Error::NonPositive(format!("field value {u} at radius {r}")));
        }
        c = c.min(u * r.powf(alpha));
        Ok(())
    };
    match field {
        Field::Radial(f) => {
            for (&r, &u) in f.nodes.iter().zip(&f.values) {
                visit(r, u)?;
            }
        }
        Field::Planar(f) => {
            for j in 0..=f.ny {
                for i in 0..=f.nx {
                    if f.interior[f.index(i, j)] {
                        let (x, y) = f.coord(i, j);
                        visit(x.hypot(y), f.value(i, j))?;
                    }
                }
            }
        }
    }
    Ok(c)
}
