//! Principal half-eigenvalue by inverse power iteration.
//!
//! `u_{k+1}` solves `F(D²u_{k+1}) = u_k` with zero boundary data and is
//! normalized in sup-norm; the reciprocal of the normalizing factor converges
//! to `λ₁⁺` for positive eigenfunctions.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matcore::EllipticOperator;
use crate::scalar::{sup_norm, Real};
use crate::solver::planar::{solve_planar_nodal, PlanarGrid};
use crate::solver::radial::{solve_nodal, RadialGrid};
use crate::solver::{Domain, Field, IterationOptions, RadialField, Spacing};

pub const MAX_POWER_ITERATIONS: usize = 500;

#[derive(Debug, Clone, Serialize)]
pub struct EigenResult<T> {
    pub lambda1: T,
    /// Sup-norm 1, positive at interior nodes, zero on the boundary.
    pub eigenfield: Field<T>,
    pub iterations: usize,
    /// Last relative change of the estimate.
    pub drift: T,
    /// Sup-norm of `F(D²φ) - λ₁ φ` at interior nodes.
    pub residual: T,
    pub history: Vec<f64>,
}

/// Positive bump vanishing on the boundary with sup-norm 1.
fn bump<T: Real>(domain: &Domain<T>, x: T, y: T) -> T {
    let two = T::lit(2.0);
    let v = match *domain {
        Domain::Annulus { r0, r1 } => {
            let rho = x.hypot(y);
            (rho - r0).min(r1 - rho) / ((r1 - r0) / two)
        }
        Domain::Ball { r1 } => (r1 - x.hypot(y)) / r1,
        Domain::Rectangle { x0, x1, y0, y1 } => {
            let half = (x1 - x0).min(y1 - y0) / two;
            (x - x0).min(x1 - x).min(y - y0).min(y1 - y) / half
        }
    };
    v.max(T::zero())
}

struct PowerState<T> {
    lambda: T,
    drift: T,
    residual: T,
    iterations: usize,
    history: Vec<f64>,
}

/// Runs the iteration given a solver `solve(rhs, warm) -> values` on a nodal vector
/// and the set of interior nodes.
fn power_iterate<T: Real>(
    mut u: Vec<T>,
    interior: &[bool],
    tol: T,
    mut solve: impl FnMut(&[T], Option<Vec<T>>) -> Result<Vec<T>>,
) -> Result<(Vec<T>, PowerState<T>)> {
    let mut lambda_prev = T::nan();
    let mut warm: Option<Vec<T>> = None;
    let mut history = Vec::new();
    let mut last_residual = T::nan();
    for it in 1..=MAX_POWER_ITERATIONS {
        let w = solve(&u, warm.take())?;
        if let Some((k, v)) = w.iter().enumerate().find(|&(k, &v)| interior[k] && !(v > T::zero())) {
            return Err(Error::NonPositive(format!(
                "iterate {it} has value {v} at interior node {k}; the discretization lost positivity"
            )));
        }
        let norm = sup_norm(&w);
        let lambda = T::one() / norm;
        let next: Vec<T> = w.iter().map(|&v| v / norm).collect();
        // F(D²φ) = λ_prev-scaled input: F(D²(w/‖w‖)) = u / ‖w‖ = λ u.
        let residual = u
            .iter()
            .zip(&next)
            .zip(interior)
            .filter(|(_, &i)| i)
            .fold(T::zero(), |m, ((&a, &b), _)| m.max((lambda * (a - b)).abs()));
        let drift = ((lambda - lambda_prev) / lambda).abs();
        history.push(lambda.as_f64());
        let done = drift <= tol && residual <= T::lit(10.0) * tol * lambda;
        warm = Some(next.iter().map(|&v| v * norm).collect());
        u = next;
        lambda_prev = lambda;
        last_residual = residual;
        if done {
            return Ok((u, PowerState { lambda, drift, residual, iterations: it, history }));
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_POWER_ITERATIONS,
        last_residual: last_residual.as_f64(),
        history,
    })
}

/// Radial path on annuli and balls of `R^n`, `n = op.dim()`.
pub fn principal_eigenvalue_radial<T: Real>(
    op: &EllipticOperator<T>,
    domain: Domain<T>,
    cells: usize,
    tol: T,
) -> Result<EigenResult<T>> {
    check_tol(tol)?;
    let spacing = match domain {
        Domain::Annulus { .. } => Spacing::Log,
        _ => Spacing::Uniform,
    };
    let grid = RadialGrid::for_operator(op, domain, spacing, cells)?;
    let interior: Vec<bool> = (0..grid.nodes.len()).map(|i| grid.unknowns().contains(&i)).collect();
    let u0: Vec<T> =
        grid.nodes.iter().zip(&interior).map(|(&r, &i)| if i { bump(&domain, r, T::zero()) } else { T::zero() }).collect();
    let opts = IterationOptions { min_iterations: 1, ..IterationOptions::default() };
    let (u, st) = power_iterate(u0, &interior, tol, |rhs, warm| {
        solve_nodal(op, &grid, rhs.to_vec(), T::zero(), T::zero(), warm, &opts).map(|r| r.0)
    })?;
    let field = RadialField::new(op.dim(), domain, spacing, grid.nodes.clone(), u)?;
    Ok(EigenResult {
        lambda1: st.lambda,
        eigenfield: Field::Radial(field),
        iterations: st.iterations,
        drift: st.drift,
        residual: st.residual,
        history: st.history,
    })
}

/// Planar path with spacing `h = width / cells`.
pub fn principal_eigenvalue_2d<T: Real>(
    op: &EllipticOperator<T>,
    domain: Domain<T>,
    cells: usize,
    tol: T,
) -> Result<EigenResult<T>> {
    check_tol(tol)?;
    let width = match domain {
        Domain::Annulus { r1, .. } | Domain::Ball { r1 } => r1 + r1,
        Domain::Rectangle { x0, x1, .. } => x1 - x0,
    };
    let grid = PlanarGrid::build(domain, width / T::from_count(cells.max(1)))?;
    let interior: Vec<bool> = grid.slot.iter().map(Option::is_some).collect();
    let u0: Vec<T> = (0..interior.len())
        .map(|k| {
            if interior[k] {
                let (x, y) = grid.coord(k);
                bump(&domain, x, y)
            } else {
                T::zero()
            }
        })
        .collect();
    let opts = IterationOptions { min_iterations: 1, ..IterationOptions::default() };
    let zeros = vec![T::zero(); interior.len()];
    let (u, st) = power_iterate(u0, &interior, tol, |rhs, warm| {
        let f = grid.nodes.iter().map(|&k| rhs[k]).collect();
        solve_planar_nodal(op, &grid, zeros.clone(), f, warm, &opts).map(|r| r.0)
    })?;
    Ok(EigenResult {
        lambda1: st.lambda,
        eigenfield: Field::Planar(grid.field(u)),
        iterations: st.iterations,
        drift: st.drift,
        residual: st.residual,
        history: st.history,
    })
}

/// Radial path for rotationally invariant operators on annuli and balls,
/// planar path otherwise (`n = 2`).
pub fn principal_eigenvalue<T: Real>(
    op: &EllipticOperator<T>,
    domain: Domain<T>,
    cells: usize,
    tol: T,
) -> Result<EigenResult<T>> {
    match domain {
        Domain::Rectangle { .. } => principal_eigenvalue_2d(op, domain, cells, tol),
        _ if op.rot_invariant() => principal_eigenvalue_radial(op, domain, cells, tol),
        _ => principal_eigenvalue_2d(op, domain, cells, tol),
    }
}

fn check_tol<T: Real>(tol: T) -> Result<()> {
    if !(tol > T::zero()) {
        return Err(Error::ParameterDomain(format!("tolerance must be positive, got {tol}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenScalingReport<T> {
    pub sigma: T,
    pub lambda_base: T,
    pub lambda_scaled: T,
    /// `λ₁(Ω) / λ₁(σΩ)`, expected to equal `σ²`.
    pub ratio: T,
    pub expected: T,
    pub relative_error: T,
    pub tolerance: T,
    pub passed: bool,
}

/// Compares `λ₁(σ Ω)` with `σ⁻² λ₁(Ω)` on the same number of cells.
pub fn eigen_scaling_check<T: Real>(
    op: &EllipticOperator<T>,
    domain: Domain<T>,
    sigma: T,
    cells: usize,
    tol: T,
    tolerance: T,
) -> Result<EigenScalingReport<T>> {
    if !(sigma > T::zero() && sigma.is_finite()) {
        return Err(Error::ParameterDomain(format!("scale factor must be positive, got {sigma}")));
    }
    let base = principal_eigenvalue(op, domain, cells, tol)?.lambda1;
    let scaled = principal_eigenvalue(op, domain.scaled(sigma), cells, tol)?.lambda1;
    let ratio = base / scaled;
    let expected = sigma * sigma;
    let relative_error = ((ratio - expected) / expected).abs();
    Ok(EigenScalingReport {
        sigma,
        lambda_base: base,
        lambda_scaled: scaled,
        ratio,
        expected,
        relative_error,
        tolerance,
        passed: relative_error <= tolerance,
    })
}
