//! Grid-refinement studies and numerical fundamental solutions.

use std::sync::Arc;

use serde::Serialize;

use super::domain::{Domain, PlanarProblem, RadialProblem, Spacing};
use super::field::Field;
use super::planar::solve_dirichlet_2d;
use super::radial::solve_dirichlet_radial;
use crate::error::{Error, Result};
use crate::matcore::EllipticOperator;
use crate::scalar::Real;

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub h: Vec<f64>,
    pub errors: Vec<f64>,
    /// Least-squares slope of `log error` against `log h`; `None` when exact.
    pub order: Option<f64>,
    /// Every error below `1e-12`.
    pub exact: bool,
}

const EXACT_THRESHOLD: f64 = 1e-12;

/// Slope, intercept and RMS residual of `y ≈ a + b x`.
pub(crate) fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let b = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let a = my - b * mx;
    let rms = (x.iter().zip(y).map(|(u, v)| (v - a - b * u).powi(2)).sum::<f64>() / n).sqrt();
    (b, a, rms)
}

fn report(h: Vec<f64>, errors: Vec<f64>) -> ConvergenceReport {
    let exact = errors.iter().all(|&e| e < EXACT_THRESHOLD);
    let pts: Vec<(f64, f64)> =
        h.iter().zip(&errors).filter(|(_, &e)| e > 0.0).map(|(&h, &e)| (h.ln(), e.ln())).collect();
    let order = if exact || pts.len() < 2 {
        None
    } else {
        let (x, y): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
        Some(linear_fit(&x, &y).0)
    };
    ConvergenceReport { h, errors, order, exact }
}

fn radial_step<T: Real>(problem: &RadialProblem<T>, cells: usize) -> f64 {
    let m = cells as f64;
    match (problem.domain, problem.spacing) {
        (Domain::Annulus { r0, r1 }, Spacing::Log) => (r1.as_f64() / r0.as_f64()).ln() / m,
        (Domain::Annulus { r0, r1 }, Spacing::Uniform) => (r1.as_f64() - r0.as_f64()) / m,
        (Domain::Ball { r1 }, _) => r1.as_f64() / m,
        (Domain::Rectangle { .. }, _) => f64::NAN,
    }
}

/// Max nodal error against `exact` for each grid in `cell_counts`.
pub fn convergence_order_radial<T: Real>(
    op: &EllipticOperator<T>,
    problem: &RadialProblem<T>,
    cell_counts: &[usize],
    exact: impl Fn(T) -> T,
) -> Result<ConvergenceReport> {
    if cell_counts.len() < 3 {
        return Err(Error::ParameterDomain(format!("need at least 3 grid levels, got {}", cell_counts.len())));
    }
    let mut h = Vec::new();
    let mut errors = Vec::new();
    for &cells in cell_counts {
        let sol = solve_dirichlet_radial(op, problem, cells)?;
        h.push(radial_step(problem, cells));
        errors.push(sol.field.max_error(&exact).as_f64());
    }
    Ok(report(h, errors))
}

pub fn convergence_order_2d<T: Real>(
    op: &EllipticOperator<T>,
    problem: &PlanarProblem<T>,
    spacings: &[T],
    exact: impl Fn(T, T) -> T,
) -> Result<ConvergenceReport> {
    if spacings.len() < 3 {
        return Err(Error::ParameterDomain(format!("need at least 3 grid levels, got {}", spacings.len())));
    }
    let mut h = Vec::new();
    let mut errors = Vec::new();
    for &s in spacings {
        let sol = solve_dirichlet_2d(op, problem, s)?;
        h.push(sol.field.h.as_f64());
        errors.push(sol.field.max_error(&exact).as_f64());
    }
    Ok(report(h, errors))
}

pub const PROFILE_OUTER_RADIUS: f64 = 16.0;
pub const PROFILE_WINDOW: (f64, f64) = (2.0, 8.0);
/// Largest acceptable RMS residual of the log-derivative fit.
pub const PROFILE_FIT_TOLERANCE: f64 = 0.05;
/// `|α|` below this counts as the logarithmic case.
pub const PROFILE_LOG_THRESHOLD: f64 = 0.01;

#[derive(Debug, Clone, Serialize)]
pub struct ExponentFit {
    pub alpha: f64,
    /// RMS residual of `log|σ m'(σ)|` against `log σ`.
    pub slope_residual: f64,
    /// RMS residuals of `m ≈ A σ^{-α} + B` and `m ≈ A log σ + B`, relative to the range of `m`.
    pub power_residual: f64,
    pub log_residual: f64,
}

/// RMS residual of the two-term least-squares fit `y ≈ A f + B`.
fn two_term_residual(f: &[f64], y: &[f64]) -> f64 {
    let (_, _, rms) = linear_fit(f, y);
    rms
}

/// Fits `m(σ) ~ σ^{-α}` from samples of `m` and of `σ m'(σ)`.
pub(crate) fn fit_exponent(sigma: &[f64], m: &[f64], sigma_dm: &[f64]) -> Result<ExponentFit> {
    let x: Vec<f64> = sigma.iter().map(|s| s.ln()).collect();
    let y: Vec<f64> = sigma_dm.iter().map(|d| d.abs().ln()).collect();
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::FitRejected {
            message: "sphere extrema are not strictly monotone in the fit window".into(),
            power_residual: f64::NAN,
            log_residual: f64::NAN,
        });
    }
    let (slope, _, slope_residual) = linear_fit(&x, &y);
    let alpha = -slope;
    let range = m.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - m.iter().cloned().fold(f64::INFINITY, f64::min);
    let range = if range > 0.0 { range } else { 1.0 };
    let power: Vec<f64> = sigma.iter().map(|s| s.powf(-alpha)).collect();
    let power_residual = two_term_residual(&power, m) / range;
    let log_residual = two_term_residual(&x, m) / range;
    if slope_residual > PROFILE_FIT_TOLERANCE {
        return Err(Error::FitRejected {
            message: format!("log-derivative fit residual {slope_residual:e} exceeds {PROFILE_FIT_TOLERANCE}"),
            power_residual,
            log_residual,
        });
    }
    Ok(ExponentFit { alpha, slope_residual, power_residual, log_residual })
}

#[derive(Debug, Clone, Serialize)]
pub struct FundamentalProfile<T> {
    pub field: Field<T>,
    /// Exponent fitted from the sphere minima.
    pub fitted_alpha: T,
    pub log_case: bool,
    pub fit: ExponentFit,
    /// Exponent fitted from the sphere maxima (planar path only).
    pub alpha_from_max: Option<T>,
    pub sigma: Vec<T>,
    pub min_curve: Vec<T>,
    pub max_curve: Vec<T>,
}

fn is_log_case(fit: &ExponentFit) -> bool {
    fit.alpha.abs() < PROFILE_LOG_THRESHOLD || fit.log_residual < fit.power_residual
}

/// Solves `F(D²u) = 0` in `1 < |x| < 16` with `u = 1` inside and `u = 0` outside,
/// then fits the decay of the sphere minima on `2 ≤ σ ≤ 8`. Rotationally
/// invariant operators use the radial grid with `cells` log cells; other
/// planar operators use the nine-point grid with `h = 32 / cells`.
pub fn fundamental_profile<T: Real>(op: &EllipticOperator<T>, cells: usize) -> Result<FundamentalProfile<T>> {
    if op.rot_invariant() {
        fundamental_profile_radial(op, cells)
    } else if op.dim() == 2 {
        fundamental_profile_2d(op, cells)
    } else {
        Err(Error::NotRotationallyInvariant)
    }
}

pub fn fundamental_profile_radial<T: Real>(op: &EllipticOperator<T>, cells: usize) -> Result<FundamentalProfile<T>> {
    let outer = T::lit(PROFILE_OUTER_RADIUS);
    let domain = Domain::annulus(T::one(), outer)?;
    let problem = RadialProblem::homogeneous(
        op.dim(),
        domain,
        Arc::new(move |r: T| if r < T::lit(2.0) { T::one() } else { T::zero() }),
    )?;
    let sol = solve_dirichlet_radial(op, &problem, cells)?;
    let f = &sol.field;
    let h = (PROFILE_OUTER_RADIUS).ln() / cells as f64;
    let (lo, hi) = PROFILE_WINDOW;
    let idx: Vec<usize> = (1..f.cells())
        .filter(|&i| {
            let r = f.nodes[i].as_f64();
            r >= lo * (1.0 - 1e-12) && r <= hi * (1.0 + 1e-12)
        })
        .collect();
    if idx.len() < 3 {
        return Err(Error::ParameterDomain(format!("{cells} cells leave fewer than 3 nodes in the fit window")));
    }
    let sigma: Vec<f64> = idx.iter().map(|&i| f.nodes[i].as_f64()).collect();
    let m: Vec<f64> = idx.iter().map(|&i| f.values[i].as_f64()).collect();
    let dm: Vec<f64> =
        idx.iter().map(|&i| (f.values[i + 1].as_f64() - f.values[i - 1].as_f64()) / (2.0 * h)).collect();
    let fit = fit_exponent(&sigma, &m, &dm)?;
    let log_case = is_log_case(&fit);
    Ok(FundamentalProfile {
        fitted_alpha: T::lit(fit.alpha),
        log_case,
        fit,
        alpha_from_max: None,
        sigma: idx.iter().map(|&i| f.nodes[i]).collect(),
        min_curve: idx.iter().map(|&i| f.values[i]).collect(),
        max_curve: idx.iter().map(|&i| f.values[i]).collect(),
        field: Field::Radial(sol.field),
    })
}

/// Number of sample radii and angles used on the planar path.
const PLANAR_RADII: usize = 16;
const PLANAR_ANGLES: usize = 256;
const PLANAR_LOG_STEP: f64 = 0.05;

pub fn fundamental_profile_2d<T: Real>(op: &EllipticOperator<T>, cells: usize) -> Result<FundamentalProfile<T>> {
    let outer = T::lit(PROFILE_OUTER_RADIUS);
    let domain = Domain::annulus(T::one(), outer)?;
    let problem = PlanarProblem::new(
        domain,
        Arc::new(|_, _| T::zero()),
        Arc::new(|x: T, y: T| if x.hypot(y) < T::lit(2.0) { T::one() } else { T::zero() }),
    );
    let h = T::lit(2.0 * PROFILE_OUTER_RADIUS / cells as f64);
    let sol = solve_dirichlet_2d(op, &problem, h)?;
    let f = &sol.field;
    let (lo, hi) = PROFILE_WINDOW;
    let sigma: Vec<f64> = (0..PLANAR_RADII)
        .map(|k| lo * (hi / lo).powf(k as f64 / (PLANAR_RADII - 1) as f64))
        .collect();
    let extrema = |s: f64| -> Result<(f64, f64)> {
        f.circle_extrema(T::lit(s), PLANAR_ANGLES)
            .map(|(a, b)| (a.as_f64(), b.as_f64()))
            .ok_or_else(|| Error::ParameterDomain(format!("sample circle {s} leaves the grid")))
    };
    let mut mins = Vec::new();
    let mut maxs = Vec::new();
    let mut dmin = Vec::new();
    let mut dmax = Vec::new();
    let e = PLANAR_LOG_STEP;
    for &s in &sigma {
        let (a, b) = extrema(s)?;
        let (ap, bp) = extrema(s * e.exp())?;
        let (am, bm) = extrema(s * (-e).exp())?;
        mins.push(a);
        maxs.push(b);
        dmin.push((ap - am) / (2.0 * e));
        dmax.push((bp - bm) / (2.0 * e));
    }
    let fit = fit_exponent(&sigma, &mins, &dmin)?;
    let fit_max = fit_exponent(&sigma, &maxs, &dmax)?;
    let log_case = is_log_case(&fit);
    Ok(FundamentalProfile {
        fitted_alpha: T::lit(fit.alpha),
        log_case,
        fit,
        alpha_from_max: Some(T::lit(fit_max.alpha)),
        sigma: sigma.iter().map(|&s| T::lit(s)).collect(),
        min_curve: mins.iter().map(|&v| T::lit(v)).collect(),
        max_curve: maxs.iter().map(|&v| T::lit(v)).collect(),
        field: Field::Planar(sol.field),
    })
}
