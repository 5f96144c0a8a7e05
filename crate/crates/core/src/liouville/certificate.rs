//! Quantities of the nonexistence argument: the eigenvalue crossing and the
//! logarithmic correction in the critical case.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matcore::{radial_hessian, EllipticOperator};
use crate::scalar::Real;
use crate::scaling::{alpha_star, classify, Outcome};
use crate::solver::Domain;
use crate::spectral::principal_eigenvalue_radial;

/// Radii where closed-form radial residuals are sampled.
pub const LOG_GRID: (f64, f64, usize) = (1.5, 100.0, 256);

/// `m` points uniform in `log r` on `[a, b]`.
pub fn log_grid<T: Real>(a: T, b: T, m: usize) -> Vec<T> {
    let (la, lb) = (a.ln(), b.ln());
    (0..m)
        .map(|k| {
            if k + 1 == m {
                b
            } else {
                (la + (lb - la) * T::from_count(k) / T::from_count(m - 1)).exp()
            }
        })
        .collect()
}

pub(crate) fn standard_grid<T: Real>() -> Vec<T> {
    log_grid(T::lit(LOG_GRID.0), T::lit(LOG_GRID.1), LOG_GRID.2)
}

/// `α*` and `β*` within this distance count as the critical case.
pub const CRITICAL_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy)]
pub struct CertificateOptions {
    /// Log cells of the eigenvalue solve on the annulus `1 < r < 2`.
    pub cells: usize,
    pub eigen_tol: f64,
    /// Use the `(log σ)^{p-1}` growth when `α* = β*`.
    pub log_improvement: bool,
    pub samples: usize,
}

impl Default for CertificateOptions {
    fn default() -> Self {
        Self { cells: 2048, eigen_tol: 1e-10, log_improvement: true, samples: 64 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", content = "sigma", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Crossing<T> {
    Found(T),
    NoCrossing,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateReport<T> {
    pub alpha_star: T,
    pub beta_star: T,
    pub critical: bool,
    pub log_improvement: bool,
    /// `λ₁⁺(F, B₂ \ B₁)`.
    pub lambda1: T,
    pub c: T,
    /// The constant `c` is supplied by the caller, not derived.
    pub c_is_input: bool,
    /// `min{1, 2^{-γ}} c^{p-1}`.
    pub prefactor: T,
    /// Power of `σ` (strict case) or of `log σ` (critical case) in `μ(σ)`.
    pub exponent: T,
    pub crossing: Crossing<T>,
    pub sigma_max: T,
    pub curve: Vec<(T, T)>,
}

impl<T: Real> CertificateReport<T> {
    pub fn mu(&self, sigma: T) -> T {
        let base = if self.critical && self.log_improvement { sigma.ln().max(T::zero()) } else { sigma };
        self.prefactor * base.powf(self.exponent)
    }

    /// `sigma,mu` rows.
    pub fn curve_csv(&self) -> String {
        let mut s = String::from("sigma,mu\n");
        for (a, b) in &self.curve {
            s.push_str(&format!("{a},{b}\n"));
        }
        s
    }
}

/// Compares the growth `μ(σ)` of the lower bound on `λ₁` forced by a
/// supersolution with the finite eigenvalue of `B₂ \ B₁`, and returns the
/// first scale `σ*` where the two collide.
pub fn nonexistence_certificate<T: Real>(
    op: &EllipticOperator<T>,
    n: usize,
    p: T,
    gamma: T,
    c: T,
    sigma_max: T,
    opts: &CertificateOptions,
) -> Result<CertificateReport<T>> {
    let op = op.with_dim(n)?;
    if !(c > T::zero()) {
        return Err(Error::ParameterDomain(format!("c must be positive, got {c}")));
    }
    if !(sigma_max > T::one()) {
        return Err(Error::ParameterDomain(format!("sigma_max must exceed 1, got {sigma_max}")));
    }
    let verdict = classify(&op, n, p, gamma)?;
    if verdict.outcome != Outcome::NonexistenceExterior {
        return Err(Error::WrongRegime(format!(
            "alpha* = {} > beta* = {}: no certificate applies",
            verdict.alpha_star, verdict.beta_star
        )));
    }
    let (alpha, beta) = (verdict.alpha_star, verdict.beta_star);
    let critical = (alpha - beta).abs() <= T::lit(CRITICAL_TOLERANCE);
    let lambda1 = principal_eigenvalue_radial(&op, Domain::annulus(T::one(), T::lit(2.0))?, opts.cells, T::lit(opts.eigen_tol))?
        .lambda1;
    let one = T::one();
    let pm1 = p - one;
    let prefactor = one.min(T::lit(2.0).powf(-gamma)) * c.powf(pm1);
    let exponent = if critical {
        if opts.log_improvement {
            pm1
        } else {
            T::zero()
        }
    } else {
        (beta - alpha) * pm1
    };
    let mut report = CertificateReport {
        alpha_star: alpha,
        beta_star: beta,
        critical,
        log_improvement: opts.log_improvement,
        lambda1,
        c,
        c_is_input: true,
        prefactor,
        exponent,
        crossing: Crossing::NoCrossing,
        sigma_max,
        curve: Vec::new(),
    };
    report.curve = log_grid(one, sigma_max, opts.samples.max(2)).into_iter().map(|s| (s, report.mu(s))).collect();
    let ratio = lambda1 / prefactor;
    let candidate = if exponent == T::zero() {
        if prefactor > lambda1 {
            Some(one)
        } else {
            None
        }
    } else if critical && opts.log_improvement {
        Some(ratio.powf(one / exponent).exp())
    } else {
        Some(ratio.powf(one / exponent).max(one))
    };
    if let Some(mut s) = candidate {
        let step = one + T::lit(4.0) * T::epsilon();
        while report.mu(s) <= lambda1 && s.is_finite() {
            s *= step;
        }
        if s <= sigma_max {
            report.crossing = Crossing::Found(s);
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct CriticalLogReport<T> {
    pub alpha_star: T,
    /// `sup r^{α*+2} F(D²w)` over the log grid.
    pub c_sup: T,
    pub c_inf: T,
    pub samples: Vec<(T, T)>,
    /// `w(10⁶)`.
    pub w_far: T,
    pub bounded: bool,
}

/// Evaluates `F(D²w)` for `w = r^{-α*} log r` in closed form on the log grid
/// and reports the bounds of `r^{α*+2} F(D²w)`.
pub fn critical_log_check<T: Real>(op: &EllipticOperator<T>, n: usize) -> Result<CriticalLogReport<T>> {
    let op = op.with_dim(n)?;
    let report = alpha_star(&op, n, T::lit(1e-12))?;
    let a = report.alpha_star;
    if report.log_case || !(a > T::zero()) {
        return Err(Error::WrongRegime(format!("critical log check needs alpha* > 0, got {a}")));
    }
    let one = T::one();
    let two = T::lit(2.0);
    let mut samples = Vec::with_capacity(LOG_GRID.2);
    for r in standard_grid::<T>() {
        let l = r.ln();
        let g1 = r.powf(-a - one) * (one - a * l);
        let g2 = r.powf(-a - two) * (-two * a - one + a * (a + one) * l);
        let v = op.eval(&radial_hessian(n, g1, g2, r)?)?;
        samples.push((r, v * r.powf(a + two)));
    }
    let c_sup = samples.iter().fold(T::neg_infinity(), |m, s| m.max(s.1));
    let c_inf = samples.iter().fold(T::infinity(), |m, s| m.min(s.1));
    let far = T::lit(1e6);
    Ok(CriticalLogReport {
        alpha_star: a,
        c_sup,
        c_inf,
        samples,
        w_far: far.powf(-a) * far.ln(),
        bounded: c_sup.is_finite(),
    })
}
