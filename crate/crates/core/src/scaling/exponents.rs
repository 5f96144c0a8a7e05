use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matcore::{radial_hessian, EllipticOperator, SymMatrix};
use crate::scalar::Real;

/// Default bisection tolerance on `α`.
pub const ALPHA_TOL: f64 = 1e-12;
/// Roots with `|α*|` below this are reported as the logarithmic case.
pub const LOG_CASE_THRESHOLD: f64 = 1e-9;

/// `2_*(F)`, possibly infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CriticalExponent<T> {
    Finite(T),
    Infinite,
}

impl<T: Real> CriticalExponent<T> {
    pub fn value(self) -> T {
        match self {
            CriticalExponent::Finite(x) => x,
            CriticalExponent::Infinite => T::infinity(),
        }
    }
}

impl<T: Serialize> Serialize for CriticalExponent<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            CriticalExponent::Finite(x) => x.serialize(s),
            CriticalExponent::Infinite => s.serialize_str("inf"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingReport<T> {
    /// Root of the homogeneity indicator; `0` in the logarithmic case.
    pub alpha_star: T,
    /// `true` when `Φ = −log|x|` type (α* = 0).
    pub log_case: bool,
    /// `[(λ/Λ)(n−1) − 1, (Λ/λ)(n−1) − 1]`.
    pub bracket: (T, T),
    /// `(α, ψ(α))` samples across the bracket.
    pub indicator_samples: Vec<(T, T)>,
    /// `ψ(α*)` at the returned root.
    pub indicator_at_root: T,
    pub critical_exponent: CriticalExponent<T>,
}

fn require_rot_invariant<T: Real>(op: &EllipticOperator<T>, n: usize) -> Result<()> {
    if n != op.dim() {
        return Err(Error::DimensionMismatch { expected: op.dim(), found: n });
    }
    if !op.rot_invariant() {
        return Err(Error::NotRotationallyInvariant);
    }
    Ok(())
}

/// `ξ_α(r)`: `r^{-α}` for `α > 0`, `−log r` for `α = 0`, `−r^{-α}` for `α < 0`.
pub fn xi_alpha<T: Real>(alpha: T, r: T) -> Result<T> {
    if !(r > T::zero()) {
        return Err(Error::ParameterDomain(format!("radius must be positive, got {r}")));
    }
    if !(alpha > -T::one()) {
        return Err(Error::ParameterDomain(format!("alpha must exceed -1, got {alpha}")));
    }
    Ok(if alpha > T::zero() {
        r.powf(-alpha)
    } else if alpha == T::zero() {
        -r.ln()
    } else {
        -r.powf(-alpha)
    })
}

/// `ψ(α) = F(diag(α+1, −1, …, −1))`, which has the sign of `F(D²ξ_α)` at
/// every radius and is strictly decreasing in `α`.
pub fn homogeneity_indicator<T: Real>(op: &EllipticOperator<T>, n: usize, alpha: T) -> Result<T> {
    require_rot_invariant(op, n)?;
    if !(alpha > -T::one()) {
        return Err(Error::ParameterDomain(format!("alpha must exceed -1, got {alpha}")));
    }
    let mut d = vec![-T::one(); n];
    d[0] = alpha + T::one();
    op.eval(&SymMatrix::from_diag(&d)?)
}

/// Bracket containing every admissible scaling exponent.
pub fn alpha_bracket<T: Real>(op: &EllipticOperator<T>, n: usize) -> (T, T) {
    let tang = T::from_count(n - 1);
    let ratio = op.lambda() / op.big_lambda();
    (ratio * tang - T::one(), tang / ratio - T::one())
}

/// Scaling exponent `α*(F)` of a rotationally invariant operator by
/// bisection of the homogeneity indicator on the admissible bracket.
pub fn alpha_star<T: Real>(op: &EllipticOperator<T>, n: usize, tol: T) -> Result<ScalingReport<T>> {
    require_rot_invariant(op, n)?;
    if !(tol > T::zero()) {
        return Err(Error::ParameterDomain(format!("tolerance must be positive, got {tol}")));
    }
    let psi = |a: T| homogeneity_indicator(op, n, a);
    let (lo0, hi0) = alpha_bracket(op, n);
    let samples = (0..=8)
        .map(|k| {
            let a = lo0 + (hi0 - lo0) * T::from_count(k) / T::lit(8.0);
            psi(a).map(|v| (a, v))
        })
        .collect::<Result<Vec<_>>>()?;
    let (psi_lo, psi_hi) = (psi(lo0)?, psi(hi0)?);
    let slack = T::lit(1e-13) * op.big_lambda() * T::from_count(n);
    if psi_lo < -slack || psi_hi > slack {
        return Err(Error::NoSignChange {
            lo: lo0.as_f64(),
            hi: hi0.as_f64(),
            psi_lo: psi_lo.as_f64(),
            psi_hi: psi_hi.as_f64(),
        });
    }
    let tol = tol.max(T::epsilon() * T::lit(8.0) * (T::one() + hi0.abs()));
    let root = if psi_lo <= T::zero() {
        lo0
    } else if psi_hi >= T::zero() {
        hi0
    } else {
        let (mut lo, mut hi) = (lo0, hi0);
        let mut iters = 0;
        while hi - lo > tol && iters < 200 {
            let mid = (lo + hi) / T::lit(2.0);
            let v = psi(mid)?;
            if v == T::zero() {
                lo = mid;
                hi = mid;
                break;
            }
            if v > T::zero() {
                lo = mid;
            } else {
                hi = mid;
            }
            iters += 1;
        }
        (lo + hi) / T::lit(2.0)
    };
    let log_case = root.abs() < T::lit(LOG_CASE_THRESHOLD);
    let alpha = if log_case { T::zero() } else { root };
    Ok(ScalingReport {
        alpha_star: alpha,
        log_case,
        bracket: (lo0, hi0),
        indicator_samples: samples,
        indicator_at_root: psi(root)?,
        critical_exponent: critical_from_alpha(alpha, log_case),
    })
}

pub(crate) fn critical_from_alpha<T: Real>(alpha: T, log_case: bool) -> CriticalExponent<T> {
    if !log_case && alpha > T::zero() {
        CriticalExponent::Finite((alpha + T::lit(2.0)) / alpha)
    } else {
        CriticalExponent::Infinite
    }
}

/// `2_*(F) = (α*+2)/α*` for `α* > 0`, infinite otherwise.
pub fn critical_exponent<T: Real>(op: &EllipticOperator<T>, n: usize) -> Result<CriticalExponent<T>> {
    Ok(alpha_star(op, n, T::lit(ALPHA_TOL))?.critical_exponent)
}

fn check_p_gamma<T: Real>(p: T, gamma: T) -> Result<()> {
    if !(p > T::one()) || !p.is_finite() {
        return Err(Error::ParameterDomain(format!(
            "exponent p = {p} violates the standing assumption p > 1"
        )));
    }
    if !(gamma < T::lit(2.0)) {
        return Err(Error::ParameterDomain(format!(
            "weight exponent gamma = {gamma} violates the standing assumption gamma < 2"
        )));
    }
    Ok(())
}

/// Scaling exponent of `F(D²u) = |x|^{-γ} u^p`: `(2 − γ)/(p − 1)`.
pub fn beta_star<T: Real>(p: T, gamma: T) -> Result<T> {
    check_p_gamma(p, gamma)?;
    Ok((T::lit(2.0) - gamma) / (p - T::one()))
}

/// The constant `K` with `F(D²(r^{-β})) = K r^{-β-2}`.
pub fn k_coefficient<T: Real>(op: &EllipticOperator<T>, n: usize, beta: T) -> Result<T> {
    require_rot_invariant(op, n)?;
    if !(beta > T::zero()) {
        return Err(Error::ParameterDomain(format!("beta must be positive, got {beta}")));
    }
    let one = T::one();
    let h = radial_hessian(n, -beta, beta * (beta + one), one)?;
    op.eval(&h)
}

/// `c` such that `c r^{-β*}` solves `F(D²u) = |x|^{-γ} u^p` off the origin,
/// or `None` when `K(β*) ≤ 0`.
pub fn explicit_constant<T: Real>(op: &EllipticOperator<T>, n: usize, p: T, gamma: T) -> Result<Option<T>> {
    let beta = beta_star(p, gamma)?;
    let k = k_coefficient(op, n, beta)?;
    Ok(if k > T::zero() { Some(k.powf(T::one() / (p - T::one()))) } else { None })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Outcome {
    #[serde(rename = "NONEXISTENCE_EXTERIOR")]
    NonexistenceExterior,
    #[serde(rename = "EXISTENCE_SUPERSOLUTION")]
    ExistenceSupersolution,
}

impl Outcome {
    pub fn label(self) -> &'static str {
        match self {
            Outcome::NonexistenceExterior => "NONEXISTENCE_EXTERIOR",
            Outcome::ExistenceSupersolution => "EXISTENCE_SUPERSOLUTION",
        }
    }
}

const NONEXISTENCE_STATEMENT: &str = "alpha* <= beta*: no nontrivial nonnegative supersolution \
     of F(D^2u) = |x|^-gamma u^p exists in any exterior domain";
const EXISTENCE_STATEMENT: &str = "alpha* > beta*: a positive supersolution exists outside a ball \
     (in all of R^n when gamma <= 0), and for gamma = 0 a positive solution exists in R^n minus the origin";

#[derive(Debug, Clone, Serialize)]
pub struct Verdict<T> {
    pub alpha_star: T,
    pub log_case: bool,
    pub beta_star: T,
    /// `β* − α*`; the outcome is NONEXISTENCE exactly when this is `≥ 0`.
    pub margin: T,
    pub outcome: Outcome,
    pub theorem_cited: &'static str,
}

/// Classification from a known scaling exponent.
pub fn classify_with_alpha<T: Real>(alpha_star: T, log_case: bool, p: T, gamma: T) -> Result<Verdict<T>> {
    let beta = beta_star(p, gamma)?;
    let outcome = if alpha_star <= beta {
        Outcome::NonexistenceExterior
    } else {
        Outcome::ExistenceSupersolution
    };
    Ok(Verdict {
        alpha_star,
        log_case,
        beta_star: beta,
        margin: beta - alpha_star,
        outcome,
        theorem_cited: match outcome {
            Outcome::NonexistenceExterior => NONEXISTENCE_STATEMENT,
            Outcome::ExistenceSupersolution => EXISTENCE_STATEMENT,
        },
    })
}

/// Existence/nonexistence verdict from the comparison of `α*(F)` and `β*(p, γ)`.
pub fn classify<T: Real>(op: &EllipticOperator<T>, n: usize, p: T, gamma: T) -> Result<Verdict<T>> {
    check_p_gamma(p, gamma)?;
    let report = alpha_star(op, n, T::lit(ALPHA_TOL))?;
    classify_with_alpha(report.alpha_star, report.log_case, p, gamma)
}
