//! Sampled checks of the growth hypotheses on a general nonlinearity `f(x, s)`.
//!
//! These are samplers, never certifiers: every report is labelled as
//! sampled evidence.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::exponents::{Outcome, Verdict};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Evaluator `f(|x|, s)`; must be finite and positive.
pub type Evaluator<T> = Arc<dyn Fn(T, T) -> T + Send + Sync>;

#[derive(Clone)]
pub enum Nonlinearity<T> {
    /// `c |x|^{-γ} s^p`
    Power { c: T, gamma: T, p: T },
    Sampled(Evaluator<T>),
}

impl<T: fmt::Display> fmt::Debug for Nonlinearity<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Nonlinearity::Power { c, gamma, p } => {
                write!(f, "Power {{ c: {c}, gamma: {gamma}, p: {p} }}")
            }
            Nonlinearity::Sampled(_) => f.write_str("Sampled(<evaluator>)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct NonlinearitySpec<T: fmt::Display> {
    pub form: Nonlinearity<T>,
    pub epsilon0: T,
    pub r0: T,
}

impl<T: Real> NonlinearitySpec<T> {
    pub fn power(c: T, gamma: T, p: T, epsilon0: T, r0: T) -> Result<Self> {
        if !(c > T::zero()) || !(p > T::one()) || !(gamma < T::lit(2.0)) {
            return Err(Error::ParameterDomain(format!(
                "power nonlinearity needs c > 0, p > 1, gamma < 2 (got c = {c}, p = {p}, gamma = {gamma})"
            )));
        }
        Self::new(Nonlinearity::Power { c, gamma, p }, epsilon0, r0)
    }

    pub fn sampled(f: Evaluator<T>, epsilon0: T, r0: T) -> Result<Self> {
        Self::new(Nonlinearity::Sampled(f), epsilon0, r0)
    }

    fn new(form: Nonlinearity<T>, epsilon0: T, r0: T) -> Result<Self> {
        if !(epsilon0 > T::zero()) || !(r0 > T::zero()) {
            return Err(Error::ParameterDomain("epsilon0 and R0 must be positive".into()));
        }
        Ok(Self { form, epsilon0, r0 })
    }

    fn eval(&self, r: T, s: T) -> Result<T> {
        let v = match &self.form {
            Nonlinearity::Power { c, gamma, p } => *c * r.powf(-*gamma) * s.powf(*p),
            Nonlinearity::Sampled(f) => f(r, s),
        };
        if !v.is_finite() || !(v > T::zero()) {
            return Err(Error::Evaluator {
                radius: r.as_f64(),
                s: s.as_f64(),
                message: format!("value {v} is not finite and positive"),
            });
        }
        Ok(v)
    }
}

/// Log-spaced sampling of `|x| ∈ [R0, r_max]`, `s ∈ [s_min, ε0]`, `t ∈ [t_min, t_max]`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SamplingPlan<T> {
    pub r_max: T,
    pub s_min: T,
    pub t_min: T,
    pub t_max: T,
    pub radii: usize,
    pub levels: usize,
}

impl<T: Real> Default for SamplingPlan<T> {
    fn default() -> Self {
        Self {
            r_max: T::lit(1e4),
            s_min: T::lit(1e-8),
            t_min: T::lit(1e-8),
            t_max: T::lit(1e4),
            radii: 17,
            levels: 33,
        }
    }
}

fn log_space<T: Real>(lo: T, hi: T, count: usize) -> Vec<T> {
    if count <= 1 || hi <= lo {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|k| (a + (b - a) * T::from_count(k) / T::from_count(count - 1)).exp())
        .collect()
}

/// Multiplicative change between the restricted and the full sample that
/// flags a constant as degenerating toward `s → 0` or `|x| → ∞`.
pub const DIVERGENCE_FACTOR: f64 = 2.0;

#[derive(Debug, Clone, Serialize)]
pub struct ConditionResult<T> {
    pub condition: &'static str,
    /// Fitted constant over the full sample (infimum for lower bounds,
    /// supremum for upper bounds).
    pub constant: T,
    /// Same constant on the sub-sample away from `s → 0` and `|x| → ∞`.
    pub restricted_constant: T,
    pub passed: bool,
    /// `(|x|, s, t)` where the extremum is attained (`t` is NaN when unused).
    pub witness: (T, T, T),
}

#[derive(Debug, Clone, Serialize)]
pub struct HypothesisReport<T> {
    pub p: T,
    pub gamma: T,
    pub epsilon0: T,
    pub r0: T,
    pub plan: SamplingPlan<T>,
    /// `f(x,s) ≥ c0 |x|^{-γ} s^p` for small `s`, large `|x|`.
    pub lower_growth: ConditionResult<T>,
    /// `f(x,s)/s ≤ C0 f(x,t)/t` for `s < min(t, ε0)`.
    pub ratio_bound: ConditionResult<T>,
    /// `f(x,s) ≤ C0 |x|^{-γ} s^p` for small `s`, large `|x|`.
    pub upper_growth: ConditionResult<T>,
    pub label: &'static str,
}

pub const SAMPLED_LABEL: &str = "sampled evidence, not certified";

struct Extremum<T> {
    value: T,
    witness: (T, T, T),
}

impl<T: Real> Extremum<T> {
    fn new(minimize: bool) -> Self {
        let v = if minimize { T::infinity() } else { T::neg_infinity() };
        Self { value: v, witness: (T::nan(), T::nan(), T::nan()) }
    }
    fn offer(&mut self, minimize: bool, v: T, w: (T, T, T)) {
        if (minimize && v < self.value) || (!minimize && v > self.value) {
            self.value = v;
            self.witness = w;
        }
    }
}

/// Samples the three growth conditions and reports fitted constants.
pub fn hypothesis_check<T: Real>(
    f: &NonlinearitySpec<T>,
    p: T,
    gamma: T,
    plan: &SamplingPlan<T>,
) -> Result<HypothesisReport<T>> {
    super::exponents::beta_star(p, gamma)?;
    if !(plan.r_max >= f.r0) || !(plan.s_min > T::zero()) || !(plan.s_min < f.epsilon0) {
        return Err(Error::ParameterDomain(
            "sampling plan must satisfy R0 <= r_max and 0 < s_min < epsilon0".into(),
        ));
    }
    if !(plan.t_min > T::zero()) || !(plan.t_max > plan.t_min) {
        return Err(Error::ParameterDomain("sampling plan needs 0 < t_min < t_max".into()));
    }
    let radii = log_space(f.r0, plan.r_max, plan.radii);
    let ss = log_space(plan.s_min, f.epsilon0, plan.levels);
    let ts = log_space(plan.t_min, plan.t_max, plan.levels);
    let r_mid = (f.r0 * plan.r_max).sqrt();
    let s_mid = (plan.s_min * f.epsilon0).sqrt();
    let restricted = |r: T, s: T| r <= r_mid && s >= s_mid;

    let mut lower = (Extremum::new(true), Extremum::new(true));
    let mut upper = (Extremum::new(false), Extremum::new(false));
    let mut ratio = (Extremum::new(false), Extremum::new(false));
    let nan = T::nan();
    for &r in &radii {
        let weight = r.powf(gamma);
        for &s in &ss {
            let v = f.eval(r, s)? * weight / s.powf(p);
            lower.0.offer(true, v, (r, s, nan));
            upper.0.offer(false, v, (r, s, nan));
            if restricted(r, s) {
                lower.1.offer(true, v, (r, s, nan));
                upper.1.offer(false, v, (r, s, nan));
            }
        }
        for &t in &ts {
            let ft = f.eval(r, t)? / t;
            for &s in ss.iter().filter(|&&s| s <= t) {
                let q = (f.eval(r, s)? / s) / ft;
                ratio.0.offer(false, q, (r, s, t));
                if restricted(r, s) {
                    ratio.1.offer(false, q, (r, s, t));
                }
            }
        }
    }
    let factor = T::lit(DIVERGENCE_FACTOR);
    let finish_lower = |name, (full, part): (Extremum<T>, Extremum<T>)| ConditionResult {
        condition: name,
        passed: full.value > T::zero() && full.value.is_finite() && full.value * factor >= part.value,
        constant: full.value,
        restricted_constant: part.value,
        witness: full.witness,
    };
    let finish_upper = |name, (full, part): (Extremum<T>, Extremum<T>)| ConditionResult {
        condition: name,
        passed: full.value.is_finite() && full.value <= part.value * factor,
        constant: full.value,
        restricted_constant: part.value,
        witness: full.witness,
    };
    Ok(HypothesisReport {
        p,
        gamma,
        epsilon0: f.epsilon0,
        r0: f.r0,
        plan: *plan,
        lower_growth: finish_lower("lower_growth", lower),
        ratio_bound: finish_upper("ratio_bound", ratio),
        upper_growth: finish_upper("upper_growth", upper),
        label: SAMPLED_LABEL,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SampledVerdict<T> {
    pub outcome: Outcome,
    pub alpha_star: T,
    pub beta_star: T,
    /// Whether the sampled hypotheses of the relevant branch all passed.
    pub hypotheses_hold: bool,
    pub conclusion: String,
    pub label: &'static str,
}

/// Combines a classification with sampled hypotheses for a general `f`.
pub fn sampled_verdict<T: Real>(report: &HypothesisReport<T>, verdict: &Verdict<T>) -> SampledVerdict<T> {
    let (holds, conclusion) = match verdict.outcome {
        Outcome::NonexistenceExterior => {
            let ok = report.lower_growth.passed && report.ratio_bound.passed;
            (
                ok,
                if ok {
                    "no positive supersolution in any exterior domain".to_string()
                } else {
                    "nonexistence hypotheses not supported by the sample; no conclusion".to_string()
                },
            )
        }
        Outcome::ExistenceSupersolution => {
            let ok = report.upper_growth.passed;
            (
                ok,
                if ok {
                    "a positive supersolution exists outside B_R0".to_string()
                } else {
                    "existence hypothesis not supported by the sample; no conclusion".to_string()
                },
            )
        }
    };
    SampledVerdict {
        outcome: verdict.outcome,
        alpha_star: verdict.alpha_star,
        beta_star: verdict.beta_star,
        hypotheses_hold: holds,
        conclusion,
        label: SAMPLED_LABEL,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan() -> SamplingPlan<f64> {
        SamplingPlan::default()
    }

    #[test]
    fn identity_case() {
        let f = NonlinearitySpec::power(1.0, 1.0, 2.0, 1.0, 1.0).unwrap();
        let r = hypothesis_check(&f, 2.0, 1.0, &plan()).unwrap();
        for c in [&r.lower_growth, &r.ratio_bound, &r.upper_growth] {
            assert!(c.passed, "{c:?}");
            assert!((c.constant - 1.0).abs() < 1e-12, "{c:?}");
        }
        assert_eq!(r.label, SAMPLED_LABEL);
    }

    #[test]
    fn polynomial_lower_growth() {
        let f = NonlinearitySpec::sampled(Arc::new(|_r: f64, s: f64| s * s + s * s * s), 1.0, 1.0).unwrap();
        let r = hypothesis_check(&f, 2.0, 0.0, &plan()).unwrap();
        assert!(r.lower_growth.passed);
        assert!((r.lower_growth.constant - 1.0).abs() < 1e-6);
    }

    #[test]
    fn sqrt_ratio_diverges() {
        let f = NonlinearitySpec::sampled(Arc::new(|_r: f64, s: f64| s.sqrt()), 1.0, 1.0).unwrap();
        let r = hypothesis_check(&f, 2.0, 0.0, &plan()).unwrap();
        assert!(!r.ratio_bound.passed, "{:?}", r.ratio_bound);
    }

    #[test]
    fn cubic_fails_quadratic_lower_growth() {
        let f = NonlinearitySpec::sampled(Arc::new(|_r: f64, s: f64| s.powi(3)), 1.0, 1.0).unwrap();
        let r = hypothesis_check(&f, 2.0, 0.0, &plan()).unwrap();
        assert!(!r.lower_growth.passed);
        assert!(r.upper_growth.passed);
    }

    #[test]
    fn evaluator_failure_reported() {
        let f = NonlinearitySpec::sampled(Arc::new(|_r: f64, s: f64| s - 0.5), 1.0, 1.0).unwrap();
        assert!(matches!(hypothesis_check(&f, 2.0, 0.0, &plan()), Err(Error::Evaluator { .. })));
    }
}
