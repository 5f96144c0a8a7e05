//! Analytic scaling exponents, critical exponents and classification.

mod exponents;
mod hypothesis;

pub use exponents::{
    alpha_bracket, alpha_star, beta_star, classify, classify_with_alpha, critical_exponent,
    explicit_constant, homogeneity_indicator, k_coefficient, xi_alpha, CriticalExponent, Outcome,
    ScalingReport, Verdict, ALPHA_TOL, LOG_CASE_THRESHOLD,
};
pub use hypothesis::{
    hypothesis_check, sampled_verdict, ConditionResult, Evaluator, HypothesisReport, Nonlinearity,
    NonlinearitySpec, SampledVerdict, SamplingPlan, DIVERGENCE_FACTOR, SAMPLED_LABEL,
};
