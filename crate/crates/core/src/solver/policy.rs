//! Policy iteration for discrete sup-inf systems.
//!
//! Every node residual is a max-min of affine functions of the unknowns.
//! Freezing the active pieces gives a linear system whose solution is the
//! semismooth Newton step; steps that increase the residual are damped.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{sup_norm, Real};

pub(crate) trait PolicySystem<T: Real> {
    fn size(&self) -> usize;
    /// Node residuals at `u`.
    fn residual(&self, u: &[T]) -> Vec<T>;
    /// Correction `δ` solving `J δ = -R(u)`, with `J` the matrix of the policy active at `u`.
    fn newton_step(&self, u: &[T]) -> Result<Vec<T>>;
    /// Operator scale `max_i |diag_i|·‖u‖ + ‖f‖` used to make the tolerance relative.
    fn scale(&self, u: &[T]) -> T;
}

#[derive(Debug, Clone, Copy)]
pub struct IterationOptions {
    pub max_iterations: usize,
    /// Stop when `‖R‖∞ ≤ max(absolute_tolerance, roundoff_factor · ε · scale)`.
    pub absolute_tolerance: f64,
    pub roundoff_factor: f64,
    pub damping: f64,
    pub max_halvings: usize,
    /// Newton steps taken even when the initial iterate already meets the tolerance.
    pub min_iterations: usize,
}

impl Default for IterationOptions {
    fn default() -> Self {
        Self { max_iterations: 200, absolute_tolerance: 1e-10, roundoff_factor: 8.0, damping: 0.5, max_halvings: 12, min_iterations: 0 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveStats {
    pub iterations: usize,
    /// Sup-norm residual before each step and at the returned iterate.
    pub residual_history: Vec<f64>,
    pub residual: f64,
    pub tolerance: f64,
}

pub(crate) fn policy_iterate<T: Real, S: PolicySystem<T>>(
    sys: &S,
    mut u: Vec<T>,
    opts: &IterationOptions,
) -> Result<(Vec<T>, SolveStats)> {
    debug_assert_eq!(u.len(), sys.size());
    let tolerance = |u: &[T]| {
        T::lit(opts.absolute_tolerance).max(T::lit(opts.roundoff_factor) * T::epsilon() * sys.scale(u))
    };
    let mut norm = sup_norm(&sys.residual(&u));
    let mut history = vec![norm.as_f64()];
    for it in 0..opts.max_iterations {
        let tol = tolerance(&u);
        if norm <= tol && it >= opts.min_iterations {
            return Ok((u, SolveStats {
                iterations: it,
                residual: norm.as_f64(),
                tolerance: tol.as_f64(),
                residual_history: history,
            }));
        }
        let delta = sys.newton_step(&u)?;
        let target: Vec<T> = u.iter().zip(&delta).map(|(&a, &d)| a + d).collect();
        let mut next_norm = sup_norm(&sys.residual(&target));
        let mut next = target.clone();
        if !(next_norm <= norm) {
            let mut theta = T::lit(opts.damping);
            for _ in 0..opts.max_halvings {
                let trial: Vec<T> =
                    u.iter().zip(&target).map(|(&a, &b)| a + theta * (b - a)).collect();
                let r = sup_norm(&sys.residual(&trial));
                if r < norm {
                    next = trial;
                    next_norm = r;
                    break;
                }
                theta *= T::lit(opts.damping);
            }
        }
        if !next_norm.is_finite() {
            return Err(Error::NoConvergence {
                iterations: it + 1,
                last_residual: next_norm.as_f64(),
                history,
            });
        }
        u = next;
        norm = next_norm;
        history.push(norm.as_f64());
    }
    let tol = tolerance(&u);
    if norm <= tol {
        return Ok((u, SolveStats {
            iterations: opts.max_iterations,
            residual: norm.as_f64(),
            tolerance: tol.as_f64(),
            residual_history: history,
        }));
    }
    Err(Error::NoConvergence {
        iterations: opts.max_iterations,
        last_residual: norm.as_f64(),
        history,
    })
}
