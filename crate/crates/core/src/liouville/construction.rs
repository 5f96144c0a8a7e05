//! Supersolutions in the existence regime: the bent fundamental solution
//! `r^{-β*}` and its patch with a bounded solution near the origin.

use std::sync::Arc;

use serde::Serialize;

use super::certificate::{log_grid, standard_grid};
use super::hadamard::discrete_operator;
use crate::error::{Error, Result};
use crate::matcore::{radial_hessian, EllipticOperator};
use crate::scalar::Real;
use crate::scaling::{alpha_star, beta_star, k_coefficient};
use crate::solver::{solve_dirichlet_radial, Domain, Field, RadialField, RadialProblem};

#[derive(Debug, Clone, Serialize)]
pub struct BendReport<T> {
    pub alpha_star: T,
    pub beta_star: T,
    /// `β*/α*`, in `(0, 1)`.
    pub tau: T,
    /// Largest `c` with `F(D²v) ≥ c |x|^{-γ} v^p` on the log grid, `v = r^{-β*}`.
    pub c: T,
    /// `K(β*)` in closed form.
    pub k_closed_form: T,
    /// `(r, F(D²v) / (r^{-γ} v^p))`.
    pub samples: Vec<(T, T)>,
}

/// `F(D²(κ r^{-β}))` at radius `r`.
fn power_operator<T: Real>(op: &EllipticOperator<T>, n: usize, kappa: T, beta: T, r: T) -> Result<T> {
    let one = T::one();
    let g1 = -beta * kappa * r.powf(-beta - one);
    let g2 = beta * (beta + one) * kappa * r.powf(-beta - T::lit(2.0));
    op.eval(&radial_hessian(n, g1, g2, r)?)
}

fn existence_exponents<T: Real>(op: &EllipticOperator<T>, n: usize, p: T, gamma: T) -> Result<(T, T)> {
    let report = alpha_star(op, n, T::lit(1e-12))?;
    let (a, b) = (report.alpha_star, beta_star(p, gamma)?);
    if !(b > T::zero() && a > b) {
        return Err(Error::WrongRegime(format!("needs alpha* > beta* > 0, got alpha* = {a}, beta* = {b}")));
    }
    Ok((a, b))
}

pub fn bend_fundamental<T: Real>(op: &EllipticOperator<T>, n: usize, p: T, gamma: T) -> Result<BendReport<T>> {
    let op = op.with_dim(n)?;
    let (a, b) = existence_exponents(&op, n, p, gamma)?;
    let mut samples = Vec::new();
    for r in standard_grid::<T>() {
        let lhs = power_operator(&op, n, T::one(), b, r)?;
        let rhs = r.powf(-gamma) * r.powf(-b * p);
        samples.push((r, lhs / rhs));
    }
    let c = samples.iter().fold(T::infinity(), |m, s| m.min(s.1));
    Ok(BendReport { alpha_star: a, beta_star: b, tau: b / a, c, k_closed_form: k_coefficient(&op, n, b)?, samples })
}

/// Radius where one piece hands over to the next.
#[derive(Debug, Clone, Serialize)]
pub struct Interface<T> {
    pub radius: T,
    pub left: T,
    pub right: T,
    pub jump: T,
}

#[derive(Debug, Clone, Serialize)]
pub struct PatchedSupersolution<T> {
    pub n: usize,
    pub p: T,
    pub gamma: T,
    /// Constant right-hand side of the ball problem `F(D²w) = a`, `w = 0` on `|x| = 1`.
    pub a: T,
    /// Solution `w` on the unit ball.
    pub inner: RadialField<T>,
    /// Outer piece `κ r^{-β*}`.
    pub kappa: T,
    pub beta: T,
    /// `u = w` for `r < δ`, `min(v, w)` for `δ ≤ r ≤ 1/3`, `v` beyond.
    pub delta: T,
    pub match_radius: T,
    pub interfaces: [Interface<T>; 2],
    /// Smallest discrete `F(D²w) - |x|^{-γ} w^p` over ball nodes where `w` is active.
    pub inner_residual: T,
    /// Smallest `r^{β+2} (F(D²v) - |x|^{-γ} v^p)` over log-grid radii in `[δ, 100]` where `v` is active.
    pub outer_residual: T,
}

impl<T: Real> PatchedSupersolution<T> {
    pub fn outer_value(&self, r: T) -> T {
        self.kappa * r.powf(-self.beta)
    }

    pub fn eval(&self, r: T) -> Option<T> {
        if r < self.delta {
            self.inner.interpolate(r)
        } else if r <= self.match_radius {
            Some(self.inner.interpolate(r)?.min(self.outer_value(r)))
        } else {
            Some(self.outer_value(r))
        }
    }
}

/// Dyadic levels scanned for `a` and for `κ`.
pub const DYADIC_LEVELS: usize = 40;
/// Shell on which `v < w` is required.
pub const MATCH_SHELL: (f64, f64) = (0.25, 0.5);
pub const MATCH_RADIUS: f64 = 1.0 / 3.0;

/// Builds `min(w, κ r^{-β*})` with `w` a bounded ball solution, giving a
/// positive supersolution of `F(D²u) ≥ |x|^{-γ} u^p` in all of `R^n`.
pub fn build_global_supersolution<T: Real>(
    op: &EllipticOperator<T>,
    n: usize,
    p: T,
    gamma: T,
    cells: usize,
) -> Result<PatchedSupersolution<T>> {
    if gamma > T::zero() {
        return Err(Error::ParameterDomain(format!("the global patch needs gamma <= 0, got {gamma}")));
    }
    let op = op.with_dim(n)?;
    let bend = bend_fundamental(&op, n, p, gamma)?;
    let beta = bend.beta_star;
    let unit = RadialProblem::new(n, Domain::ball(T::one())?, Arc::new(|_| T::one()), Arc::new(|_| T::zero()))?;
    let w1 = solve_dirichlet_radial(&op, &unit, cells)?.field;
    let two = T::lit(2.0);
    // F(D²(a w₁)) = a; accept the first dyadic a with a ≥ r^{-γ} (a w₁)^p on the grid.
    let mut chosen = None;
    for k in 0..=DYADIC_LEVELS {
        let a = two.powi(-(k as i32));
        let ok = w1.nodes.iter().zip(&w1.values).all(|(&r, &w)| a >= r.powf(-gamma) * (a * w).powf(p));
        if ok {
            chosen = Some(a);
            break;
        }
    }
    let a = chosen.ok_or_else(|| Error::WrongRegime("no admissible right-hand side in the dyadic scan".into()))?;
    let w = w1.with_values(w1.values.iter().map(|&v| a * v).collect());
    let w_max = w.values.iter().fold(T::zero(), |m, &v| m.max(v));

    let (s0, s1) = (T::lit(MATCH_SHELL.0), T::lit(MATCH_SHELL.1));
    let k_max = bend.c.powf(T::one() / (p - T::one()));
    let shell: Vec<(T, T)> =
        w.nodes.iter().zip(&w.values).filter(|(&r, _)| r >= s0 && r <= s1).map(|(&r, &v)| (r, v)).collect();
    let mut kappa = None;
    for k in 0..=DYADIC_LEVELS {
        let kap = k_max * two.powi(-(k as i32));
        if shell.iter().all(|&(r, v)| kap * r.powf(-beta) < v) {
            kappa = Some(kap);
            break;
        }
    }
    let kappa = kappa.ok_or_else(|| Error::WrongRegime("no scaling of r^-beta fits below w on the shell".into()))?;
    // v(2δ) > max w ensures w < v on B_{2δ}.
    let delta = (kappa / (w_max * T::lit(1.001))).powf(T::one() / beta) / two;
    let match_radius = T::lit(MATCH_RADIUS);
    let mut patch = PatchedSupersolution {
        n,
        p,
        gamma,
        a,
        inner: w,
        kappa,
        beta,
        delta,
        match_radius,
        interfaces: [
            Interface { radius: delta, left: T::zero(), right: T::zero(), jump: T::zero() },
            Interface { radius: match_radius, left: T::zero(), right: T::zero(), jump: T::zero() },
        ],
        inner_residual: T::infinity(),
        outer_residual: T::infinity(),
    };
    let wd = patch.inner.interpolate(delta).expect("delta inside the ball");
    let mid_d = wd.min(patch.outer_value(delta));
    let wm = patch.inner.interpolate(match_radius).expect("match radius inside the ball");
    let mid_m = wm.min(patch.outer_value(match_radius));
    let vm = patch.outer_value(match_radius);
    patch.interfaces[0] = Interface { radius: delta, left: wd, right: mid_d, jump: (wd - mid_d).abs() };
    patch.interfaces[1] = Interface { radius: match_radius, left: mid_m, right: vm, jump: (mid_m - vm).abs() };

    // Discrete residual of w at the ball nodes where it is the active piece.
    let ops = discrete_operator(&op, &Field::Radial(patch.inner.clone()))?;
    let mut inner_res = T::infinity();
    for (i, fw) in ops.into_iter().enumerate() {
        let (r, v) = (patch.inner.nodes[i], patch.inner.values[i]);
        if r < match_radius && (r < delta || v <= patch.outer_value(r)) {
            let weight = if r > T::zero() { r.powf(-gamma) } else if gamma == T::zero() { T::one() } else { T::zero() };
            inner_res = inner_res.min(fw - weight * v.powf(p));
        }
    }
    let mut outer_res = T::infinity();
    let grid = log_grid(delta, T::lit(100.0), 256);
    for r in grid {
        let active = r > match_radius || patch.inner.interpolate(r).is_none_or(|v| patch.outer_value(r) <= v);
        if r >= delta && active {
            let lhs = power_operator(&op, n, kappa, beta, r)?;
            let rhs = r.powf(-gamma) * patch.outer_value(r).powf(p);
            outer_res = outer_res.min((lhs - rhs) * r.powf(beta + two));
        }
    }
    patch.inner_residual = inner_res;
    patch.outer_residual = outer_res;
    Ok(patch)
}
