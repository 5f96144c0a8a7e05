//! Homogeneous profiles `|x|^{-β} ψ(x/|x|)` and the map `A(v) = u` solving
//! `F(D²u) = v^p` off the origin, with `β = 2/(p - 1)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matcore::{EllipticOperator, SymMatrix};
use crate::scalar::{sup_norm, Real};
use crate::scaling::{alpha_star, beta_star, k_coefficient};
use crate::solver::linalg::solve_dense;
use crate::solver::IterationOptions;
use crate::solver::SolveStats;

use super::certificate::standard_grid;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", content = "values", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Psi<T> {
    Constant(T),
    /// Values at `θ_k = 2πk/m` on the unit circle.
    Periodic(Vec<T>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HomogeneousProfile<T> {
    pub beta: T,
    pub n: usize,
    pub psi: Psi<T>,
}

impl<T: Real> HomogeneousProfile<T> {
    pub fn constant(beta: T, n: usize, c: T) -> Result<Self> {
        if !(beta > T::zero()) || !(c >= T::zero()) || !c.is_finite() {
            return Err(Error::ParameterDomain(format!("need beta > 0 and psi >= 0, got beta = {beta}, c = {c}")));
        }
        Ok(Self { beta, n, psi: Psi::Constant(c) })
    }

    pub fn periodic(beta: T, values: Vec<T>) -> Result<Self> {
        if !(beta > T::zero()) {
            return Err(Error::ParameterDomain(format!("beta must be positive, got {beta}")));
        }
        if values.len() < 8 {
            return Err(Error::ParameterDomain("periodic profiles need at least 8 angles".into()));
        }
        if values.iter().any(|v| !(*v >= T::zero()) || !v.is_finite()) {
            return Err(Error::ParameterDomain("profile values must be finite and nonnegative".into()));
        }
        Ok(Self { beta, n: 2, psi: Psi::Periodic(values) })
    }

    /// `max ψ`.
    pub fn norm(&self) -> T {
        match &self.psi {
            Psi::Constant(c) => *c,
            Psi::Periodic(v) => sup_norm(v),
        }
    }

    pub fn min(&self) -> T {
        match &self.psi {
            Psi::Constant(c) => *c,
            Psi::Periodic(v) => v.iter().fold(T::infinity(), |m, &x| m.min(x)),
        }
    }

    /// `t ψ`.
    pub fn scaled(&self, t: T) -> Self {
        let psi = match &self.psi {
            Psi::Constant(c) => Psi::Constant(*c * t),
            Psi::Periodic(v) => Psi::Periodic(v.iter().map(|&x| x * t).collect()),
        };
        Self { psi, ..self.clone() }
    }

    /// `ψ(θ)`, periodic linear interpolation.
    pub fn angular(&self, theta: T) -> T {
        match &self.psi {
            Psi::Constant(c) => *c,
            Psi::Periodic(v) => {
                let m = v.len();
                let t = (theta / T::TAU()).fract();
                let t = if t < T::zero() { t + T::one() } else { t } * T::from_count(m);
                let k = t.floor().to_usize().unwrap_or(0).min(m - 1);
                let w = t - T::from_count(k);
                v[k] * (T::one() - w) + v[(k + 1) % m] * w
            }
        }
    }

    /// `u(x) = |x|^{-β} ψ(x/|x|)`.
    pub fn eval(&self, x: &[T]) -> T {
        let r = x.iter().fold(T::zero(), |s, &v| s + v * v).sqrt();
        let theta = if x.len() >= 2 { x[1].atan2(x[0]) } else { T::zero() };
        r.powf(-self.beta) * self.angular(theta)
    }
}

/// Ambient Hessian at `(cos θ, sin θ)` of `r^{-β} ψ(θ)` from `ψ, ψ', ψ''`:
/// `R H Rᵀ` with `H = [[β(β+1)ψ, -(β+1)ψ'], [-(β+1)ψ', ψ'' - βψ]]` in the polar frame.
pub fn angular_hessian<T: Real>(beta: T, psi: T, dpsi: T, ddpsi: T, theta: T) -> SymMatrix<T> {
    let one = T::one();
    let h = [beta * (beta + one) * psi, -(beta + one) * dpsi, ddpsi - beta * psi];
    let (c, s) = (theta.cos(), theta.sin());
    // R = [e_r e_θ] = [[c, -s], [s, c]].
    let m11 = c * c * h[0] - T::lit(2.0) * c * s * h[1] + s * s * h[2];
    let m12 = c * s * (h[0] - h[2]) + (c * c - s * s) * h[1];
    let m22 = s * s * h[0] + T::lit(2.0) * c * s * h[1] + c * c * h[2];
    SymMatrix::from_packed(2, vec![m11, m12, m22]).expect("2x2 packed")
}

enum Source<T> {
    Fixed(Vec<T>),
    /// `ψ^p` of the unknown itself.
    SelfPower(T),
}

struct AngularSystem<'a, T> {
    op: &'a EllipticOperator<T>,
    beta: T,
    theta: Vec<T>,
    dth: T,
    source: Source<T>,
}

impl<T: Real> AngularSystem<'_, T> {
    fn size(&self) -> usize {
        self.theta.len()
    }

    fn derivatives(&self, psi: &[T], k: usize) -> (T, T) {
        let m = psi.len();
        let (l, r) = (psi[(k + m - 1) % m], psi[(k + 1) % m]);
        let two = T::lit(2.0);
        ((r - l) / (two * self.dth), ((r - psi[k]) + (l - psi[k])) / (self.dth * self.dth))
    }

    fn matrix(&self, psi: &[T], k: usize) -> SymMatrix<T> {
        let (d1, d2) = self.derivatives(psi, k);
        angular_hessian(self.beta, psi[k], d1, d2, self.theta[k])
    }

    fn source(&self, psi: &[T], k: usize) -> T {
        match &self.source {
            Source::Fixed(s) => s[k],
            Source::SelfPower(p) => psi[k].max(T::zero()).powf(*p),
        }
    }
}

impl<T: Real> crate::solver::policy::PolicySystem<T> for AngularSystem<'_, T> {
    fn size(&self) -> usize {
        AngularSystem::size(self)
    }

    fn residual(&self, psi: &[T]) -> Vec<T> {
        (0..self.size()).map(|k| self.op.eval_unchecked(&self.matrix(psi, k)) - self.source(psi, k)).collect()
    }

    fn newton_step(&self, psi: &[T]) -> Result<Vec<T>> {
        let m = self.size();
        let one = T::one();
        let two = T::lit(2.0);
        let (b, bb) = (self.beta, self.beta * (self.beta + one));
        let d2 = self.dth * self.dth;
        let mut jac = vec![vec![T::zero(); m]; m];
        let mut rhs = vec![T::zero(); m];
        for k in 0..m {
            let (v, a) = self.op.active_control(&self.matrix(psi, k))?;
            let (c, s) = (self.theta[k].cos(), self.theta[k].sin());
            // B = Rᵀ A R.
            let (a11, a12, a22) = (a.get(0, 0), a.get(0, 1), a.get(1, 1));
            let b11 = c * c * a11 + two * c * s * a12 + s * s * a22;
            let b12 = -c * s * a11 + (c * c - s * s) * a12 + c * s * a22;
            let b22 = s * s * a11 - two * c * s * a12 + c * c * a22;
            let mut diag = -b11 * bb + b22 * b + two * b22 / d2;
            if let Source::SelfPower(p) = &self.source {
                diag -= *p * psi[k].max(T::zero()).powf(*p - one);
            }
            jac[k][k] += diag;
            jac[k][(k + 1) % m] += (b + one) * b12 / self.dth - b22 / d2;
            jac[k][(k + m - 1) % m] += -(b + one) * b12 / self.dth - b22 / d2;
            rhs[k] = self.source(psi, k) - v;
        }
        solve_dense(jac, rhs)
    }

    fn scale(&self, psi: &[T]) -> T {
        let one = T::one();
        let d = T::lit(4.0) / (self.dth * self.dth) + self.beta * (self.beta + one) + self.beta;
        let s = match &self.source {
            Source::Fixed(s) => sup_norm(s),
            Source::SelfPower(p) => sup_norm(psi).powf(*p),
        };
        self.op.big_lambda() * d * sup_norm(psi) + s
    }
}

fn angles<T: Real>(m: usize) -> Vec<T> {
    (0..m).map(|k| T::TAU() * T::from_count(k) / T::from_count(m)).collect()
}

/// `F(R_θ diag(β(β+1), -β) R_θᵀ)`, the value at constant `ψ ≡ 1` in direction `θ`.
fn directional_k<T: Real>(op: &EllipticOperator<T>, beta: T, theta: T) -> T {
    op.eval_unchecked(&angular_hessian(beta, T::one(), T::zero(), T::zero(), theta))
}

#[derive(Debug, Clone, Serialize)]
pub struct ConeMapReport<T> {
    pub profile: HomogeneousProfile<T>,
    /// Newton record of the angular solve; `None` for closed-form constant profiles.
    pub stats: Option<SolveStats>,
    /// Minimum of a sign-changing angular solution reached by Newton from the
    /// pointwise start, when continuation then found the positive one.
    pub other_basin_min: Option<T>,
}

fn check_beta<T: Real>(beta: T, p: T) -> Result<()> {
    let b = beta_star(p, T::zero())?;
    if (beta - b).abs() > T::lit(1e-12) * b.max(T::one()) {
        return Err(Error::ParameterDomain(format!("profile degree {beta} differs from 2/(p-1) = {b}")));
    }
    Ok(())
}

fn check_below_alpha<T: Real>(op: &EllipticOperator<T>, n: usize, beta: T) -> Result<()> {
    let a = alpha_star(op, n, T::lit(1e-12))?.alpha_star;
    if !(beta < a) {
        return Err(Error::WrongRegime(format!("beta = {beta} is not below alpha* = {a}")));
    }
    Ok(())
}

fn angular_options() -> IterationOptions {
    IterationOptions { max_iterations: 100, ..IterationOptions::default() }
}

/// Solves `F(D²u) = v^p` for `u` of degree `-β`.
pub fn cone_map_a<T: Real>(
    op: &EllipticOperator<T>,
    n: usize,
    p: T,
    v: &HomogeneousProfile<T>,
) -> Result<ConeMapReport<T>> {
    check_beta(v.beta, p)?;
    if v.n != n {
        return Err(Error::DimensionMismatch { expected: n, found: v.n });
    }
    match &v.psi {
        Psi::Constant(c) => {
            let op = op.with_dim(n)?;
            check_below_alpha(&op, n, v.beta)?;
            let k = k_coefficient(&op, n, v.beta)?;
            Ok(ConeMapReport { profile: HomogeneousProfile::constant(v.beta, n, c.powf(p) / k)?, stats: None, other_basin_min: None })
        }
        Psi::Periodic(values) => {
            if n != 2 || op.dim() != 2 {
                return Err(Error::DimensionMismatch { expected: 2, found: op.dim() });
            }
            let source: Vec<T> = values.iter().map(|&x| x.powf(p)).collect();
            let sol = solve_angular_linear(op, v.beta, source)?;
            Ok(ConeMapReport {
                profile: HomogeneousProfile::periodic(v.beta, sol.psi)?,
                stats: Some(sol.stats),
                other_basin_min: sol.other_basin_min,
            })
        }
    }
}

/// Result of an angular solve, with the sign-changing solution Newton reached
/// first when continuation was needed to find the positive one.
struct AngularSolve<T> {
    psi: Vec<T>,
    stats: SolveStats,
    other_basin_min: Option<T>,
}

/// Continuation steps tried in turn when a cold Newton start leaves the cone.
const CONTINUATION_STEPS: [usize; 4] = [8, 16, 32, 64];

/// Angular solve of `F(D²u) = |x|^{-β-2} s(θ)`.
fn solve_angular_linear<T: Real>(op: &EllipticOperator<T>, beta: T, source: Vec<T>) -> Result<AngularSolve<T>> {
    let m = source.len();
    let theta = angles::<T>(m);
    let ks: Vec<T> = theta.iter().map(|&t| directional_k(op, beta, t)).collect();
    if op.rot_invariant() {
        check_below_alpha(op, 2, beta)?;
    } else if let Some(k) = ks.iter().find(|k| !(**k > T::zero())) {
        return Err(Error::WrongRegime(format!(
            "beta = {beta} makes F(D^2 r^-beta) = {k} <= 0 in some direction"
        )));
    }
    if source.iter().all(|&s| s == T::zero()) {
        let stats = SolveStats { iterations: 0, residual_history: vec![0.0], residual: 0.0, tolerance: 0.0 };
        return Ok(AngularSolve { psi: source, stats, other_basin_min: None });
    }
    let positive = |psi: &[T]| psi.iter().all(|x| *x > T::zero());
    let minimum = |psi: &[T]| psi.iter().fold(T::infinity(), |a, &x| a.min(x));
    let system = |s: Vec<T>| AngularSystem { op, beta, dth: T::TAU() / T::from_count(m), theta: theta.clone(), source: Source::Fixed(s) };

    let init: Vec<T> = source.iter().zip(&ks).map(|(&s, &k)| s / k).collect();
    let direct = crate::solver::policy::policy_iterate(&system(source.clone()), init, &angular_options());
    let other_basin_min = match &direct {
        Ok((psi, _)) if positive(psi) => {
            let (psi, stats) = direct.unwrap();
            return Ok(AngularSolve { psi, stats, other_basin_min: None });
        }
        Ok((psi, _)) => Some(minimum(psi)),
        Err(_) => None,
    };

    // Homotopy from the mean source, staying in the positive cone.
    let mean = source.iter().fold(T::zero(), |a, &x| a + x) / T::from_count(m);
    let mut last = direct.err();
    for steps in CONTINUATION_STEPS {
        let mut psi: Vec<T> = ks.iter().map(|&k| mean / k).collect();
        let mut outcome = None;
        for j in 1..=steps {
            let t = T::from_count(j) / T::from_count(steps);
            let s: Vec<T> = source.iter().map(|&x| mean + t * (x - mean)).collect();
            match crate::solver::policy::policy_iterate(&system(s), psi.clone(), &angular_options()) {
                Ok((next, stats)) if positive(&next) => {
                    psi = next;
                    outcome = Some(stats);
                }
                Ok((next, _)) => {
                    last = Some(Error::NonPositive(format!("angular solution has value {}", minimum(&next))));
                    outcome = None;
                    break;
                }
                Err(e) => {
                    last = Some(e);
                    outcome = None;
                    break;
                }
            }
        }
        if let Some(stats) = outcome {
            return Ok(AngularSolve { psi, stats, other_basin_min });
        }
    }
    Err(match (other_basin_min, last) {
        (Some(x), _) => Error::NonPositive(format!("angular solution has value {x}")),
        (None, Some(e)) => e,
        (None, None) => Error::NonPositive("angular solve left the positive cone".into()),
    })
}

/// Newton on the deflated scalar residual `K - c^{p-1}` of `c = c^p / K`.
#[derive(Debug, Clone, Serialize)]
pub struct ScalarNewton<T> {
    pub c: T,
    pub iterations: usize,
    pub trace: Vec<T>,
}

pub fn scalar_newton<T: Real>(k: T, p: T, c0: T) -> Result<ScalarNewton<T>> {
    if !(k > T::zero() && c0 > T::zero() && p > T::one()) {
        return Err(Error::ParameterDomain(format!("need K > 0, c0 > 0, p > 1 (K = {k}, c0 = {c0}, p = {p})")));
    }
    let q = p - T::one();
    let mut c = c0;
    let mut trace = vec![c];
    for it in 1..=60 {
        let phi = k - c.powf(q);
        let dphi = -q * c.powf(q - T::one());
        let mut next = c - phi / dphi;
        if !(next > T::zero()) {
            next = c / T::lit(2.0);
        }
        trace.push(next);
        let done = (next - c).abs() <= T::lit(4.0) * T::epsilon() * next;
        c = next;
        if done || (k - c.powf(q)).abs() <= T::lit(4.0) * T::epsilon() * k {
            return Ok(ScalarNewton { c, iterations: it, trace });
        }
    }
    Err(Error::NoConvergence { iterations: 60, last_residual: (k - c.powf(q)).as_f64(), history: vec![] })
}

const DICHOTOMY: &str = "If beta* = 2/(p-1) lies below alpha*(F), then either F(D^2u) = u^p has a bounded positive \
     solution in all of R^n, or it has a positive solution in R^n minus the origin that is homogeneous of degree -beta*.";
const BRANCH: &str = "homogeneous branch realized: a positive (-beta*)-homogeneous solution was computed; \
     bounded positive solutions in R^n are not excluded";

#[derive(Debug, Clone, Serialize)]
pub struct FixedPointReport<T> {
    pub profile: HomogeneousProfile<T>,
    /// Inner radius of the cone fixed-point argument.
    pub r_bar: T,
    pub norm: T,
    pub bound_holds: bool,
    /// Sup-norm of `r^{β+2}(F(D²u) - u^p)`.
    pub residual: T,
    pub newton_iterations: usize,
    pub newton_trace: Vec<f64>,
    pub dichotomy: &'static str,
    pub branch: &'static str,
}

/// Angular points used by [`fixed_point`] on non-rotationally-invariant planar operators.
pub const ANGULAR_POINTS: usize = 128;

/// Positive solution of `F(D²u) = u^p` of degree `-2/(p-1)`.
pub fn fixed_point<T: Real>(op: &EllipticOperator<T>, n: usize, p: T) -> Result<FixedPointReport<T>> {
    if op.rot_invariant() {
        fixed_point_radial(op, n, p)
    } else if n == 2 {
        fixed_point_angular(op, p, ANGULAR_POINTS, None)
    } else {
        Err(Error::NotRotationallyInvariant)
    }
}

pub fn fixed_point_radial<T: Real>(op: &EllipticOperator<T>, n: usize, p: T) -> Result<FixedPointReport<T>> {
    let op = op.with_dim(n)?;
    let beta = beta_star(p, T::zero())?;
    check_below_alpha(&op, n, beta)?;
    let k = k_coefficient(&op, n, beta)?;
    let newton = scalar_newton(k, p, T::one())?;
    let c = newton.c;
    let profile = HomogeneousProfile::constant(beta, n, c)?;
    let mut residual = T::zero();
    for r in standard_grid::<T>() {
        let u = profile.eval(&[r]);
        let g1 = -beta * c * r.powf(-beta - T::one());
        let g2 = beta * (beta + T::one()) * c * r.powf(-beta - T::lit(2.0));
        let f = op.eval(&crate::matcore::radial_hessian(n, g1, g2, r)?)?;
        residual = residual.max(((f - u.powf(p)) * r.powf(beta + T::lit(2.0))).abs());
    }
    let r_bar = (k / T::lit(2.0)).powf(T::one() / (p - T::one()));
    Ok(FixedPointReport {
        norm: c,
        bound_holds: c > r_bar,
        profile,
        r_bar,
        residual,
        newton_iterations: newton.iterations,
        newton_trace: newton.trace.iter().map(|x| x.as_f64()).collect(),
        dichotomy: DICHOTOMY,
        branch: BRANCH,
    })
}

/// Angular Newton solve in `n = 2` from `start` (default: the pointwise
/// constant solution in each direction).
pub fn fixed_point_angular<T: Real>(
    op: &EllipticOperator<T>,
    p: T,
    points: usize,
    start: Option<Vec<T>>,
) -> Result<FixedPointReport<T>> {
    if op.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: op.dim() });
    }
    if points < 8 {
        return Err(Error::ParameterDomain("angular solves need at least 8 points".into()));
    }
    let beta = beta_star(p, T::zero())?;
    let q = T::one() / (p - T::one());
    // Inner radius from the solution of F(D²v) = |x|^{-β-2}.
    let v = solve_angular_linear(op, beta, vec![T::one(); points])?.psi;
    let vmax = sup_norm(&v).powf(p);
    let vmin = v.iter().fold(T::infinity(), |m, &x| m.min(x));
    let r_bar = (T::one() / (T::lit(2.0) * vmax)).powf(q) * vmin;

    let theta = angles::<T>(points);
    let init = match start {
        Some(s) if s.len() == points => s,
        Some(s) => return Err(Error::DimensionMismatch { expected: points, found: s.len() }),
        None => theta.iter().map(|&t| directional_k(op, beta, t).powf(q)).collect(),
    };
    let sys = AngularSystem { op, beta, dth: T::TAU() / T::from_count(points), theta, source: Source::SelfPower(p) };
    let (psi, stats) = crate::solver::policy::policy_iterate(&sys, init, &angular_options())?;
    if let Some(x) = psi.iter().find(|x| !(**x > T::zero())) {
        return Err(Error::NonPositive(format!("angular fixed point has value {x}; Newton reached the trivial branch")));
    }
    let residual = T::lit(stats.residual);
    let profile = HomogeneousProfile::periodic(beta, psi)?;
    let norm = profile.norm();
    Ok(FixedPointReport {
        norm,
        bound_holds: norm > r_bar,
        profile,
        r_bar,
        residual,
        newton_iterations: stats.iterations,
        newton_trace: stats.residual_history,
        dichotomy: DICHOTOMY,
        branch: BRANCH,
    })
}
