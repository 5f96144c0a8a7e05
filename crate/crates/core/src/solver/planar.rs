//! Nine-point monotone scheme in two dimensions.
//!
//! A control `A` with `a11, a22 ≥ |a12|` splits as
//! `(a11 - |a12|) e1e1ᵀ + (a22 - |a12|) e2e2ᵀ + |a12| ddᵀ`, `d = (1, ±1)`,
//! and each rank-one piece uses its own second difference. For Pucci kinds
//! the supremum over all admissible `A` is computed exactly per node.

use super::domain::{Domain, PlanarProblem};
use super::field::Field2D;
use super::linalg::Banded;
use super::policy::{policy_iterate, IterationOptions, PolicySystem, SolveStats};
use super::radial::Solved;
use crate::error::{Error, Result};
use crate::matcore::{EllipticOperator, OperatorKind};
use crate::scalar::{sup_norm, Real};

/// Offsets `(di, dj)` in the order E, W, N, S, NE, SW, SE, NW.
const NEIGHBORS: [(isize, isize); 8] = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1), (1, -1), (-1, 1)];

/// Second differences `(δxx, δyy, δ++, δ+-)` at a node.
type Diffs<T> = [T; 4];

/// Control stored as `(a11, a12, a22)`.
type Control<T> = [T; 3];

#[derive(Debug, Clone)]
pub(crate) struct PlanarGrid<T> {
    pub(crate) domain: Domain<T>,
    pub(crate) h: T,
    pub(crate) x0: T,
    pub(crate) y0: T,
    pub(crate) nx: usize,
    pub(crate) ny: usize,
    /// Unknown number of each node, if any.
    pub(crate) slot: Vec<Option<usize>>,
    /// Node index of each unknown.
    pub(crate) nodes: Vec<usize>,
    bandwidth: usize,
}

impl<T: Real> PlanarGrid<T> {
    pub(crate) fn build(domain: Domain<T>, h: T) -> Result<Self> {
        if !(h > T::zero() && h.is_finite()) {
            return Err(Error::ParameterDomain(format!("grid spacing must be positive, got {h}")));
        }
        let count = |len: T| -> Result<usize> {
            let c = (len / h).round().to_usize().unwrap_or(0);
            if c < 2 {
                return Err(Error::ParameterDomain(format!("spacing {h} too coarse for length {len}")));
            }
            Ok(c)
        };
        let (x0, y0, nx, ny, hh) = match domain {
            Domain::Rectangle { x0, x1, y0, y1 } => {
                let (nx, ny) = (count(x1 - x0)?, count(y1 - y0)?);
                let hx = (x1 - x0) / T::from_count(nx);
                let hy = (y1 - y0) / T::from_count(ny);
                if (hx - hy).abs() > T::lit(1e-9) * hx {
                    return Err(Error::ParameterDomain(format!(
                        "rectangle sides are not commensurate with h = {h} ({hx} vs {hy})"
                    )));
                }
                (x0, y0, nx, ny, hx)
            }
            Domain::Annulus { r1, .. } | Domain::Ball { r1 } => {
                let n = count(r1 + r1)?;
                (-r1, -r1, n, n, (r1 + r1) / T::from_count(n))
            }
        };
        let mut slot = vec![None; (nx + 1) * (ny + 1)];
        let mut nodes = Vec::new();
        let slack = T::lit(1e-12);
        for j in 0..=ny {
            for i in 0..=nx {
                let x = x0 + T::from_count(i) * hh;
                let y = y0 + T::from_count(j) * hh;
                let inside = match domain {
                    Domain::Rectangle { .. } => i > 0 && i < nx && j > 0 && j < ny,
                    Domain::Annulus { r0, r1 } => {
                        let rho = x.hypot(y);
                        rho > r0 * (T::one() + slack) && rho < r1 * (T::one() - slack)
                    }
                    Domain::Ball { r1 } => x.hypot(y) < r1 * (T::one() - slack),
                };
                if inside {
                    slot[j * (nx + 1) + i] = Some(nodes.len());
                    nodes.push(j * (nx + 1) + i);
                }
            }
        }
        if nodes.is_empty() {
            return Err(Error::ParameterDomain("grid has no interior nodes".into()));
        }
        let mut grid = Self { domain, h: hh, x0, y0, nx, ny, slot, nodes, bandwidth: 0 };
        let mut bw = 0;
        for (k, &node) in grid.nodes.iter().enumerate() {
            for off in NEIGHBORS {
                if let Some(m) = grid.slot[grid.shift(node, off)] {
                    bw = bw.max(k.abs_diff(m));
                }
            }
        }
        grid.bandwidth = bw;
        Ok(grid)
    }

    #[inline]
    fn shift(&self, node: usize, (di, dj): (isize, isize)) -> usize {
        let w = (self.nx + 1) as isize;
        (node as isize + dj * w + di) as usize
    }

    pub(crate) fn coord(&self, node: usize) -> (T, T) {
        let w = self.nx + 1;
        (self.x0 + T::from_count(node % w) * self.h, self.y0 + T::from_count(node / w) * self.h)
    }

    fn diffs(&self, node: usize, u: &[T]) -> Diffs<T> {
        let h2 = self.h * self.h;
        let c = u[node];
        let v = |k: usize| u[self.shift(node, NEIGHBORS[k])] - c;
        [(v(0) + v(1)) / h2, (v(2) + v(3)) / h2, (v(4) + v(5)) / h2, (v(6) + v(7)) / h2]
    }

    pub(crate) fn field(&self, values: Vec<T>) -> Field2D<T> {
        let interior = self.slot.iter().map(Option::is_some).collect();
        Field2D { domain: self.domain, h: self.h, x0: self.x0, y0: self.y0, nx: self.nx, ny: self.ny, values, interior }
    }

    /// `F(D²_h u)` at a node.
    pub(crate) fn apply(&self, op: &EllipticOperator<T>, node: usize, u: &[T]) -> T {
        planar_active(op, &self.diffs(node, u)).0
    }
}

/// `-L_A u` for a frozen control.
fn control_value<T: Real>(a: &Control<T>, d: &Diffs<T>) -> T {
    let off = a[1].abs();
    let diag = if a[1] > T::zero() { d[2] } else { d[3] };
    -((a[0] - off) * d[0] + (a[2] - off) * d[1] + off * diag)
}

/// Exact optimum of `-tr(A H)` over `λ ≤ A ≤ Λ` with `sign · a12 ≥ 0`.
/// `maximize` selects the sup (upper Pucci) or the inf (lower Pucci).
fn pucci_half<T: Real>(h: [T; 3], sign: T, lambda: T, big: T, maximize: bool) -> (T, Control<T>) {
    let weight = |mu: T| if (mu > T::zero()) == maximize { lambda } else { big };
    let two = T::lit(2.0);
    let mean = (h[0] + h[2]) / two;
    let dev = (h[0] - h[2]) / two;
    let rad = dev.hypot(h[1]);
    let (mu1, mu2) = (mean - rad, mean + rad);
    let (w1, w2) = (weight(mu1), weight(mu2));
    let a = if rad == T::zero() {
        [w1, T::zero(), w1]
    } else {
        let c1 = (h[1], mu2 - h[0]);
        let c2 = (mu2 - h[2], h[1]);
        let (vx, vy) = if c1.0.hypot(c1.1) >= c2.0.hypot(c2.1) { c1 } else { c2 };
        let nrm = vx.hypot(vy);
        let (vx, vy) = (vx / nrm, vy / nrm);
        let dw = w2 - w1;
        [w1 + dw * vx * vx, dw * vx * vy, w1 + dw * vy * vy]
    };
    if sign * a[1] >= T::zero() {
        return (-(w1 * mu1 + w2 * mu2), a);
    }
    let (a11, a22) = (weight(h[0]), weight(h[2]));
    (-(a11 * h[0] + a22 * h[2]), [a11, T::zero(), a22])
}

/// Value and active control of the discrete operator at one node.
fn planar_active<T: Real>(op: &EllipticOperator<T>, d: &Diffs<T>) -> (T, Control<T>) {
    match op.kind() {
        OperatorKind::Laplacian => (-(d[0] + d[1]), [T::one(), T::zero(), T::one()]),
        OperatorKind::PucciMax | OperatorKind::PucciMin => {
            let two = T::lit(2.0);
            let base = d[0] + d[1];
            let plus = [d[0], (d[2] - base) / two, d[1]];
            let minus = [d[0], -(d[3] - base) / two, d[1]];
            let maximize = op.kind() == OperatorKind::PucciMax;
            let p = pucci_half(plus, T::one(), op.lambda(), op.big_lambda(), maximize);
            let m = pucci_half(minus, -T::one(), op.lambda(), op.big_lambda(), maximize);
            if (p.0 >= m.0) == maximize {
                p
            } else {
                m
            }
        }
        OperatorKind::Isaacs => {
            let mut best = (T::neg_infinity(), [T::zero(); 3]);
            for fam in op.families() {
                let mut inner = (T::infinity(), [T::zero(); 3]);
                for ctl in fam {
                    let a = [ctl.get(0, 0), ctl.get(0, 1), ctl.get(1, 1)];
                    let v = control_value(&a, d);
                    if v < inner.0 {
                        inner = (v, a);
                    }
                }
                if inner.0 > best.0 {
                    best = inner;
                }
            }
            best
        }
    }
}

/// Rejects operators whose controls are not representable on the stencil.
pub(crate) fn check_stencil<T: Real>(op: &EllipticOperator<T>) -> Result<()> {
    if op.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: op.dim() });
    }
    match op.kind() {
        OperatorKind::Laplacian => Ok(()),
        OperatorKind::PucciMax | OperatorKind::PucciMin => {
            let limit = T::lit(3.0 + 2.0 * std::f64::consts::SQRT_2);
            let ratio = op.big_lambda() / op.lambda();
            if ratio > limit * (T::one() + T::lit(1e-12)) {
                return Err(Error::NonMonotone(format!(
                    "ellipticity ratio Lambda/lambda = {ratio} exceeds {limit}: \
                     matrices with |a12| > min(a11, a22) are admissible"
                )));
            }
            Ok(())
        }
        OperatorKind::Isaacs => {
            let tol = T::lit(1e-12) * op.big_lambda();
            for (i, fam) in op.families().iter().enumerate() {
                for (j, a) in fam.iter().enumerate() {
                    let off = a.get(0, 1).abs();
                    if a.get(0, 0) + tol < off || a.get(1, 1) + tol < off {
                        return Err(Error::NonMonotone(format!(
                            "control matrix families[{i}][{j}] = [[{}, {}], [{}, {}]] is not diagonally dominant",
                            a.get(0, 0),
                            a.get(0, 1),
                            a.get(1, 0),
                            a.get(1, 1)
                        )));
                    }
                }
            }
            Ok(())
        }
    }
}

pub(crate) struct PlanarSystem<'a, T> {
    pub(crate) op: &'a EllipticOperator<T>,
    pub(crate) grid: &'a PlanarGrid<T>,
    /// Boundary values at fixed nodes; unknown entries are overwritten.
    pub(crate) base: Vec<T>,
    /// Right-hand side per unknown.
    pub(crate) rhs: Vec<T>,
    d_max: T,
    fixed_max: T,
}

impl<'a, T: Real> PlanarSystem<'a, T> {
    pub(crate) fn new(op: &'a EllipticOperator<T>, grid: &'a PlanarGrid<T>, base: Vec<T>, rhs: Vec<T>) -> Self {
        let h2 = grid.h * grid.h;
        let d_max = T::lit(8.0) * op.big_lambda() / h2;
        let fixed_max = base
            .iter()
            .zip(&grid.slot)
            .filter(|(_, s)| s.is_none())
            .fold(T::zero(), |m, (v, _)| m.max(v.abs()));
        Self { op, grid, base, rhs, d_max, fixed_max }
    }

    pub(crate) fn full(&self, x: &[T]) -> Vec<T> {
        let mut u = self.base.clone();
        for (k, &node) in self.grid.nodes.iter().enumerate() {
            u[node] = x[k];
        }
        u
    }

    fn initial(&self) -> Vec<T> {
        let lo = self
            .base
            .iter()
            .zip(&self.grid.slot)
            .filter(|(_, s)| s.is_none())
            .fold(T::infinity(), |m, (v, _)| m.min(*v));
        vec![if lo.is_finite() { lo } else { T::zero() }; self.grid.nodes.len()]
    }
}

impl<T: Real> PolicySystem<T> for PlanarSystem<'_, T> {
    fn size(&self) -> usize {
        self.grid.nodes.len()
    }

    fn residual(&self, x: &[T]) -> Vec<T> {
        let u = self.full(x);
        self.grid.nodes.iter().zip(&self.rhs).map(|(&node, &f)| self.grid.apply(self.op, node, &u) - f).collect()
    }

    fn newton_step(&self, x: &[T]) -> Result<Vec<T>> {
        let g = self.grid;
        let u = self.full(x);
        let h2 = g.h * g.h;
        let two = T::lit(2.0);
        let mut mat = Banded::zeros(self.size(), g.bandwidth);
        let mut rhs = vec![T::zero(); self.size()];
        for (k, &node) in g.nodes.iter().enumerate() {
            let (v, a) = planar_active(self.op, &g.diffs(node, &u));
            rhs[k] = self.rhs[k] - v;
            let off = a[1].abs();
            mat.add(k, k, two * (a[0] + a[2] - off) / h2);
            let mut w = [T::zero(); 8];
            w[0] = -(a[0] - off) / h2;
            w[1] = w[0];
            w[2] = -(a[2] - off) / h2;
            w[3] = w[2];
            if a[1] > T::zero() {
                w[4] = -off / h2;
                w[5] = w[4];
            } else {
                w[6] = -off / h2;
                w[7] = w[6];
            }
            for (m, &c) in w.iter().enumerate() {
                if c != T::zero() {
                    if let Some(col) = g.slot[g.shift(node, NEIGHBORS[m])] {
                        mat.add(k, col, c);
                    }
                }
            }
        }
        mat.solve(&rhs)
    }

    fn scale(&self, x: &[T]) -> T {
        self.d_max * sup_norm(x).max(self.fixed_max) + sup_norm(&self.rhs)
    }
}

pub(crate) fn solve_planar_nodal<T: Real>(
    op: &EllipticOperator<T>,
    grid: &PlanarGrid<T>,
    base: Vec<T>,
    rhs: Vec<T>,
    initial: Option<Vec<T>>,
    opts: &IterationOptions,
) -> Result<(Vec<T>, SolveStats)> {
    check_stencil(op)?;
    let sys = PlanarSystem::new(op, grid, base, rhs);
    let x0 = match initial {
        Some(full) => grid.nodes.iter().map(|&n| full[n]).collect(),
        None => sys.initial(),
    };
    let (x, stats) = policy_iterate(&sys, x0, opts)?;
    Ok((sys.full(&x), stats))
}

fn planar_data<T: Real>(grid: &PlanarGrid<T>, problem: &PlanarProblem<T>) -> (Vec<T>, Vec<T>) {
    let base = (0..grid.slot.len())
        .map(|node| {
            if grid.slot[node].is_some() {
                T::zero()
            } else {
                let (x, y) = grid.coord(node);
                (problem.boundary)(x, y)
            }
        })
        .collect();
    let rhs = grid
        .nodes
        .iter()
        .map(|&node| {
            let (x, y) = grid.coord(node);
            (problem.rhs)(x, y)
        })
        .collect();
    (base, rhs)
}

pub fn solve_dirichlet_2d<T: Real>(op: &EllipticOperator<T>, problem: &PlanarProblem<T>, h: T) -> Result<Solved<Field2D<T>>> {
    solve_dirichlet_2d_with(op, problem, h, &IterationOptions::default())
}

pub fn solve_dirichlet_2d_with<T: Real>(
    op: &EllipticOperator<T>,
    problem: &PlanarProblem<T>,
    h: T,
    opts: &IterationOptions,
) -> Result<Solved<Field2D<T>>> {
    check_stencil(op)?;
    let grid = PlanarGrid::build(problem.domain, h)?;
    let (base, rhs) = planar_data(&grid, problem);
    let (values, stats) = solve_planar_nodal(op, &grid, base, rhs, None, opts)?;
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NoConvergence { iterations: stats.iterations, last_residual: f64::NAN, history: stats.residual_history });
    }
    Ok(Solved { field: grid.field(values), stats })
}

/// Sup-norm of `F(D²_h u) - f` over unknown nodes.
pub fn residual_norm_2d<T: Real>(op: &EllipticOperator<T>, field: &Field2D<T>, problem: &PlanarProblem<T>) -> Result<T> {
    check_stencil(op)?;
    let grid = PlanarGrid::build(problem.domain, field.h)?;
    if grid.slot.len() != field.values.len() {
        return Err(Error::DimensionMismatch { expected: grid.slot.len(), found: field.values.len() });
    }
    Ok(grid
        .nodes
        .iter()
        .map(|&node| {
            let (x, y) = grid.coord(node);
            (grid.apply(op, node, &field.values) - (problem.rhs)(x, y)).abs()
        })
        .fold(T::zero(), T::max))
}
