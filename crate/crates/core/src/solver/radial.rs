//! Radial reduction on annuli and balls.
//!
//! With `s = log r` a radial function has `D²u = r⁻² diag(u_ss - u_s, u_s, …, u_s)`;
//! on uniform-`r` grids `D²u = diag(u_rr, u_r / r, …)`. The ball center uses
//! the symmetric ghost node `u(-h) = u(h)`.

use serde::Serialize;

use super::domain::{Domain, RadialProblem, Spacing};
use super::field::RadialField;
use super::policy::{policy_iterate, IterationOptions, PolicySystem, SolveStats};
use crate::error::{Error, Result};
use crate::matcore::EllipticOperator;
use crate::scalar::{sup_norm, Real};

/// Solver output together with its iteration record.
#[derive(Debug, Clone, Serialize)]
pub struct Solved<F> {
    pub field: F,
    pub stats: SolveStats,
}

/// `D²u ≈ scale · diag(a·u, b·u, …)` with `a, b` acting on `(u[i-1], u[i], u[i+1])`.
#[derive(Debug, Clone, Copy)]
struct Stencil<T> {
    scale: T,
    a: [T; 3],
    b: [T; 3],
}

#[derive(Debug, Clone)]
pub(crate) struct RadialGrid<T> {
    pub(crate) n: usize,
    pub(crate) nodes: Vec<T>,
    /// 0 on balls (center is an unknown), 1 on annuli.
    pub(crate) first: usize,
    stencils: Vec<Stencil<T>>,
}

/// Smallest value of `c_a x + c_b y` over the ellipticity box.
fn box_min<T: Real>(x: T, y: T, lambda: T, big: T, tang: T) -> T {
    let ca = if x > T::zero() { lambda } else { big };
    let cb = tang * if y > T::zero() { lambda } else { big };
    ca * x + cb * y
}

impl<T: Real> RadialGrid<T> {
    pub(crate) fn build(
        n: usize,
        domain: Domain<T>,
        spacing: Spacing,
        cells: usize,
        lambda: T,
        big: T,
    ) -> Result<Self> {
        if cells < 2 {
            return Err(Error::ParameterDomain(format!("need at least 2 cells, got {cells}")));
        }
        let tang = T::from_count(n - 1);
        let two = T::lit(2.0);
        let m = T::from_count(cells);
        let (nodes, first, h) = match (domain, spacing) {
            (Domain::Annulus { r0, r1 }, Spacing::Log) => {
                let h = (r1 / r0).ln() / m;
                let mut nodes: Vec<T> = (0..=cells).map(|i| r0 * (T::from_count(i) * h).exp()).collect();
                nodes[cells] = r1;
                (nodes, 1, h)
            }
            (Domain::Annulus { r0, r1 }, Spacing::Uniform) => {
                let h = (r1 - r0) / m;
                let mut nodes: Vec<T> = (0..=cells).map(|i| r0 + T::from_count(i) * h).collect();
                nodes[cells] = r1;
                (nodes, 1, h)
            }
            (Domain::Ball { r1 }, Spacing::Uniform) => {
                let h = r1 / m;
                let mut nodes: Vec<T> = (0..=cells).map(|i| T::from_count(i) * h).collect();
                nodes[cells] = r1;
                (nodes, 0, h)
            }
            (Domain::Ball { .. }, Spacing::Log) => {
                return Err(Error::ParameterDomain("log spacing needs r0 > 0".into()))
            }
            (Domain::Rectangle { .. }, _) => {
                return Err(Error::ParameterDomain("rectangles are not radial domains".into()))
            }
        };
        let h2 = h * h;
        let mut stencils = Vec::with_capacity(cells - first);
        for i in first..cells {
            let r = nodes[i];
            let st = match spacing {
                Spacing::Log => {
                    let half = T::one() / (two * h);
                    Stencil {
                        scale: T::one() / (r * r),
                        a: [T::one() / h2 + half, -two / h2, T::one() / h2 - half],
                        b: [-half, T::zero(), half],
                    }
                }
                Spacing::Uniform if i == 0 => {
                    let c = two / h2;
                    Stencil { scale: T::one(), a: [T::zero(), -c, c], b: [T::zero(), -c, c] }
                }
                Spacing::Uniform => {
                    let a = [T::one() / h2, -two / h2, T::one() / h2];
                    let centered = [-T::one() / (two * h * r), T::zero(), T::one() / (two * h * r)];
                    let ok = box_min(a[0], centered[0], lambda, big, tang) >= T::zero()
                        && box_min(a[2], centered[2], lambda, big, tang) >= T::zero();
                    let b = if ok {
                        centered
                    } else {
                        [T::zero(), -T::one() / (h * r), T::one() / (h * r)]
                    };
                    Stencil { scale: T::one(), a, b }
                }
            };
            for k in [0, 2] {
                if box_min(st.a[k], st.b[k], lambda, big, tang) < T::zero() {
                    let bound = if big * tang > lambda {
                        format!("{}", two * lambda / (tang * big - lambda))
                    } else {
                        "inf".to_string()
                    };
                    return Err(Error::NonMonotone(format!(
                        "log step h = {h} exceeds the monotone limit {bound} for (n, lambda, Lambda) = ({n}, {lambda}, {big})"
                    )));
                }
            }
            stencils.push(st);
        }
        Ok(Self { n, nodes, first, stencils })
    }

    pub(crate) fn for_operator(op: &EllipticOperator<T>, domain: Domain<T>, spacing: Spacing, cells: usize) -> Result<Self> {
        if !op.rot_invariant() {
            return Err(Error::NotRotationallyInvariant);
        }
        Self::build(op.dim(), domain, spacing, cells, op.lambda(), op.big_lambda())
    }

    pub(crate) fn cells(&self) -> usize {
        self.nodes.len() - 1
    }

    pub(crate) fn unknowns(&self) -> std::ops::Range<usize> {
        self.first..self.cells()
    }

    /// `(a·u, b·u)` at node `i` of a full nodal vector.
    fn differences(&self, i: usize, u: &[T]) -> (T, T, &Stencil<T>) {
        let st = &self.stencils[i - self.first];
        // Rows sum to zero, so act on differences to avoid cancellation.
        let dl = if i == 0 { T::zero() } else { u[i - 1] - u[i] };
        let dr = u[i + 1] - u[i];
        let da = st.a[0] * dl + st.a[2] * dr;
        let db = st.b[0] * dl + st.b[2] * dr;
        (da, db, st)
    }

    /// `F(D²_h u)` at interior node `i`.
    pub(crate) fn apply(&self, op: &EllipticOperator<T>, i: usize, u: &[T]) -> T {
        let (da, db, st) = self.differences(i, u);
        st.scale * op.radial_active(da, db).0
    }

    fn diag_bound(&self, big: T) -> T {
        let tang = T::from_count(self.n - 1);
        self.stencils.iter().fold(T::zero(), |m, st| {
            let s = st.a.iter().fold(T::zero(), |acc, x| acc + x.abs())
                + tang * st.b.iter().fold(T::zero(), |acc, x| acc + x.abs());
            m.max(st.scale * big * s)
        })
    }
}

pub(crate) struct RadialSystem<'a, T> {
    pub(crate) op: &'a EllipticOperator<T>,
    pub(crate) grid: &'a RadialGrid<T>,
    /// Right-hand side at every node (boundary entries unused).
    pub(crate) rhs: Vec<T>,
    pub(crate) inner: T,
    pub(crate) outer: T,
    d_max: T,
    f_max: T,
}

impl<'a, T: Real> RadialSystem<'a, T> {
    pub(crate) fn new(op: &'a EllipticOperator<T>, grid: &'a RadialGrid<T>, rhs: Vec<T>, inner: T, outer: T) -> Self {
        let f_max = grid.unknowns().fold(T::zero(), |m, i| m.max(rhs[i].abs()));
        let d_max = grid.diag_bound(op.big_lambda());
        Self { op, grid, rhs, inner, outer, d_max, f_max }
    }

    pub(crate) fn full(&self, x: &[T]) -> Vec<T> {
        let mut u = Vec::with_capacity(self.grid.nodes.len());
        if self.grid.first == 1 {
            u.push(self.inner);
        }
        u.extend_from_slice(x);
        u.push(self.outer);
        u
    }

    fn initial(&self) -> Vec<T> {
        let g = self.grid;
        g.unknowns()
            .map(|i| {
                if g.first == 0 {
                    self.outer
                } else {
                    let t = T::from_count(i) / T::from_count(g.cells());
                    self.inner + t * (self.outer - self.inner)
                }
            })
            .collect()
    }
}

impl<T: Real> PolicySystem<T> for RadialSystem<'_, T> {
    fn size(&self) -> usize {
        self.grid.unknowns().len()
    }

    fn residual(&self, x: &[T]) -> Vec<T> {
        let u = self.full(x);
        self.grid.unknowns().map(|i| self.grid.apply(self.op, i, &u) - self.rhs[i]).collect()
    }

    fn newton_step(&self, x: &[T]) -> Result<Vec<T>> {
        let u = self.full(x);
        let g = self.grid;
        let m = self.size();
        let (mut lo, mut di, mut up, mut rhs) =
            (vec![T::zero(); m], vec![T::zero(); m], vec![T::zero(); m], vec![T::zero(); m]);
        for (k, i) in g.unknowns().enumerate() {
            let (da, db, st) = g.differences(i, &u);
            let (v, ca, cb) = self.op.radial_active(da, db);
            let c: Vec<T> = (0..3).map(|j| -st.scale * (ca * st.a[j] + cb * st.b[j])).collect();
            rhs[k] = self.rhs[i] - st.scale * v;
            di[k] = c[1];
            if k > 0 {
                lo[k] = c[0];
            }
            if k + 1 < m {
                up[k] = c[2];
            }
        }
        super::linalg::solve_tridiagonal(&lo, &di, &up, &rhs)
    }

    fn scale(&self, x: &[T]) -> T {
        let um = sup_norm(x).max(self.inner.abs()).max(self.outer.abs());
        self.d_max * um + self.f_max
    }
}

/// Solves the nodal system; returns values at every node.
pub(crate) fn solve_nodal<T: Real>(
    op: &EllipticOperator<T>,
    grid: &RadialGrid<T>,
    rhs: Vec<T>,
    inner: T,
    outer: T,
    initial: Option<Vec<T>>,
    opts: &IterationOptions,
) -> Result<(Vec<T>, SolveStats)> {
    let sys = RadialSystem::new(op, grid, rhs, inner, outer);
    let x0 = match initial {
        Some(full) => full[grid.first..grid.cells()].to_vec(),
        None => sys.initial(),
    };
    let (x, stats) = policy_iterate(&sys, x0, opts)?;
    Ok((sys.full(&x), stats))
}

fn check_problem<T: Real>(op: &EllipticOperator<T>, problem: &RadialProblem<T>) -> Result<()> {
    if !op.rot_invariant() {
        return Err(Error::NotRotationallyInvariant);
    }
    if op.dim() != problem.n {
        return Err(Error::DimensionMismatch { expected: problem.n, found: op.dim() });
    }
    Ok(())
}

fn boundary_values<T: Real>(problem: &RadialProblem<T>, grid: &RadialGrid<T>) -> (T, T) {
    let inner = if grid.first == 1 { (problem.boundary)(grid.nodes[0]) } else { T::zero() };
    (inner, (problem.boundary)(grid.nodes[grid.cells()]))
}

pub fn solve_dirichlet_radial<T: Real>(
    op: &EllipticOperator<T>,
    problem: &RadialProblem<T>,
    cells: usize,
) -> Result<Solved<RadialField<T>>> {
    solve_dirichlet_radial_with(op, problem, cells, &IterationOptions::default())
}

pub fn solve_dirichlet_radial_with<T: Real>(
    op: &EllipticOperator<T>,
    problem: &RadialProblem<T>,
    cells: usize,
    opts: &IterationOptions,
) -> Result<Solved<RadialField<T>>> {
    check_problem(op, problem)?;
    let grid = RadialGrid::for_operator(op, problem.domain, problem.spacing, cells)?;
    let rhs: Vec<T> = grid.nodes.iter().map(|&r| (problem.rhs)(r)).collect();
    let (inner, outer) = boundary_values(problem, &grid);
    let (values, stats) = solve_nodal(op, &grid, rhs, inner, outer, None, opts)?;
    let field = RadialField::new(problem.n, problem.domain, problem.spacing, grid.nodes, values)?;
    Ok(Solved { field, stats })
}

/// Sup-norm of `F(D²_h u) - f` over interior nodes.
pub fn residual_norm_radial<T: Real>(
    op: &EllipticOperator<T>,
    field: &RadialField<T>,
    problem: &RadialProblem<T>,
) -> Result<T> {
    check_problem(op, problem)?;
    let grid = RadialGrid::for_operator(op, field.domain, field.spacing, field.cells())?;
    if grid.nodes.len() != field.nodes.len() {
        return Err(Error::DimensionMismatch { expected: grid.nodes.len(), found: field.nodes.len() });
    }
    Ok(grid
        .unknowns()
        .map(|i| (grid.apply(op, i, &field.values) - (problem.rhs)(grid.nodes[i])).abs())
        .fold(T::zero(), T::max))
}
