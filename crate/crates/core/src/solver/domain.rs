//! Dirichlet problem descriptions.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Radial data `r ↦ value`.
pub type RadialFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;
/// Planar data `(x, y) ↦ value`.
pub type PlanarFn<T> = Arc<dyn Fn(T, T) -> T + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Domain<T> {
    /// `{r0 < |x| < r1}`; in 2D the grid covers the bounding box of the outer disk.
    Annulus { r0: T, r1: T },
    /// `{|x| < r1}`.
    Ball { r1: T },
    Rectangle { x0: T, x1: T, y0: T, y1: T },
}

impl<T: Real> Domain<T> {
    pub fn annulus(r0: T, r1: T) -> Result<Self> {
        if !(r0 > T::zero() && r1 > r0 && r1.is_finite()) {
            return Err(Error::ParameterDomain(format!("annulus needs 0 < r0 < r1, got ({r0}, {r1})")));
        }
        Ok(Self::Annulus { r0, r1 })
    }

    pub fn ball(r1: T) -> Result<Self> {
        if !(r1 > T::zero() && r1.is_finite()) {
            return Err(Error::ParameterDomain(format!("ball radius must be positive, got {r1}")));
        }
        Ok(Self::Ball { r1 })
    }

    pub fn rectangle(x0: T, x1: T, y0: T, y1: T) -> Result<Self> {
        if !(x1 > x0 && y1 > y0 && (x1 - x0).is_finite() && (y1 - y0).is_finite()) {
            return Err(Error::ParameterDomain(format!(
                "rectangle needs x0 < x1, y0 < y1, got [{x0}, {x1}] x [{y0}, {y1}]"
            )));
        }
        Ok(Self::Rectangle { x0, x1, y0, y1 })
    }

    /// Scales the domain by `t > 0`.
    pub fn scaled(&self, t: T) -> Self {
        match *self {
            Self::Annulus { r0, r1 } => Self::Annulus { r0: r0 * t, r1: r1 * t },
            Self::Ball { r1 } => Self::Ball { r1: r1 * t },
            Self::Rectangle { x0, x1, y0, y1 } => Self::Rectangle { x0: x0 * t, x1: x1 * t, y0: y0 * t, y1: y1 * t },
        }
    }
}

/// Node placement for radial grids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    /// Uniform in `log r`; annuli only.
    Log,
    /// Uniform in `r`.
    Uniform,
}

/// `F(D²u) = f(|x|)` in a radial domain of `R^n`, `u = g(|x|)` on the boundary.
#[derive(Clone)]
pub struct RadialProblem<T> {
    pub n: usize,
    pub domain: Domain<T>,
    pub rhs: RadialFn<T>,
    pub boundary: RadialFn<T>,
    pub spacing: Spacing,
}

impl<T: Real> RadialProblem<T> {
    /// Log spacing on annuli, uniform spacing on balls.
    pub fn new(n: usize, domain: Domain<T>, rhs: RadialFn<T>, boundary: RadialFn<T>) -> Result<Self> {
        let spacing = match domain {
            Domain::Annulus { .. } => Spacing::Log,
            Domain::Ball { .. } => Spacing::Uniform,
            Domain::Rectangle { .. } => {
                return Err(Error::ParameterDomain("rectangles are not radial domains".into()))
            }
        };
        if n < 2 || n > crate::matcore::MAX_DIM {
            return Err(Error::ParameterDomain(format!("dimension {n} outside 2..={}", crate::matcore::MAX_DIM)));
        }
        if let Domain::Ball { .. } = domain {
            if !rhs(T::zero()).is_finite() {
                return Err(Error::ParameterDomain("ball problems need a right-hand side bounded at 0".into()));
            }
        }
        Ok(Self { n, domain, rhs, boundary, spacing })
    }

    pub fn with_spacing(mut self, spacing: Spacing) -> Result<Self> {
        if spacing == Spacing::Log && matches!(self.domain, Domain::Ball { .. }) {
            return Err(Error::ParameterDomain("log spacing needs r0 > 0".into()));
        }
        self.spacing = spacing;
        Ok(self)
    }

    /// Homogeneous equation with radial boundary data.
    pub fn homogeneous(n: usize, domain: Domain<T>, boundary: RadialFn<T>) -> Result<Self> {
        Self::new(n, domain, Arc::new(|_| T::zero()), boundary)
    }
}

impl<T: Real> fmt::Debug for RadialProblem<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialProblem")
            .field("n", &self.n)
            .field("domain", &self.domain)
            .field("spacing", &self.spacing)
            .finish_non_exhaustive()
    }
}

/// `F(D²u) = f(x, y)` in a planar domain, `u = g` at grid nodes outside the open domain.
#[derive(Clone)]
pub struct PlanarProblem<T> {
    pub domain: Domain<T>,
    pub rhs: PlanarFn<T>,
    pub boundary: PlanarFn<T>,
}

impl<T: Real> PlanarProblem<T> {
    pub fn new(domain: Domain<T>, rhs: PlanarFn<T>, boundary: PlanarFn<T>) -> Self {
        Self { domain, rhs, boundary }
    }
}

impl<T: Real> fmt::Debug for PlanarProblem<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PlanarProblem").field("domain", &self.domain).finish_non_exhaustive()
    }
}
