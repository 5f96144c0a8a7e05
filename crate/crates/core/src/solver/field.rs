//! Discrete solutions and their CSV form.

use std::fmt::Write as _;

use serde::Serialize;

use super::domain::{Domain, Spacing};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Radial profile `u(r)` at strictly increasing nodes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialField<T> {
    pub n: usize,
    pub domain: Domain<T>,
    pub spacing: Spacing,
    pub nodes: Vec<T>,
    pub values: Vec<T>,
}

impl<T: Real> RadialField<T> {
    pub fn new(n: usize, domain: Domain<T>, spacing: Spacing, nodes: Vec<T>, values: Vec<T>) -> Result<Self> {
        if nodes.len() < 3 || nodes.len() != values.len() {
            return Err(Error::ParameterDomain(format!(
                "radial field needs >= 3 nodes and one value per node ({} nodes, {} values)",
                nodes.len(),
                values.len()
            )));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::ParameterDomain("radial nodes must be strictly increasing".into()));
        }
        Ok(Self { n, domain, spacing, nodes, values })
    }

    pub fn cells(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Replaces the values, keeping the grid.
    pub fn with_values(&self, values: Vec<T>) -> Self {
        assert_eq!(values.len(), self.nodes.len());
        Self { values, ..self.clone() }
    }

    /// Piecewise-linear interpolation in the grid variable; `None` outside the nodes.
    pub fn interpolate(&self, r: T) -> Option<T> {
        let first = self.nodes[0];
        let last = *self.nodes.last().expect("non-empty");
        if r < first || r > last {
            return None;
        }
        let k = match self.nodes.binary_search_by(|x| x.partial_cmp(&r).expect("finite nodes")) {
            Ok(k) => return Some(self.values[k]),
            Err(k) => k,
        };
        let (a, b) = (self.nodes[k - 1], self.nodes[k]);
        let t = match self.spacing {
            Spacing::Log => (r / a).ln() / (b / a).ln(),
            Spacing::Uniform => (r - a) / (b - a),
        };
        Some(self.values[k - 1] + t * (self.values[k] - self.values[k - 1]))
    }

    pub fn max_error(&self, exact: impl Fn(T) -> T) -> T {
        self.nodes
            .iter()
            .zip(&self.values)
            .fold(T::zero(), |m, (&r, &u)| m.max((u - exact(r)).abs()))
    }

    /// CSV with a `#` metadata line followed by `r,u` rows.
    pub fn to_csv(&self, metadata: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# kind=radial n={} spacing={:?} cells={} {}",
            self.n,
            self.spacing,
            self.cells(),
            metadata
        );
        out.push_str("r,u\n");
        for (r, u) in self.nodes.iter().zip(&self.values) {
            let _ = writeln!(out, "{r},{u}");
        }
        out
    }
}

/// Planar grid function on the index box `0..=nx × 0..=ny`; node `(i, j)` sits at
/// `(x0 + i h, y0 + j h)` and is stored at `j (nx + 1) + i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Field2D<T> {
    pub domain: Domain<T>,
    pub h: T,
    pub x0: T,
    pub y0: T,
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<T>,
    /// Whether each node is an unknown of the discrete problem.
    pub interior: Vec<bool>,
}

impl<T: Real> Field2D<T> {
    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * (self.nx + 1) + i
    }

    pub fn coord(&self, i: usize, j: usize) -> (T, T) {
        (self.x0 + T::from_count(i) * self.h, self.y0 + T::from_count(j) * self.h)
    }

    pub fn value(&self, i: usize, j: usize) -> T {
        self.values[self.index(i, j)]
    }

    pub fn with_values(&self, values: Vec<T>) -> Self {
        assert_eq!(values.len(), self.values.len());
        Self { values, ..self.clone() }
    }

    /// Bilinear interpolation; `None` outside the index box.
    pub fn interpolate(&self, x: T, y: T) -> Option<T> {
        let fx = (x - self.x0) / self.h;
        let fy = (y - self.y0) / self.h;
        let (mx, my) = (T::from_count(self.nx), T::from_count(self.ny));
        if !(fx >= T::zero() && fy >= T::zero() && fx <= mx && fy <= my) {
            return None;
        }
        let i = fx.floor().min(mx - T::one()).to_usize()?;
        let j = fy.floor().min(my - T::one()).to_usize()?;
        let tx = fx - T::from_count(i);
        let ty = fy - T::from_count(j);
        let one = T::one();
        Some(
            (one - tx) * (one - ty) * self.value(i, j)
                + tx * (one - ty) * self.value(i + 1, j)
                + (one - tx) * ty * self.value(i, j + 1)
                + tx * ty * self.value(i + 1, j + 1),
        )
    }

    /// `(min, max)` of the interpolant over `samples` equally spaced points on the circle of radius `rho`.
    pub fn circle_extrema(&self, rho: T, samples: usize) -> Option<(T, T)> {
        let mut lo = T::infinity();
        let mut hi = T::neg_infinity();
        for k in 0..samples {
            let t = T::TAU() * T::from_count(k) / T::from_count(samples);
            let v = self.interpolate(rho * t.cos(), rho * t.sin())?;
            lo = lo.min(v);
            hi = hi.max(v);
        }
        Some((lo, hi))
    }

    /// Max nodal error over unknown nodes.
    pub fn max_error(&self, exact: impl Fn(T, T) -> T) -> T {
        let mut e = T::zero();
        for j in 0..=self.ny {
            for i in 0..=self.nx {
                let k = self.index(i, j);
                if self.interior[k] {
                    let (x, y) = self.coord(i, j);
                    e = e.max((self.values[k] - exact(x, y)).abs());
                }
            }
        }
        e
    }

    /// CSV with a `#` metadata line followed by `x,y,u` rows.
    pub fn to_csv(&self, metadata: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# kind=planar h={} nx={} ny={} {}", self.h, self.nx, self.ny, metadata);
        out.push_str("x,y,u\n");
        for j in 0..=self.ny {
            for i in 0..=self.nx {
                let (x, y) = self.coord(i, j);
                let _ = writeln!(out, "{x},{y},{}", self.value(i, j));
            }
        }
        out
    }
}

/// Either kind of discrete solution.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "grid", rename_all = "snake_case")]
pub enum Field<T> {
    Radial(RadialField<T>),
    Planar(Field2D<T>),
}

impl<T: Real> Field<T> {
    pub fn to_csv(&self, metadata: &str) -> String {
        match self {
            Self::Radial(f) => f.to_csv(metadata),
            Self::Planar(f) => f.to_csv(metadata),
        }
    }

    pub fn values(&self) -> &[T] {
        match self {
            Self::Radial(f) => &f.values,
            Self::Planar(f) => &f.values,
        }
    }
}
