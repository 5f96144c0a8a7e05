//! Direct solvers for the linear systems produced by frozen policies.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Thomas algorithm for `lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]`.
pub fn solve_tridiagonal<T: Real>(lower: &[T], diag: &[T], upper: &[T], rhs: &[T]) -> Result<Vec<T>> {
    let n = diag.len();
    let mut c = vec![T::zero(); n];
    let mut d = vec![T::zero(); n];
    let mut denom = diag[0];
    if denom == T::zero() || !denom.is_finite() {
        return Err(Error::Singular(0));
    }
    c[0] = upper[0] / denom;
    d[0] = rhs[0] / denom;
    for i in 1..n {
        denom = diag[i] - lower[i] * c[i - 1];
        if denom == T::zero() || !denom.is_finite() {
            return Err(Error::Singular(i));
        }
        c[i] = if i + 1 < n { upper[i] / denom } else { T::zero() };
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / denom;
    }
    for i in (0..n - 1).rev() {
        let next = d[i + 1];
        d[i] -= c[i] * next;
    }
    Ok(d)
}

/// Square banded matrix with equal lower and upper bandwidth.
#[derive(Debug, Clone)]
pub struct Banded<T> {
    n: usize,
    bw: usize,
    data: Vec<T>,
}

impl<T: Real> Banded<T> {
    pub fn zeros(n: usize, bw: usize) -> Self {
        Self { n, bw, data: vec![T::zero(); n * (2 * bw + 1)] }
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(i.abs_diff(j) <= self.bw);
        i * (2 * self.bw + 1) + (j + self.bw - i)
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, x: T) {
        let k = self.slot(i, j);
        self.data[k] += x;
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        if i.abs_diff(j) > self.bw {
            T::zero()
        } else {
            self.data[self.slot(i, j)]
        }
    }

    /// Gaussian elimination without pivoting; intended for the M-matrices of
    /// monotone schemes. Consumes the matrix.
    pub fn solve(mut self, rhs: &[T]) -> Result<Vec<T>> {
        let (n, bw) = (self.n, self.bw);
        let mut x = rhs.to_vec();
        for k in 0..n {
            let piv = self.data[self.slot(k, k)];
            if piv == T::zero() || !piv.is_finite() {
                return Err(Error::Singular(k));
            }
            let last = (k + bw).min(n - 1);
            for i in (k + 1)..=last {
                let sik = self.slot(i, k);
                let factor = self.data[sik] / piv;
                if factor == T::zero() {
                    continue;
                }
                self.data[sik] = T::zero();
                for j in (k + 1)..=last {
                    let skj = self.slot(k, j);
                    let sij = self.slot(i, j);
                    let v = self.data[skj];
                    self.data[sij] -= factor * v;
                }
                let xk = x[k];
                x[i] -= factor * xk;
            }
        }
        for k in (0..n).rev() {
            let last = (k + bw).min(n - 1);
            let mut s = x[k];
            for j in (k + 1)..=last {
                s -= self.data[self.slot(k, j)] * x[j];
            }
            x[k] = s / self.data[self.slot(k, k)];
        }
        Ok(x)
    }
}

/// Dense LU with partial pivoting; `a` is row-major `n × n`.
pub fn solve_dense<T: Real>(mut a: Vec<Vec<T>>, mut b: Vec<T>) -> Result<Vec<T>> {
    let n = b.len();
    for k in 0..n {
        let piv = (k..n)
            .max_by(|&i, &j| a[i][k].abs().partial_cmp(&a[j][k].abs()).unwrap_or(std::cmp::Ordering::Equal))
            .unwrap_or(k);
        if a[piv][k] == T::zero() || !a[piv][k].is_finite() {
            return Err(Error::Singular(k));
        }
        a.swap(k, piv);
        b.swap(k, piv);
        for i in (k + 1)..n {
            let f = a[i][k] / a[k][k];
            if f == T::zero() {
                continue;
            }
            for j in k..n {
                let v = a[k][j];
                a[i][j] -= f * v;
            }
            let bk = b[k];
            b[i] -= f * bk;
        }
    }
    for k in (0..n).rev() {
        let mut s = b[k];
        for j in (k + 1)..n {
            s -= a[k][j] * b[j];
        }
        b[k] = s / a[k][k];
    }
    Ok(b)
}
