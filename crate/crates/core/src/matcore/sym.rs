use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest supported matrix dimension.
pub const MAX_DIM: usize = 8;

/// Small dense symmetric matrix in packed storage (upper triangle, row-major).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymMatrix<T> {
    dim: usize,
    entries: Vec<T>,
}

/// Spectral decomposition `M = V diag(values) Vᵀ` with ascending `values`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymEigen<T> {
    pub values: Vec<T>,
    /// `vectors[k]` is the unit eigenvector for `values[k]`.
    pub vectors: Vec<Vec<T>>,
}

#[inline]
fn packed_len(dim: usize) -> usize {
    dim * (dim + 1) / 2
}

impl<T: Real> SymMatrix<T> {
    fn check_dim(dim: usize) -> Result<()> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::InvalidMatrix(format!(
                "dimension {dim} outside 1..={MAX_DIM}"
            )));
        }
        Ok(())
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::check_dim(dim)?;
        Ok(Self { dim, entries: vec![T::zero(); packed_len(dim)] })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m.set(i, i, T::one());
        }
        Ok(m)
    }

    pub fn from_diag(diag: &[T]) -> Result<Self> {
        let mut m = Self::zeros(diag.len())?;
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, d);
        }
        Ok(m)
    }

    /// Builds from packed upper-triangle entries.
    pub fn from_packed(dim: usize, entries: Vec<T>) -> Result<Self> {
        Self::check_dim(dim)?;
        if entries.len() != packed_len(dim) {
            return Err(Error::InvalidMatrix(format!(
                "expected {} packed entries for dimension {dim}, found {}",
                packed_len(dim),
                entries.len()
            )));
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidMatrix("non-finite entry".into()));
        }
        Ok(Self { dim, entries })
    }

    /// Builds from full rows; the rows must be square and symmetric up to
    /// `1e-12` relative.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let dim = rows.len();
        let mut m = Self::zeros(dim)?;
        let scale = rows
            .iter()
            .flatten()
            .fold(T::one(), |acc, x| acc.max(x.abs()));
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::InvalidMatrix(format!(
                    "row {i} has length {}, expected {dim}",
                    row.len()
                )));
            }
            for (j, &x) in row.iter().enumerate() {
                if !x.is_finite() {
                    return Err(Error::InvalidMatrix(format!("non-finite entry ({i}, {j})")));
                }
                if j >= i {
                    if (x - rows[j][i]).abs() > T::lit(1e-12) * scale {
                        return Err(Error::InvalidMatrix(format!(
                            "not symmetric at ({i}, {j})"
                        )));
                    }
                    m.set(i, j, x);
                }
            }
        }
        Ok(m)
    }

    /// `M = V diag(values) Vᵀ` for column vectors `vectors[k]`.
    pub fn from_spectral(values: &[T], vectors: &[Vec<T>]) -> Result<Self> {
        let dim = values.len();
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            for j in i..dim {
                let s = values
                    .iter()
                    .zip(vectors)
                    .fold(T::zero(), |acc, (&mu, v)| acc + mu * v[i] * v[j]);
                m.set(i, j, s);
            }
        }
        Ok(m)
    }

    /// Symmetric tensor `z ⊗ z`.
    pub fn outer(z: &[T]) -> Result<Self> {
        let mut m = Self::zeros(z.len())?;
        for i in 0..z.len() {
            for j in i..z.len() {
                m.set(i, j, z[i] * z[j]);
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn packed(&self) -> &[T] {
        &self.entries
    }

    #[inline]
    fn index(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        i * self.dim - i * (i.saturating_sub(1)) / 2 + (j - i)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.entries[self.index(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: T) {
        let k = self.index(i, j);
        self.entries[k] = x;
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub fn trace(&self) -> T {
        (0..self.dim).fold(T::zero(), |acc, i| acc + self.get(i, i))
    }

    /// `trace(self · other)`.
    pub fn trace_product(&self, other: &Self) -> T {
        debug_assert_eq!(self.dim, other.dim);
        let mut s = T::zero();
        for i in 0..self.dim {
            s += self.get(i, i) * other.get(i, i);
            for j in (i + 1)..self.dim {
                s += T::lit(2.0) * self.get(i, j) * other.get(i, j);
            }
        }
        s
    }

    pub fn frobenius(&self) -> T {
        self.trace_product(self).sqrt()
    }

    pub fn scaled(&self, t: T) -> Self {
        Self { dim: self.dim, entries: self.entries.iter().map(|&x| x * t).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            entries: self.entries.iter().zip(&other.entries).map(|(&a, &b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scaled(-T::one()))
    }

    /// `R · self · Rᵀ` for a square `R` given by rows.
    pub fn conjugate(&self, r: &[Vec<T>]) -> Self {
        let n = self.dim;
        let m = self.to_rows();
        // rm = R · M
        let rm: Vec<Vec<T>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).fold(T::zero(), |acc, k| acc + r[i][k] * m[k][j]))
                    .collect()
            })
            .collect();
        let mut out = Self { dim: n, entries: vec![T::zero(); packed_len(n)] };
        for i in 0..n {
            for j in i..n {
                let s = (0..n).fold(T::zero(), |acc, k| acc + rm[i][k] * r[j][k]);
                out.set(i, j, s);
            }
        }
        out
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<T> {
        self.eigen().values
    }

    /// Cyclic Jacobi eigen-decomposition.
    pub fn eigen(&self) -> SymEigen<T> {
        let n = self.dim;
        let mut a = self.to_rows();
        let mut v: Vec<Vec<T>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect())
            .collect();
        let norm = self.frobenius();
        let stop = T::epsilon() * norm * T::lit(1e-2);
        for _sweep in 0..64 {
            let mut off = T::zero();
            for p in 0..n {
                for q in (p + 1)..n {
                    off += a[p][q] * a[p][q];
                }
            }
            if off.sqrt() <= stop || off == T::zero() {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[p][q];
                    if apq == T::zero() {
                        continue;
                    }
                    let theta = (a[q][q] - a[p][p]) / (T::lit(2.0) * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                    let c = T::one() / (t * t + T::one()).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[k][p];
                        let akq = a[k][q];
                        a[k][p] = c * akp - s * akq;
                        a[k][q] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[p][k];
                        let aqk = a[q][k];
                        a[p][k] = c * apk - s * aqk;
                        a[q][k] = s * apk + c * aqk;
                    }
                    for row in v.iter_mut() {
                        let vkp = row[p];
                        let vkq = row[q];
                        row[p] = c * vkp - s * vkq;
                        row[q] = s * vkp + c * vkq;
                    }
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[i][i].partial_cmp(&a[j][j]).unwrap_or(std::cmp::Ordering::Equal));
        SymEigen {
            values: order.iter().map(|&k| a[k][k]).collect(),
            vectors: order.iter().map(|&k| (0..n).map(|i| v[i][k]).collect()).collect(),
        }
    }

    /// `(min eigenvalue, max eigenvalue)`.
    pub fn spectral_bounds(&self) -> (T, T) {
        let ev = self.eigenvalues();
        (ev[0], ev[ev.len() - 1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn packed_indexing() {
        let m = SymMatrix::from_rows(&[
            vec![1.0, 2.0, 3.0],
            vec![2.0, 4.0, 5.0],
            vec![3.0, 5.0, 6.0],
        ])
        .unwrap();
        assert_eq!(m.packed(), &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(m.get(2, 1), 5.0);
        assert_eq!(m.trace(), 11.0);
    }

    #[test]
    fn closed_form_spectra() {
        let m = SymMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        assert!(close(&m.eigenvalues(), &[1.0, 3.0], 1e-14));
        assert!(close(&SymMatrix::<f64>::identity(3).unwrap().eigenvalues(), &[1.0; 3], 0.0));
        let d = SymMatrix::from_diag(&[-1.0, 0.0, 5.0]).unwrap();
        assert!(close(&d.eigenvalues(), &[-1.0, 0.0, 5.0], 0.0));
    }

    #[test]
    fn reconstruction() {
        let m = SymMatrix::from_rows(&[
            vec![4.0, -1.0, 0.5, 2.0],
            vec![-1.0, 3.0, 0.25, 0.0],
            vec![0.5, 0.25, -2.0, 1.5],
            vec![2.0, 0.0, 1.5, 1.0],
        ])
        .unwrap();
        let e = m.eigen();
        let back = SymMatrix::from_spectral(&e.values, &e.vectors).unwrap();
        let err = back.sub(&m).frobenius();
        assert!(err <= 1e-12 * (1.0 + m.frobenius()), "err {err}");
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(SymMatrix::<f64>::zeros(0).is_err());
        assert!(SymMatrix::<f64>::zeros(9).is_err());
        assert!(SymMatrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).is_err());
        assert!(SymMatrix::from_rows(&[vec![1.0, 2.0]]).is_err());
        assert!(SymMatrix::from_packed(2, vec![1.0, f64::NAN, 0.0]).is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let m = SymMatrix::from_rows(&[vec![2.0f32, 1.0], vec![1.0, 2.0]]).unwrap();
        let ev = m.eigenvalues();
        assert!((ev[0] - 1.0).abs() < 1e-6 && (ev[1] - 3.0).abs() < 1e-6);
    }
}
