//! Seeded random matrices for sampled property checks.

use rand::Rng;

use super::sym::SymMatrix;
use crate::scalar::Real;

/// Symmetric matrix with entries uniform in `[-scale, scale]`.
pub fn random_sym<T: Real, R: Rng>(dim: usize, scale: f64, rng: &mut R) -> SymMatrix<T> {
    let mut m = SymMatrix::zeros(dim).expect("valid dimension");
    for i in 0..dim {
        for j in i..dim {
            m.set(i, j, T::lit(rng.gen_range(-scale..=scale)));
        }
    }
    m
}

/// Positive semidefinite matrix `B Bᵀ` with random `B`, occasionally of low rank.
pub fn random_psd<T: Real, R: Rng>(dim: usize, scale: f64, rng: &mut R) -> SymMatrix<T> {
    let rank = rng.gen_range(1..=dim);
    let cols: Vec<Vec<f64>> = (0..rank)
        .map(|_| (0..dim).map(|_| rng.gen_range(-scale..=scale)).collect())
        .collect();
    let mut m = SymMatrix::zeros(dim).expect("valid dimension");
    for i in 0..dim {
        for j in i..dim {
            let s: f64 = cols.iter().map(|c| c[i] * c[j]).sum();
            m.set(i, j, T::lit(s));
        }
    }
    m
}

/// Random orthogonal matrix (rows) from Gram-Schmidt on a uniform sample.
pub fn random_rotation<T: Real, R: Rng>(dim: usize, rng: &mut R) -> Vec<Vec<T>> {
    loop {
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(dim);
        let mut ok = true;
        for _ in 0..dim {
            let mut v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            for r in &rows {
                let d: f64 = v.iter().zip(r).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(r).for_each(|(a, b)| *a -= d * b);
            }
            let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            if norm < 1e-6 {
                ok = false;
                break;
            }
            v.iter_mut().for_each(|a| *a /= norm);
            rows.push(v);
        }
        if ok {
            return rows.into_iter().map(|r| r.into_iter().map(T::lit).collect()).collect();
        }
    }
}
