use super::sym::SymMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Hessian of `x ↦ g(|x|)` in a frame whose first axis is radial:
/// `diag(g″, g′/r, …, g′/r)`.
pub fn radial_hessian<T: Real>(n: usize, g1: T, g2: T, r: T) -> Result<SymMatrix<T>> {
    if !(r > T::zero()) {
        return Err(Error::ParameterDomain(format!("radius must be positive, got {r}")));
    }
    if n < 2 {
        return Err(Error::ParameterDomain(format!("dimension must be at least 2, got {n}")));
    }
    let mut d = vec![g1 / r; n];
    d[0] = g2;
    SymMatrix::from_diag(&d)
}

/// Hessian of `ξ(z) = |z|^{-β}`:
/// `β(β+2)|z|^{-β-4} z⊗z − β|z|^{-β-2} I`.
pub fn hessian_xi<T: Real>(beta: T, z: &[T]) -> Result<SymMatrix<T>> {
    if !(beta > T::zero()) {
        return Err(Error::ParameterDomain(format!("beta must be positive, got {beta}")));
    }
    let r2 = z.iter().fold(T::zero(), |acc, &x| acc + x * x);
    if r2 == T::zero() {
        return Err(Error::ParameterDomain("hessian of |z|^-beta undefined at z = 0".into()));
    }
    let r = r2.sqrt();
    let two = T::lit(2.0);
    let outer = SymMatrix::outer(z)?.scaled(beta * (beta + two) * r.powf(-beta - T::lit(4.0)));
    let iso = SymMatrix::identity(z.len())?.scaled(beta * r.powf(-beta - two));
    Ok(outer.sub(&iso))
}
