//! The scaling action `u ↦ σ^β u(σ ·)`.

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::solver::{Domain, Field, Field2D, RadialField};

use super::cone::HomogeneousProfile;

pub trait Rescale<T>: Sized {
    /// `σ^β u(σ x)`.
    fn rescale(&self, sigma: T, beta: T) -> Result<Self>;
}

fn check_sigma<T: Real>(sigma: T) -> Result<()> {
    if !(sigma > T::zero() && sigma.is_finite()) {
        return Err(Error::ParameterDomain(format!("scale factor must be positive, got {sigma}")));
    }
    Ok(())
}

impl<T: Real> Rescale<T> for RadialField<T> {
    /// Exact on the grid: node `r/σ` carries `σ^β u(r)`.
    fn rescale(&self, sigma: T, beta: T) -> Result<Self> {
        check_sigma(sigma)?;
        if sigma == T::one() {
            return Ok(self.clone());
        }
        let inv = T::one() / sigma;
        let f = sigma.powf(beta);
        RadialField::new(
            self.n,
            self.domain.scaled(inv),
            self.spacing,
            self.nodes.iter().map(|&r| r * inv).collect(),
            self.values.iter().map(|&u| u * f).collect(),
        )
    }
}

impl<T: Real> Rescale<T> for Field2D<T> {
    fn rescale(&self, sigma: T, beta: T) -> Result<Self> {
        check_sigma(sigma)?;
        if sigma == T::one() {
            return Ok(self.clone());
        }
        let inv = T::one() / sigma;
        let f = sigma.powf(beta);
        let domain: Domain<T> = self.domain.scaled(inv);
        Ok(Field2D {
            domain,
            h: self.h * inv,
            x0: self.x0 * inv,
            y0: self.y0 * inv,
            nx: self.nx,
            ny: self.ny,
            values: self.values.iter().map(|&u| u * f).collect(),
            interior: self.interior.clone(),
        })
    }
}

impl<T: Real> Rescale<T> for Field<T> {
    fn rescale(&self, sigma: T, beta: T) -> Result<Self> {
        Ok(match self {
            Field::Radial(f) => Field::Radial(f.rescale(sigma, beta)?),
            Field::Planar(f) => Field::Planar(f.rescale(sigma, beta)?),
        })
    }
}

impl<T: Real> Rescale<T> for HomogeneousProfile<T> {
    /// Identity when `β` matches the profile's degree; otherwise the angular
    /// part picks up `σ^{β - β_u}`.
    fn rescale(&self, sigma: T, beta: T) -> Result<Self> {
        check_sigma(sigma)?;
        if beta == self.beta {
            return Ok(self.clone());
        }
        Ok(self.scaled(sigma.powf(beta - self.beta)))
    }
}
