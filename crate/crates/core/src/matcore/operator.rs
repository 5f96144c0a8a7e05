use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::sampling::{random_rotation, random_sym};
use super::sym::{SymMatrix, MAX_DIM};
use crate::error::{Error, Result};
use crate::scalar::{pos, Real};

/// Built-in operator families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    Laplacian,
    PucciMax,
    PucciMin,
    Isaacs,
}

impl OperatorKind {
    pub fn name(self) -> &'static str {
        match self {
            OperatorKind::Laplacian => "laplacian",
            OperatorKind::PucciMax => "pucci_max",
            OperatorKind::PucciMin => "pucci_min",
            OperatorKind::Isaacs => "isaacs",
        }
    }
}

/// Uniformly elliptic, positively homogeneous operator `F(M)`.
///
/// Sign convention: the Laplacian is `F(M) = -trace(M)`, so supersolutions
/// satisfy `F(D²u) ≥ f`. Isaacs operators are `max_i min_j -trace(A_ij M)`
/// over a finite family of control matrices with `λ I ≤ A_ij ≤ Λ I`.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipticOperator<T> {
    dim: usize,
    kind: OperatorKind,
    lambda: T,
    big_lambda: T,
    families: Vec<Vec<SymMatrix<T>>>,
    rot_invariant: bool,
    rot_downgraded: bool,
}

/// Number of random rotations used to test an Isaacs rotational-invariance claim.
const ROT_CHECK_SAMPLES: usize = 64;
const ROT_CHECK_SEED: u64 = 0x5eed_0f_f00d;

impl<T: Real> EllipticOperator<T> {
    fn check_dim(dim: usize) -> Result<()> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::InvalidOperator {
                field: "n".into(),
                message: format!("dimension {dim} outside 1..={MAX_DIM}"),
            });
        }
        Ok(())
    }

    fn check_constants(lambda: T, big_lambda: T) -> Result<()> {
        if !(lambda > T::zero()) || !lambda.is_finite() {
            return Err(Error::InvalidOperator {
                field: "lambda".into(),
                message: format!("lambda must be positive, got {lambda}"),
            });
        }
        if !(big_lambda >= lambda) || !big_lambda.is_finite() {
            return Err(Error::InvalidOperator {
                field: "Lambda".into(),
                message: format!("Lambda must satisfy Lambda >= lambda = {lambda}, got {big_lambda}"),
            });
        }
        Ok(())
    }

    pub fn laplacian(dim: usize) -> Result<Self> {
        Self::check_dim(dim)?;
        Ok(Self {
            dim,
            kind: OperatorKind::Laplacian,
            lambda: T::one(),
            big_lambda: T::one(),
            families: Vec::new(),
            rot_invariant: true,
            rot_downgraded: false,
        })
    }

    pub fn pucci_max(dim: usize, lambda: T, big_lambda: T) -> Result<Self> {
        Self::pucci(OperatorKind::PucciMax, dim, lambda, big_lambda)
    }

    pub fn pucci_min(dim: usize, lambda: T, big_lambda: T) -> Result<Self> {
        Self::pucci(OperatorKind::PucciMin, dim, lambda, big_lambda)
    }

    fn pucci(kind: OperatorKind, dim: usize, lambda: T, big_lambda: T) -> Result<Self> {
        Self::check_dim(dim)?;
        Self::check_constants(lambda, big_lambda)?;
        Ok(Self {
            dim,
            kind,
            lambda,
            big_lambda,
            families: Vec::new(),
            rot_invariant: true,
            rot_downgraded: false,
        })
    }

    /// Finite sup-inf family. `families[i][j]` is the control for sup index
    /// `i` and inf index `j`. A rotational-invariance claim is tested on
    /// random rotations and downgraded to `false` if any sample fails.
    pub fn isaacs(
        dim: usize,
        lambda: T,
        big_lambda: T,
        families: Vec<Vec<SymMatrix<T>>>,
        rot_invariant: bool,
    ) -> Result<Self> {
        Self::check_dim(dim)?;
        Self::check_constants(lambda, big_lambda)?;
        if families.is_empty() || families.iter().any(|f| f.is_empty()) {
            return Err(Error::InvalidOperator {
                field: "families".into(),
                message: "every index set must be non-empty".into(),
            });
        }
        let slack = T::lit(1e-12) * big_lambda;
        for (i, fam) in families.iter().enumerate() {
            for (j, a) in fam.iter().enumerate() {
                if a.dim() != dim {
                    return Err(Error::InvalidOperator {
                        field: format!("families[{i}][{j}]"),
                        message: format!("matrix dimension {} differs from n = {dim}", a.dim()),
                    });
                }
                let (lo, hi) = a.spectral_bounds();
                if lo < lambda - slack || hi > big_lambda + slack {
                    return Err(Error::ControlOutOfBounds {
                        sup_index: i,
                        inf_index: j,
                        min_eig: lo.as_f64(),
                        max_eig: hi.as_f64(),
                        lambda: lambda.as_f64(),
                        big_lambda: big_lambda.as_f64(),
                    });
                }
            }
        }
        let mut op = Self {
            dim,
            kind: OperatorKind::Isaacs,
            lambda,
            big_lambda,
            families,
            rot_invariant: false,
            rot_downgraded: false,
        };
        if rot_invariant {
            if op.sample_rotation_invariance() {
                op.rot_invariant = true;
            } else {
                op.rot_downgraded = true;
            }
        }
        Ok(op)
    }

    fn sample_rotation_invariance(&self) -> bool {
        let mut rng = ChaCha8Rng::seed_from_u64(ROT_CHECK_SEED);
        (0..ROT_CHECK_SAMPLES).all(|_| {
            let m: SymMatrix<T> = random_sym(self.dim, 1.0, &mut rng);
            let r = random_rotation(self.dim, &mut rng);
            let a = self.eval_unchecked(&m);
            let b = self.eval_unchecked(&m.conjugate(&r));
            (a - b).abs() <= T::lit(1e-10) * (T::one() + a.abs())
        })
    }

    /// Same kind and constants in another dimension (Isaacs excluded).
    pub fn with_dim(&self, dim: usize) -> Result<Self> {
        match self.kind {
            OperatorKind::Laplacian => Self::laplacian(dim),
            OperatorKind::PucciMax => Self::pucci_max(dim, self.lambda, self.big_lambda),
            OperatorKind::PucciMin => Self::pucci_min(dim, self.lambda, self.big_lambda),
            OperatorKind::Isaacs => {
                if dim == self.dim {
                    Ok(self.clone())
                } else {
                    Err(Error::InvalidOperator {
                        field: "n".into(),
                        message: "an Isaacs family is tied to its matrix dimension".into(),
                    })
                }
            }
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }
    #[inline]
    pub fn kind(&self) -> OperatorKind {
        self.kind
    }
    #[inline]
    pub fn lambda(&self) -> T {
        self.lambda
    }
    #[inline]
    pub fn big_lambda(&self) -> T {
        self.big_lambda
    }
    #[inline]
    pub fn families(&self) -> &[Vec<SymMatrix<T>>] {
        &self.families
    }
    #[inline]
    pub fn rot_invariant(&self) -> bool {
        self.rot_invariant
    }
    /// `true` when a rotational-invariance claim was rejected by sampling.
    #[inline]
    pub fn rot_claim_downgraded(&self) -> bool {
        self.rot_downgraded
    }

    /// Companion Pucci extremal operators with the same `(n, λ, Λ)`.
    pub fn pucci_envelope(&self) -> (Self, Self) {
        (
            Self::pucci_min(self.dim, self.lambda, self.big_lambda).expect("validated constants"),
            Self::pucci_max(self.dim, self.lambda, self.big_lambda).expect("validated constants"),
        )
    }

    pub fn eval(&self, m: &SymMatrix<T>) -> Result<T> {
        if m.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: m.dim() });
        }
        Ok(self.eval_unchecked(m))
    }

    pub(crate) fn eval_unchecked(&self, m: &SymMatrix<T>) -> T {
        match self.kind {
            OperatorKind::Laplacian => -m.trace(),
            OperatorKind::PucciMax | OperatorKind::PucciMin => {
                self.pucci_from_eigenvalues(&m.eigenvalues())
            }
            OperatorKind::Isaacs => self.isaacs_with_choice(m).0,
        }
    }

    /// Pucci value from a spectrum.
    pub(crate) fn pucci_from_eigenvalues(&self, ev: &[T]) -> T {
        let (p, n) = ev.iter().fold((T::zero(), T::zero()), |(p, n), &mu| {
            (p + pos(mu), n + mu.min(T::zero()))
        });
        match self.kind {
            OperatorKind::PucciMax => -self.lambda * p - self.big_lambda * n,
            OperatorKind::PucciMin => -self.big_lambda * p - self.lambda * n,
            _ => unreachable!("pucci kinds only"),
        }
    }

    /// Value and the active `(sup, inf)` indices of an Isaacs family.
    pub(crate) fn isaacs_with_choice(&self, m: &SymMatrix<T>) -> (T, usize, usize) {
        let mut best = (T::neg_infinity(), 0, 0);
        for (i, fam) in self.families.iter().enumerate() {
            let mut inner = (T::infinity(), 0);
            for (j, a) in fam.iter().enumerate() {
                let v = -a.trace_product(m);
                if v < inner.0 {
                    inner = (v, j);
                }
            }
            if inner.0 > best.0 {
                best = (inner.0, i, inner.1);
            }
        }
        best
    }

    /// Value and an active control `A` with `F(M) = -trace(A M)`.
    pub fn active_control(&self, m: &SymMatrix<T>) -> Result<(T, SymMatrix<T>)> {
        if m.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: m.dim() });
        }
        Ok(match self.kind {
            OperatorKind::Laplacian => (-m.trace(), SymMatrix::identity(self.dim)?),
            OperatorKind::PucciMax | OperatorKind::PucciMin => {
                let e = m.eigen();
                let (on_pos, on_neg) = if self.kind == OperatorKind::PucciMax {
                    (self.lambda, self.big_lambda)
                } else {
                    (self.big_lambda, self.lambda)
                };
                let weights: Vec<T> = e
                    .values
                    .iter()
                    .map(|&mu| if mu > T::zero() { on_pos } else { on_neg })
                    .collect();
                let a = SymMatrix::from_spectral(&weights, &e.vectors)?;
                (self.pucci_from_eigenvalues(&e.values), a)
            }
            OperatorKind::Isaacs => {
                let (v, i, j) = self.isaacs_with_choice(m);
                (v, self.families[i][j].clone())
            }
        })
    }

    /// Evaluates `F(diag(a, b, …, b))` and returns `(value, c_a, c_b)` with
    /// `value = -(c_a a + c_b b)`; `c_b` aggregates the `n - 1` tangential
    /// directions. Valid for rotationally invariant operators, where this
    /// is the value at any matrix with that spectrum.
    pub fn radial_active(&self, a: T, b: T) -> (T, T, T) {
        let tang = T::from_count(self.dim - 1);
        match self.kind {
            OperatorKind::Laplacian => (-(a + tang * b), T::one(), tang),
            OperatorKind::PucciMax | OperatorKind::PucciMin => {
                let (on_pos, on_neg) = if self.kind == OperatorKind::PucciMax {
                    (self.lambda, self.big_lambda)
                } else {
                    (self.big_lambda, self.lambda)
                };
                let ca = if a > T::zero() { on_pos } else { on_neg };
                let cb = tang * if b > T::zero() { on_pos } else { on_neg };
                (-(ca * a + cb * b), ca, cb)
            }
            OperatorKind::Isaacs => {
                let mut best = (T::neg_infinity(), T::zero(), T::zero());
                for fam in &self.families {
                    let mut inner = (T::infinity(), T::zero(), T::zero());
                    for ctl in fam {
                        let ca = ctl.get(0, 0);
                        let cb = ctl.trace() - ca;
                        let v = -(ca * a + cb * b);
                        if v < inner.0 {
                            inner = (v, ca, cb);
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
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(d: &[f64]) -> SymMatrix<f64> {
        SymMatrix::from_diag(d).unwrap()
    }

    #[test]
    fn evaluation_examples() {
        let lap = EllipticOperator::<f64>::laplacian(3).unwrap();
        assert_eq!(lap.eval(&diag(&[1.0, 2.0, 3.0])).unwrap(), -6.0);
        let pmax = EllipticOperator::pucci_max(2, 1.0, 2.0).unwrap();
        let pmin = EllipticOperator::pucci_min(2, 1.0, 2.0).unwrap();
        assert_eq!(pmax.eval(&diag(&[1.0, -1.0])).unwrap(), 1.0);
        assert_eq!(pmin.eval(&diag(&[1.0, -1.0])).unwrap(), -1.0);
    }

    #[test]
    fn dimension_mismatch() {
        let lap = EllipticOperator::<f64>::laplacian(3).unwrap();
        assert_eq!(
            lap.eval(&diag(&[1.0, 2.0])),
            Err(Error::DimensionMismatch { expected: 3, found: 2 })
        );
    }

    #[test]
    fn constants_validated() {
        assert!(EllipticOperator::pucci_max(3, 0.0, 1.0).is_err());
        assert!(EllipticOperator::pucci_max(3, 2.0, 1.0).is_err());
        assert!(EllipticOperator::<f64>::laplacian(0).is_err());
    }

    #[test]
    fn control_bounds_enforced() {
        let bad = diag(&[3.0, 1.0]);
        let err = EllipticOperator::isaacs(2, 1.0, 2.0, vec![vec![bad]], false).unwrap_err();
        match err {
            Error::ControlOutOfBounds { sup_index: 0, inf_index: 0, max_eig, .. } => {
                assert_eq!(max_eig, 3.0)
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rotation_claim_checked() {
        let anis = EllipticOperator::isaacs(2, 1.0, 2.0, vec![vec![diag(&[1.0, 2.0])]], true).unwrap();
        assert!(!anis.rot_invariant());
        assert!(anis.rot_claim_downgraded());
        let iso = EllipticOperator::isaacs(
            3,
            1.0,
            2.0,
            vec![vec![diag(&[1.5; 3]), diag(&[2.0; 3])], vec![diag(&[1.0; 3])]],
            true,
        )
        .unwrap();
        assert!(iso.rot_invariant());
    }

    #[test]
    fn active_control_reproduces_value() {
        let m = SymMatrix::<f64>::from_rows(&[vec![1.0, 0.7], vec![0.7, -2.0]]).unwrap();
        for op in [
            EllipticOperator::pucci_max(2, 1.0, 3.0).unwrap(),
            EllipticOperator::pucci_min(2, 1.0, 3.0).unwrap(),
            EllipticOperator::laplacian(2).unwrap(),
        ] {
            let (v, a) = op.active_control(&m).unwrap();
            assert!((v + a.trace_product(&m)).abs() < 1e-12);
            assert!((v - op.eval(&m).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn radial_active_matches_eval() {
        let iso = EllipticOperator::isaacs(
            3,
            1.0,
            2.0,
            vec![vec![diag(&[1.5; 3]), diag(&[2.0; 3])], vec![diag(&[1.0; 3])]],
            true,
        )
        .unwrap();
        for op in [
            EllipticOperator::pucci_max(3, 1.0, 2.0).unwrap(),
            EllipticOperator::pucci_min(3, 1.0, 2.0).unwrap(),
            EllipticOperator::laplacian(3).unwrap(),
            iso,
        ] {
            for (a, b) in [(1.0, -0.5), (-2.0, 0.3), (0.7, 0.2), (-1.0, -1.0)] {
                let (v, ca, cb) = op.radial_active(a, b);
                assert!((v - op.eval(&diag(&[a, b, b])).unwrap()).abs() < 1e-12);
                assert!((v + ca * a + cb * b).abs() < 1e-12);
            }
        }
    }
}
