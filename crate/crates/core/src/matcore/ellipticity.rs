use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::operator::EllipticOperator;
use super::sampling::{random_psd, random_sym};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// One of the sampled structure checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EllipticityCheck {
    /// `λ tr N ≤ F(M − N) − F(M)`
    LowerEllipticity,
    /// `F(M − N) − F(M) ≤ Λ tr N`
    UpperEllipticity,
    /// `F(tM) = t F(M)`
    Homogeneity,
    /// `P⁻(M) ≤ F(M) ≤ P⁺(M)`
    PucciSandwich,
}

#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub check: EllipticityCheck,
    /// Packed (upper triangle) entries of the sample `M`.
    pub m: Vec<f64>,
    /// Packed entries of `N ⪰ 0` (empty when unused).
    pub n: Vec<f64>,
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EllipticityReport {
    pub samples: usize,
    pub seed: u64,
    pub lambda: f64,
    #[serde(rename = "Lambda")]
    pub big_lambda: f64,
    pub violation_count: usize,
    /// First few violations with their witnesses.
    pub violations: Vec<Violation>,
}

impl EllipticityReport {
    pub fn passed(&self) -> bool {
        self.violation_count == 0
    }
}

const MAX_WITNESSES: usize = 16;
const HOMOGENEITY_SCALARS: [f64; 4] = [0.0, 0.5, 1.0, 7.0];

fn packed64<T: Real>(m: &super::SymMatrix<T>) -> Vec<f64> {
    m.packed().iter().map(|x| x.as_f64()).collect()
}

/// Samples `(M, N ⪰ 0, t ≥ 0)` and checks the ellipticity bounds, positive
/// homogeneity and the Pucci sandwich. Violations are report content.
pub fn verify_ellipticity<T: Real>(
    op: &EllipticOperator<T>,
    samples: usize,
    seed: u64,
) -> Result<EllipticityReport> {
    if samples == 0 {
        return Err(Error::ParameterDomain("samples must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (pmin, pmax) = op.pucci_envelope();
    let (lambda, big_lambda) = (op.lambda(), op.big_lambda());
    let mut report = EllipticityReport {
        samples,
        seed,
        lambda: lambda.as_f64(),
        big_lambda: big_lambda.as_f64(),
        violation_count: 0,
        violations: Vec::new(),
    };
    let record = |report: &mut EllipticityReport, v: Violation| {
        report.violation_count += 1;
        if report.violations.len() < MAX_WITNESSES {
            report.violations.push(v);
        }
    };
    for k in 0..samples {
        let m = random_sym::<T, _>(op.dim(), 2.0, &mut rng);
        let n = random_psd::<T, _>(op.dim(), 1.0, &mut rng);
        let t = if k < HOMOGENEITY_SCALARS.len() {
            T::lit(HOMOGENEITY_SCALARS[k])
        } else {
            T::lit(rng.gen_range(0.0..10.0))
        };
        let fm = op.eval_unchecked(&m);
        let diff = op.eval_unchecked(&m.sub(&n)) - fm;
        let tr = n.trace();
        let tol = T::lit(1e-10) * (T::one() + fm.abs() + big_lambda * tr);
        if diff < lambda * tr - tol {
            record(&mut report, Violation {
                check: EllipticityCheck::LowerEllipticity,
                m: packed64(&m),
                n: packed64(&n),
                t: 0.0,
                lhs: (lambda * tr).as_f64(),
                rhs: diff.as_f64(),
            });
        }
        if diff > big_lambda * tr + tol {
            record(&mut report, Violation {
                check: EllipticityCheck::UpperEllipticity,
                m: packed64(&m),
                n: packed64(&n),
                t: 0.0,
                lhs: diff.as_f64(),
                rhs: (big_lambda * tr).as_f64(),
            });
        }
        let ftm = op.eval_unchecked(&m.scaled(t));
        if (ftm - t * fm).abs() > T::lit(1e-10) * (T::one() + (t * fm).abs()) {
            record(&mut report, Violation {
                check: EllipticityCheck::Homogeneity,
                m: packed64(&m),
                n: Vec::new(),
                t: t.as_f64(),
                lhs: ftm.as_f64(),
                rhs: (t * fm).as_f64(),
            });
        }
        let lo = pmin.eval_unchecked(&m);
        let hi = pmax.eval_unchecked(&m);
        let stol = T::lit(1e-10) * (T::one() + fm.abs());
        if fm < lo - stol || fm > hi + stol {
            record(&mut report, Violation {
                check: EllipticityCheck::PucciSandwich,
                m: packed64(&m),
                n: Vec::new(),
                t: 0.0,
                lhs: lo.as_f64(),
                rhs: hi.as_f64(),
            });
        }
    }
    Ok(report)
}
