//! Property checks shared by the proptest suites and the acceptance runner.
//! Each case is driven by a `u64` seed so failures replay exactly.

use std::sync::Arc;

use fnel_core::liouville::{fit_lower_bound, HomogeneousProfile, Rescale};
use fnel_core::matcore::sampling::{random_psd, random_rotation, random_sym};
use fnel_core::matcore::{EllipticOperator, SymMatrix};
use fnel_core::solver::{
    solve_dirichlet_2d, solve_dirichlet_radial, Domain, Field, PlanarProblem, RadialField, RadialProblem, Spacing,
};
use proptest::test_runner::{Config, RngSeed, TestCaseError, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const CASES: u32 = 1000;

pub fn config(seed: u64) -> Config {
    Config { cases: CASES, rng_seed: RngSeed::Fixed(seed), failure_persistence: None, ..Config::default() }
}

pub fn runner(seed: u64) -> TestRunner {
    TestRunner::new(config(seed))
}

type Check = std::result::Result<(), TestCaseError>;

fn close(a: f64, b: f64, tol: f64, what: &str) -> Check {
    if (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs())) {
        Ok(())
    } else {
        Err(TestCaseError::fail(format!("{what}: {a} vs {b}")))
    }
}

fn ensure(ok: bool, what: String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(TestCaseError::fail(what))
    }
}

/// Random operator among the four kinds, with `dim ≤ 4`.
pub fn random_operator(rng: &mut ChaCha8Rng) -> EllipticOperator<f64> {
    let dim = rng.gen_range(1..=4);
    let lambda = rng.gen_range(0.25..2.0);
    let big = lambda * rng.gen_range(1.0..4.0);
    match rng.gen_range(0..4) {
        0 => EllipticOperator::laplacian(dim).unwrap(),
        1 => EllipticOperator::pucci_max(dim, lambda, big).unwrap(),
        2 => EllipticOperator::pucci_min(dim, lambda, big).unwrap(),
        _ => {
            let families = (0..rng.gen_range(1..4))
                .map(|_| (0..rng.gen_range(1..4)).map(|_| random_control(dim, lambda, big, rng)).collect())
                .collect();
            EllipticOperator::isaacs(dim, lambda, big, families, false).unwrap()
        }
    }
}

/// `R diag(d) Rᵀ` with `d` uniform in `[λ, Λ]`.
pub fn random_control(dim: usize, lambda: f64, big: f64, rng: &mut ChaCha8Rng) -> SymMatrix<f64> {
    let d: Vec<f64> = (0..dim).map(|_| rng.gen_range(lambda..=big)).collect();
    let q: Vec<Vec<f64>> = random_rotation(dim, rng);
    SymMatrix::from_spectral(&d, &q).unwrap()
}

/// `M⁻(X - Y) ≤ F(X) - F(Y) ≤ M⁺(X - Y)`.
pub fn sandwich(seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let op = random_operator(&mut rng);
    let (lo, hi) = op.pucci_envelope();
    let x = random_sym(op.dim(), 3.0, &mut rng);
    let y = if rng.gen_bool(0.5) { random_sym(op.dim(), 3.0, &mut rng) } else { x.sub(&random_psd(op.dim(), 1.0, &mut rng)) };
    let d = op.eval(&x).unwrap() - op.eval(&y).unwrap();
    let diff = x.sub(&y);
    let (a, b) = (lo.eval(&diff).unwrap(), hi.eval(&diff).unwrap());
    let tol = 1e-12 * (1.0 + x.frobenius() + y.frobenius()) * op.big_lambda();
    ensure(a - tol <= d && d <= b + tol, format!("{:?}: {a} <= {d} <= {b}", op.kind()))
}

/// `M⁺(X) = -M⁻(-X)`, and the dual `-F(-X)` keeps the same envelope.
pub fn duality(seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let op = random_operator(&mut rng);
    let (lo, hi) = op.pucci_envelope();
    let x = random_sym(op.dim(), 3.0, &mut rng);
    let neg = x.scaled(-1.0);
    close(hi.eval(&x).unwrap(), -lo.eval(&neg).unwrap(), 1e-12, "pucci duality")?;
    let y = random_sym(op.dim(), 3.0, &mut rng);
    let dual = |m: &SymMatrix<f64>| -op.eval(&m.scaled(-1.0)).unwrap();
    let d = dual(&x) - dual(&y);
    let diff = x.sub(&y);
    let tol = 1e-12 * (1.0 + x.frobenius() + y.frobenius()) * op.big_lambda();
    ensure(
        lo.eval(&diff).unwrap() - tol <= d && d <= hi.eval(&diff).unwrap() + tol,
        format!("dual of {:?} leaves the envelope", op.kind()),
    )
}

/// `F(tX) = t F(X)` for `t ≥ 0`.
pub fn homogeneity(seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let op = random_operator(&mut rng);
    let x = random_sym(op.dim(), 3.0, &mut rng);
    let t = match seed % 5 {
        0 => 0.0,
        1 => 1.0,
        _ => rng.gen_range(0.0..50.0),
    };
    let fx = op.eval(&x).unwrap();
    close(op.eval(&x.scaled(t)).unwrap(), t * fx, 1e-12, "homogeneity")
}

/// Ordered data give ordered discrete solutions: radial Pucci/Laplacian
/// solves on a small annulus and planar Isaacs solves on a small square.
pub fn comparison(seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lambda = rng.gen_range(0.5..1.5);
    let big = lambda * rng.gen_range(1.0..3.0);
    let bump = [rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)];
    let (f0, g0, g1) = (rng.gen_range(-2.0..2.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    if seed % 2 == 0 {
        let n = rng.gen_range(2..=4);
        let op = match rng.gen_range(0..3) {
            0 => EllipticOperator::laplacian(n).unwrap(),
            1 => EllipticOperator::pucci_max(n, lambda, big).unwrap(),
            _ => EllipticOperator::pucci_min(n, lambda, big).unwrap(),
        };
        let dom = Domain::annulus(1.0, 2.0).unwrap();
        let problem = |f: f64, a: f64, b: f64| {
            RadialProblem::new(n, dom, Arc::new(move |r: f64| f * r), Arc::new(move |r: f64| if r < 1.5 { a } else { b }))
                .unwrap()
        };
        let lo = solve_dirichlet_radial(&op, &problem(f0, g0, g1), 16).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let hi = solve_dirichlet_radial(&op, &problem(f0 + bump[0], g0 + bump[1], g1 + bump[2]), 16)
            .map_err(|e| TestCaseError::fail(e.to_string()))?;
        ordered(&lo.field.values, &hi.field.values)
    } else {
        let families = (0..rng.gen_range(1..3))
            .map(|_| {
                (0..rng.gen_range(1..3))
                    .map(|_| {
                        let (a11, a22) = (rng.gen_range(1.2..1.8), rng.gen_range(1.2..1.8));
                        let a12 = rng.gen_range(-0.2..0.2);
                        SymMatrix::from_rows(&[vec![a11, a12], vec![a12, a22]]).unwrap()
                    })
                    .collect()
            })
            .collect();
        let op = EllipticOperator::isaacs(2, 1.0, 2.0, families, false).unwrap();
        let dom = Domain::rectangle(0.0, 1.0, 0.0, 1.0).unwrap();
        let problem = |f: f64, a: f64, b: f64| {
            PlanarProblem::new(dom, Arc::new(move |x: f64, _| f * (1.0 + x)), Arc::new(move |x: f64, y: f64| a * x + b * y))
        };
        let lo = solve_dirichlet_2d(&op, &problem(f0, g0, g1), 0.125).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let hi = solve_dirichlet_2d(&op, &problem(f0 + bump[0], g0 + bump[1], g1 + bump[2]), 0.125)
            .map_err(|e| TestCaseError::fail(e.to_string()))?;
        ordered(&lo.field.values, &hi.field.values)
    }
}

fn ordered(lo: &[f64], hi: &[f64]) -> Check {
    for (k, (a, b)) in lo.iter().zip(hi).enumerate() {
        ensure(*a <= *b + 1e-9, format!("node {k}: {a} > {b}"))?;
    }
    Ok(())
}

/// `rescale(rescale(u, σ), τ) = rescale(u, στ)`, identity on homogeneous
/// profiles, and `fit_lower_bound` is equivariant.
pub fn rescale_action(seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (r0, r1) = (rng.gen_range(0.5..2.0), 0.0);
    let r1 = r1 + r0 * rng.gen_range(1.5..4.0);
    let m = rng.gen_range(4..40);
    let nodes: Vec<f64> = (0..=m).map(|k| r0 + (r1 - r0) * k as f64 / m as f64).collect();
    let values: Vec<f64> = nodes.iter().map(|_| rng.gen_range(0.1..5.0)).collect();
    let u = Field::Radial(RadialField::new(3, Domain::annulus(r0, r1).unwrap(), Spacing::Uniform, nodes, values).unwrap());
    let (s, t, beta) = (rng.gen_range(0.1..10.0), rng.gen_range(0.1..10.0), rng.gen_range(-3.0..3.0));
    let two_step = u.rescale(s, beta).unwrap().rescale(t, beta).unwrap();
    let one_step = u.rescale(s * t, beta).unwrap();
    let (Field::Radial(a), Field::Radial(b)) = (&two_step, &one_step) else { unreachable!() };
    for (x, y) in a.nodes.iter().zip(&b.nodes) {
        close(*x, *y, 1e-13, "rescaled nodes")?;
    }
    for (x, y) in a.values.iter().zip(&b.values) {
        close(*x, *y, 1e-12, "rescaled values")?;
    }
    let alpha = rng.gen_range(0.0..4.0);
    let c = fit_lower_bound(&u, alpha).unwrap();
    let cs = fit_lower_bound(&u.rescale(s, alpha).unwrap(), alpha).unwrap();
    close(c, cs, 1e-12, "fit equivariance")?;
    let h = HomogeneousProfile::constant(beta.abs() + 0.1, 3, rng.gen_range(0.0..3.0)).unwrap();
    ensure(h.rescale(s, h.beta).unwrap() == h, "profile moved under rescale".into())
}
