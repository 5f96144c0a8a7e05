use std::sync::Arc;

use fnel_core::liouville::*;
use fnel_core::matcore::EllipticOperator;
use fnel_core::solver::{solve_dirichlet_radial, Domain, Field, RadialField, RadialProblem, Spacing};

fn pmax3() -> EllipticOperator<f64> {
    EllipticOperator::pucci_max(3, 1.0, 2.0).unwrap()
}

fn lap(n: usize) -> EllipticOperator<f64> {
    EllipticOperator::laplacian(n).unwrap()
}

fn sampled(f: impl Fn(f64) -> f64, a: f64, b: f64, m: usize) -> Field<f64> {
    let nodes: Vec<f64> = (0..=m).map(|k| a + (b - a) * k as f64 / m as f64).collect();
    let values = nodes.iter().map(|&r| f(r)).collect();
    Field::Radial(RadialField::new(3, Domain::annulus(a, b).unwrap(), Spacing::Uniform, nodes, values).unwrap())
}

/// Numerical solution of `M⁺(D²u) = 0` with data `r^{-3}` on the annulus.
fn xi3_solve(cells: usize) -> Field<f64> {
    let pb = RadialProblem::homogeneous(3, Domain::annulus(1.0, 2.0).unwrap(), Arc::new(|r: f64| r.powi(-3))).unwrap();
    Field::Radial(solve_dirichlet_radial(&pmax3(), &pb, cells).unwrap().field)
}

#[test]
fn rescale_basics() {
    let u = sampled(|r| r.powi(-2), 1.0, 2.0, 32);
    assert_eq!(u.rescale(1.0, 2.0).unwrap().values(), u.values());
    let v = u.rescale(2.0, 2.0).unwrap();
    let Field::Radial(vr) = &v else { unreachable!() };
    // σ^β (σ r)^{-β} = r^{-β}: the rescaled field samples the same power.
    for (&r, &x) in vr.nodes.iter().zip(&vr.values) {
        assert!((x - r.powi(-2)).abs() < 1e-12 * x);
    }
    let w = v.rescale(1.5, 2.0).unwrap();
    let direct = u.rescale(3.0, 2.0).unwrap();
    for (a, b) in w.values().iter().zip(direct.values()) {
        assert!((a - b).abs() < 1e-12 * a.abs());
    }
    assert!(u.rescale(0.0, 1.0).is_err());
    let h = HomogeneousProfile::constant(0.5, 3, 0.7).unwrap();
    assert_eq!(h.rescale(7.0, 0.5).unwrap(), h);
}

#[test]
fn rescaled_supersolution_keeps_sign() {
    let u = xi3_solve(256);
    let r = hadamard_check(&pmax3(), &u.rescale(2.0, 3.0).unwrap(), Some(3.0)).unwrap();
    assert!(r.min_operator_value >= -1e-8);
}

#[test]
fn hadamard_cases() {
    let rep = hadamard_check(&pmax3(), &xi3_solve(512), None).unwrap();
    assert!(rep.passed(), "{rep:?}");
    assert_eq!(rep.alpha, 3.0);

    let one = sampled(|_| 1.0, 1.0, 2.0, 64);
    let rep = hadamard_check(&pmax3(), &one, Some(3.0)).unwrap();
    assert!(rep.passed());
    assert_eq!(rep.max_increase, 0.0);

    let inv = sampled(|r| 1.0 / r, 1.0, 2.0, 64);
    let rep = hadamard_check(&lap(3), &inv, None).unwrap();
    assert!(rep.passed());
    for (&r, &m) in rep.radii.iter().zip(&rep.minima) {
        assert!((r * m - 1.0).abs() < 1e-14);
    }
    let curve = sphere_min_curve(&inv, &[1.0, 1.5, 2.0]).unwrap();
    assert!((curve[1].1 - 1.0 / 1.5).abs() < 1e-3);

    // Convex fields are subharmonic here.
    let convex = sampled(|r| (r - 1.5).powi(2), 1.0, 2.0, 64);
    assert!(hadamard_check(&lap(3), &convex, Some(1.0)).is_err());
}

#[test]
fn lower_bound_fits() {
    assert!((fit_lower_bound(&sampled(|r| 1.0 / r, 1.0, 2.0, 64), 1.0).unwrap() - 1.0).abs() < 1e-14);
    assert!((fit_lower_bound(&sampled(|r| r.powf(-0.5), 1.0, 2.0, 64), 1.0).unwrap() - 1.0).abs() < 1e-14);
    let c = fit_lower_bound(&xi3_solve(512), 3.0).unwrap();
    assert!((0.9..=1.1).contains(&c), "{c}");
    assert!(fit_lower_bound(&sampled(|r| r - 1.5, 1.0, 2.0, 8), 1.0).is_err());
}

#[test]
fn certificates() {
    let opts = CertificateOptions::default();
    let r = nonexistence_certificate(&lap(3), 3, 2.0, 0.0, 1.0, 1e6, &opts).unwrap();
    assert_eq!(r.exponent, 1.0);
    assert!(!r.critical && r.c_is_input);
    let Crossing::Found(s) = r.crossing else { panic!("no crossing") };
    assert!((s / std::f64::consts::PI.powi(2) - 1.0).abs() < 0.02, "{s}");
    assert!(r.mu(s) > r.lambda1);
    assert!(r.curve_csv().starts_with("sigma,mu\n"));

    let r = nonexistence_certificate(&lap(4), 4, 2.0, 0.0, 1.0, 1e9, &opts).unwrap();
    assert!(r.critical);
    let Crossing::Found(s) = r.crossing else { panic!("no crossing") };
    assert!((s / r.lambda1.exp() - 1.0).abs() < 0.05);

    let flat = CertificateOptions { log_improvement: false, ..opts };
    let r = nonexistence_certificate(&lap(4), 4, 2.0, 0.0, 1.0, 1e9, &flat).unwrap();
    assert_eq!(r.crossing, Crossing::NoCrossing);

    assert!(matches!(
        nonexistence_certificate(&lap(3), 3, 5.0, 0.0, 1.0, 1e6, &opts),
        Err(fnel_core::Error::WrongRegime(_))
    ));
}

#[test]
fn critical_log() {
    let r = critical_log_check(&lap(4), 4).unwrap();
    assert!((r.c_sup - 2.0).abs() < 1e-8 && (r.c_inf - 2.0).abs() < 1e-8);
    assert!(r.bounded && r.w_far > 0.0 && r.w_far < 1e-10);
    let r = critical_log_check(&pmax3(), 3).unwrap();
    assert!(r.bounded && r.c_sup.is_finite() && r.c_inf > 0.0);
    assert!(critical_log_check(&lap(2), 2).is_err());
}

#[test]
fn bending() {
    let b = bend_fundamental(&pmax3(), 3, 2.0, 0.0).unwrap();
    assert!((b.tau - 2.0 / 3.0).abs() < 1e-9 && (b.c - 2.0).abs() < 1e-9);
    let b = bend_fundamental(&lap(3), 3, 5.0, 0.0).unwrap();
    assert!((b.tau - 0.5).abs() < 1e-9 && (b.c - 0.25).abs() < 1e-9);
    assert!((b.k_closed_form - 0.25).abs() < 1e-12);
    assert!(bend_fundamental(&lap(3), 3, 2.0, 0.0).is_err());
}

#[test]
fn patch() {
    let s = build_global_supersolution(&lap(3), 3, 5.0, 0.0, 256).unwrap();
    assert_eq!(s.a, 1.0);
    for (&r, &w) in s.inner.nodes.iter().zip(&s.inner.values) {
        assert!((w - (1.0 - r * r) / 6.0).abs() < 1e-3);
    }
    for i in &s.interfaces {
        assert!(i.jump.abs() <= 1e-8, "{i:?}");
    }
    assert!(s.inner_residual >= -1e-8 && s.outer_residual >= -1e-8);
    assert!(s.delta > 0.0 && s.delta < s.match_radius);
    assert!(s.eval(0.0).unwrap() > 0.0 && s.eval(10.0).unwrap() > 0.0);

    let s = build_global_supersolution(&pmax3(), 3, 2.0, 0.0, 256).unwrap();
    assert!(s.inner_residual >= -1e-8 && s.outer_residual >= -1e-8);
    assert!(build_global_supersolution(&pmax3(), 3, 2.0, 0.5, 64).is_err());
}

#[test]
fn cone_map_constants() {
    let op = pmax3();
    for (c, want) in [(0.0, 0.0), (2.0, 2.0), (3.0, 4.5)] {
        let v = HomogeneousProfile::constant(2.0, 3, c).unwrap();
        let u = cone_map_a(&op, 3, 2.0, &v).unwrap().profile;
        assert_eq!(u.psi, Psi::Constant(want));
    }
    let v = HomogeneousProfile::constant(1.0, 3, 1.0).unwrap();
    assert!(cone_map_a(&op, 3, 2.0, &v).is_err());
}

#[test]
fn cone_map_periodic() {
    let op = EllipticOperator::pucci_max(2, 1.0, 2.0).unwrap();
    let m = 64;
    let vals: Vec<f64> = (0..m).map(|k| 1.0 + 0.2 * (std::f64::consts::TAU * k as f64 / m as f64).cos()).collect();
    let v = HomogeneousProfile::periodic(2.0 / 3.0, vals).unwrap();
    let u = cone_map_a(&op, 2, 4.0, &v).unwrap();
    assert!(u.profile.min() > 0.0);
    // A cold Newton start lands on a sign-changing solution here; continuation recovers the positive one.
    assert!(u.other_basin_min.unwrap() < 0.0);
    let mild: Vec<f64> = (0..m).map(|k| 1.0 + 0.05 * (std::f64::consts::TAU * k as f64 / m as f64).cos()).collect();
    let u = cone_map_a(&op, 2, 4.0, &HomogeneousProfile::periodic(2.0 / 3.0, mild).unwrap()).unwrap();
    assert!(u.other_basin_min.is_none() && u.profile.min() > 0.0);
    let zero = HomogeneousProfile::periodic(2.0 / 3.0, vec![0.0; m]).unwrap();
    assert_eq!(cone_map_a(&op, 2, 4.0, &zero).unwrap().profile.norm(), 0.0);
}

fn fd_hessian(f: impl Fn(f64, f64) -> f64, x: f64, y: f64) -> [f64; 3] {
    let h = 1e-4;
    let fxx = (f(x + h, y) - 2.0 * f(x, y) + f(x - h, y)) / (h * h);
    let fyy = (f(x, y + h) - 2.0 * f(x, y) + f(x, y - h)) / (h * h);
    let fxy = (f(x + h, y + h) - f(x + h, y - h) - f(x - h, y + h) + f(x - h, y - h)) / (4.0 * h * h);
    [fxx, fxy, fyy]
}

#[test]
fn angular_hessian_matches_ambient() {
    type Profile = (fn(f64) -> f64, fn(f64) -> f64, fn(f64) -> f64);
    let profiles: [Profile; 3] = [
        (|t| 1.0 + 0.3 * t.cos(), |t| -0.3 * t.sin(), |t| -0.3 * t.cos()),
        (|t| 2.0 + 0.5 * (2.0 * t).sin(), |t| (2.0 * t).cos(), |t| -2.0 * (2.0 * t).sin()),
        (
            |t| (0.2 * (3.0 * t).sin()).exp(),
            |t| 0.6 * (3.0 * t).cos() * (0.2 * (3.0 * t).sin()).exp(),
            |t| {
                let e = (0.2 * (3.0 * t).sin()).exp();
                let d = 0.6 * (3.0 * t).cos();
                (d * d - 1.8 * (3.0 * t).sin()) * e
            },
        ),
    ];
    for beta in [0.5, 2.0 / 3.0, 2.0] {
        for (psi, dpsi, ddpsi) in profiles {
            let u = |x: f64, y: f64| (x * x + y * y).sqrt().powf(-beta) * psi(y.atan2(x));
            for k in 0..12 {
                let t = 0.1 + k as f64 * 0.5;
                let m = angular_hessian(beta, psi(t), dpsi(t), ddpsi(t), t);
                let fd = fd_hessian(u, t.cos(), t.sin());
                for (a, b) in [m.get(0, 0), m.get(0, 1), m.get(1, 1)].iter().zip(fd) {
                    assert!((a - b).abs() < 1e-5, "beta {beta} theta {t}: {a} vs {b}");
                }
            }
        }
    }
}

#[test]
fn fixed_points() {
    let r = fixed_point(&pmax3(), 3, 2.0).unwrap();
    assert_eq!(r.profile.psi, Psi::Constant(2.0));
    assert!((r.r_bar - 1.0).abs() < 1e-12 && r.norm > r.r_bar && r.bound_holds);
    assert!(r.residual <= 1e-10);

    let r = fixed_point(&lap(3), 3, 5.0).unwrap();
    assert!((r.norm - 0.25f64.powf(0.25)).abs() < 1e-12 && r.bound_holds);

    let op2 = EllipticOperator::pucci_max(2, 1.0, 2.0).unwrap();
    let radial = fixed_point_radial(&op2, 2, 4.0).unwrap();
    let m = 64;
    let start: Vec<f64> = (0..m)
        .map(|k| radial.norm * (1.0 + 0.1 * (std::f64::consts::TAU * 3.0 * k as f64 / m as f64).sin()))
        .collect();
    let ang = fixed_point_angular(&op2, 4.0, m, Some(start)).unwrap();
    assert!((ang.profile.norm() - radial.norm).abs() < 1e-6 && (ang.profile.min() - radial.norm).abs() < 1e-6);
    assert!(ang.residual <= 1e-6 && ang.bound_holds);
    assert!((ang.r_bar - radial.r_bar).abs() < 1e-6);
    assert!(fixed_point(&lap(3), 3, 2.0).is_err());
}
