//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

pub mod props;

/// Weights `(on_pos, on_neg)` of a rotationally invariant extremal operator:
/// `F(diag(a, b, …)) = -(w(a) a + (n-1) w(b) b)`.
#[derive(Clone, Copy)]
pub struct RadialWeights {
    pub n: usize,
    pub on_pos: f64,
    pub on_neg: f64,
}

impl RadialWeights {
    pub fn laplacian(n: usize) -> Self {
        Self { n, on_pos: 1.0, on_neg: 1.0 }
    }
    pub fn pucci_max(n: usize, l: f64, big: f64) -> Self {
        Self { n, on_pos: l, on_neg: big }
    }
    pub fn pucci_min(n: usize, l: f64, big: f64) -> Self {
        Self { n, on_pos: big, on_neg: l }
    }
    fn w(&self, x: f64) -> f64 {
        if x > 0.0 {
            self.on_pos
        } else {
            self.on_neg
        }
    }
    pub fn eval(&self, a: f64, b: f64) -> f64 {
        -(self.w(a) * a + (self.n as f64 - 1.0) * self.w(b) * b)
    }
    /// `v''` with `F(diag(v'', v'/r, …)) = rhs`.
    fn second(&self, rhs: f64, b: f64) -> f64 {
        let cb = (self.n as f64 - 1.0) * self.w(b) * b;
        let a = -(rhs + cb) / self.on_pos;
        if a > 0.0 {
            a
        } else {
            -(rhs + cb) / self.on_neg
        }
    }
}

/// `v(r1)` for `F(D²v) = λ v`, `v(r0) = 0`, `v'(r0) = 1`, by RK4; `None` if `v`
/// vanishes before `r1`.
fn shoot(w: RadialWeights, lambda: f64, r0: f64, r1: f64, steps: usize) -> Option<f64> {
    let h = (r1 - r0) / steps as f64;
    let f = |r: f64, y: [f64; 2]| [y[1], w.second(lambda * y[0], y[1] / r)];
    let mut y = [0.0, 1.0];
    let mut r = r0;
    for k in 0..steps {
        let k1 = f(r, y);
        let k2 = f(r + h / 2.0, [y[0] + h / 2.0 * k1[0], y[1] + h / 2.0 * k1[1]]);
        let k3 = f(r + h / 2.0, [y[0] + h / 2.0 * k2[0], y[1] + h / 2.0 * k2[1]]);
        let k4 = f(r + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
        for i in 0..2 {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        r += h;
        if k + 1 < steps && y[0] <= 0.0 {
            return None;
        }
    }
    Some(y[0])
}

/// First `λ` for which the positive shooting solution vanishes at `r1`.
pub fn radial_eigenvalue(w: RadialWeights, r0: f64, r1: f64) -> f64 {
    let steps = 20_000;
    let positive = |l: f64| matches!(shoot(w, l, r0, r1, steps), Some(v) if v > 0.0);
    let (mut lo, mut hi) = (0.0, 1.0);
    while positive(hi) {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if positive(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
