#![allow(dead_code)]

use nodalshoot::problem::Problem;

/// Outcome of the RK4 reference.
pub struct Rk4Run {
    pub nodes: Vec<f64>,
    /// First radius with `E < 0`.
    pub settle: Option<f64>,
    /// First radius where `(v, w)` is within `1e-7` of the origin with `E >= 0`.
    pub double_zero: Option<f64>,
    pub end: f64,
}

fn phi(s: f64, p: f64) -> f64 {
    s.abs().powf(p - 2.0) * s
}

/// RK4 for `v' = φ_{p'}(w)`, `w' = -(q'/q) w - f(v)` with fixed step `h` once `r > 50h`.
pub fn rk4_reference(prob: &Problem, lambda: f64, r_max: f64, h: f64) -> Rk4Run {
    let p = prob.p.p;
    let pc = p / (p - 1.0);
    let f = |s: f64| prob.nonlin.f(s);
    let big_f = |s: f64| prob.nonlin.big_f(s);
    let lq = |r: f64| prob.weight.log_derivative(r);
    let rhs = |r: f64, y: [f64; 2]| [phi(y[1], pc), -lq(r) * y[1] - f(y[0])];
    let energy = |y: [f64; 2]| y[1].abs().powf(pc) / pc + big_f(y[0]);

    // leading-order start: w = -f(λ) Q/q, v = λ + ∫ φ_{p'}(w); steps grade up to h
    let r0 = 1e-4 * h;
    let ratio = prob.weight.big_q(r0) / prob.weight.q(r0);
    let w0 = -f(lambda) * ratio;
    let v0 = lambda + phi(w0, pc) * r0 / pc;
    let mut y = [v0, w0];
    let mut r = r0;
    let mut out = Rk4Run {
        nodes: vec![],
        settle: None,
        double_zero: None,
        end: r_max,
    };
    while r < r_max {
        let h = h.min(r / 50.0);
        let k1 = rhs(r, y);
        let k2 = rhs(
            r + 0.5 * h,
            [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]],
        );
        let k3 = rhs(
            r + 0.5 * h,
            [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]],
        );
        let k4 = rhs(r + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
        let next = [
            y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        ];
        if !(next[0].is_finite() && next[1].is_finite()) {
            out.end = r;
            break;
        }
        if y[0] != 0.0 && next[0] * y[0] < 0.0 {
            out.nodes.push(r + h * y[0] / (y[0] - next[0]));
        }
        r += h;
        y = next;
        let e = energy(y);
        if e < 0.0 {
            out.settle = Some(r);
            out.end = r;
            break;
        }
        if prob.compact_support && y[0].abs() < 1e-7 && y[1].abs() < 1e-7 {
            out.double_zero = Some(r);
            out.end = r;
            break;
        }
    }
    out
}

/// Composite Gauss–Legendre (5 points) of `g` over `[a, b]` split into `n` panels.
pub fn gauss5(a: f64, b: f64, n: usize, g: impl Fn(f64) -> f64) -> f64 {
    const X: [f64; 5] = [
        0.0,
        -0.538_469_310_105_683_1,
        0.538_469_310_105_683_1,
        -0.906_179_845_938_664,
        0.906_179_845_938_664,
    ];
    const W: [f64; 5] = [
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_08,
        0.236_926_885_056_189_08,
    ];
    let step = (b - a) / n as f64;
    let mut s = 0.0;
    for i in 0..n {
        let (lo, hi) = (a + i as f64 * step, a + (i + 1) as f64 * step);
        let (m, c) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        for j in 0..5 {
            s += W[j] * c * g(m + c * X[j]);
        }
    }
    s
}
