//! Integration of `v' = φ_{p'}(w)`, `w' = -(q'/q) w - f(v)` from `v(0) = λ`, `w(0) = 0`.
//!
//! Alongside `(v, w)` the stepper carries the unwrapped angle `θ` and
//! `D = -∫ (q'/q)|w|^{p'}`, the accumulated dissipation.

pub mod io;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{gl10, tanh_sinh};
use crate::problem::Problem;
use crate::ptrig::{p_polar_from_cartesian, phi, pi_p};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveOptions {
    pub r_max: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Radius where the series start hands over to the stepper; `None` picks it from `λ`.
    pub startup_radius: Option<f64>,
    pub double_zero_tol: f64,
    pub settle_tol: f64,
    pub max_nodes: usize,
    pub stop_on_settle: bool,
    /// Stop once `E` drops below this level.
    pub stop_below_energy: Option<f64>,
    pub max_steps: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            r_max: 100.0,
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            startup_radius: None,
            double_zero_tol: 1e-10,
            settle_tol: 1e-8,
            max_nodes: 50,
            stop_on_settle: true,
            stop_below_energy: None,
            max_steps: 5_000_000,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        if !(self.r_max > 0.0 && self.r_max.is_finite()) {
            return bad("r_max must be positive and finite");
        }
        if let Some(r1) = self.startup_radius {
            if !(r1 > 0.0 && r1 < self.r_max) {
                return bad("startup_radius must lie in (0, r_max)");
            }
        }
        if !(self.double_zero_tol > 0.0 && self.settle_tol > 0.0) {
            return bad("double_zero_tol and settle_tol must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Terminal {
    ReachedRMax,
    DoubleZero,
    SettledNegativeEnergy,
    StepFailure,
    MaxNodes,
    /// `w = 0` and `f(v) = 0` with `p > 2`: continuation is not unique.
    UniquenessBoundary,
    /// `E` fell below `stop_below_energy`.
    EnergyLevel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub r: f64,
    pub v: f64,
    pub w: f64,
    #[serde(rename = "E")]
    pub e: f64,
    pub theta: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
    pub startup_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub lambda: f64,
    pub p: f64,
    pub samples: Vec<Sample>,
    /// `D(r) = -∫_{r1}^r (q'/q)|w|^{p'}` at each sample; empty for loaded trajectories.
    #[serde(default)]
    pub dissipation: Vec<f64>,
    pub nodes: Vec<f64>,
    pub critical_points: Vec<f64>,
    pub double_zero: Option<f64>,
    pub terminal: Terminal,
    pub settle_radius: Option<f64>,
    #[serde(default)]
    pub message: Option<String>,
    #[serde(default)]
    pub warnings: Vec<String>,
    #[serde(default)]
    pub stats: SolveStats,
}

impl Trajectory {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectory has samples")
    }

    /// Largest increase of `E` between consecutive samples, relative to `1 + |E|`.
    pub fn max_energy_increase(&self) -> f64 {
        self.samples
            .windows(2)
            .map(|s| (s[1].e - s[0].e) / (1.0 + s[0].e.abs()))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Nodes implied by the integrated angle: odd multiples of `π_p/2` swept by `θ`.
    pub fn winding_nodes(&self) -> Result<usize> {
        let pe = crate::ptrig::PExponent::new(self.p)?;
        let pp = pi_p(pe)?;
        let first = self
            .samples
            .iter()
            .find(|s| s.r > 0.0)
            .map(|s| s.theta)
            .unwrap_or(0.0);
        let end = self.last().theta;
        let k = |t: f64| ((t - 0.5 * pp) / pp).floor();
        Ok((k(first) - k(end)).max(0.0) as usize)
    }

    /// Largest angle mismatch at a refined node, in units of a quadrant.
    pub fn winding_deviation(&self) -> Result<f64> {
        let pe = crate::ptrig::PExponent::new(self.p)?;
        let pp = pi_p(pe)?;
        let mut worst: f64 = 0.0;
        for &rn in &self.nodes {
            if let Some(s) = self.samples.iter().find(|s| s.r == rn) {
                let offset = (s.theta - 0.5 * pp) / pp;
                worst = worst.max((offset - offset.round()).abs() * 2.0);
            }
        }
        Ok(worst)
    }

    /// RMS of `ΔE - ΔD` over steps, normalized by the RMS of `ΔD`.
    pub fn energy_identity_residual(&self) -> Option<f64> {
        if self.dissipation.len() != self.samples.len() || self.samples.len() < 3 {
            return None;
        }
        let (mut num, mut den) = (0.0, 0.0);
        for i in 2..self.samples.len() {
            let de = self.samples[i].e - self.samples[i - 1].e;
            let dd = self.dissipation[i] - self.dissipation[i - 1];
            num += (de - dd).powi(2);
            den += dd * dd;
        }
        if den == 0.0 {
            return Some(num.sqrt());
        }
        Some((num / den).sqrt())
    }
}

/// State of the series start at `r1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StartupState {
    pub r1: f64,
    pub v: f64,
    pub w: f64,
    pub shrinks: usize,
}

fn integrate_dyadic<F: FnMut(f64) -> f64>(r: f64, mut g: F) -> f64 {
    let rule = gl10();
    let mut total = 0.0;
    let mut hi = r;
    for _ in 0..60 {
        let lo = 0.5 * hi;
        total += rule.integrate(lo, hi, &mut g);
        hi = lo;
    }
    total
}

fn cumtrapz(x: &[f64], y: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; x.len()];
    for i in 1..x.len() {
        out[i] = out[i - 1] + 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
    }
    out
}

/// Start values at a small radius from the integral form
/// `w(r) = -(1/q(r)) ∫_0^r q f(v)`, `v(r) = λ + ∫_0^r φ_{p'}(w)`.
pub fn startup(prob: &Problem, lambda: f64, r1: Option<f64>, r_max: f64) -> Result<StartupState> {
    let pc = prob.p.pconj;
    let fl = prob.nonlin.f(lambda);
    if !fl.is_finite() {
        return Err(Error::Domain(format!("f({lambda}) is not finite")));
    }
    let mut r = r1.unwrap_or_else(|| 1e-2f64.min(0.1 * r_max));
    if fl == 0.0 {
        return Ok(StartupState {
            r1: r,
            v: lambda,
            w: 0.0,
            shrinks: 0,
        });
    }
    let w0 = |t: f64| -prob.weight.q_ratio(t) * fl;
    let deviation = |r: f64| integrate_dyadic(r, |t| phi(w0(t), pc));
    if r1.is_none() {
        for _ in 0..400 {
            if deviation(r).abs() <= 1e-6 * lambda.abs() {
                break;
            }
            r *= 0.5;
        }
    }
    let mut correction = f64::NAN;
    for shrinks in 0..=20 {
        let dev = deviation(r);
        let mut t = vec![0.0];
        t.extend(crate::numeric::geometric_grid(r * 1e-18, r, 600));
        let w0s: Vec<f64> = t
            .iter()
            .map(|&x| if x == 0.0 { 0.0 } else { w0(x) })
            .collect();
        let v1: Vec<f64> = cumtrapz(&t, &w0s.iter().map(|&w| phi(w, pc)).collect::<Vec<_>>())
            .iter()
            .map(|c| lambda + c)
            .collect();
        let g: Vec<f64> = t
            .iter()
            .zip(&v1)
            .map(|(&x, &v)| {
                if x == 0.0 {
                    0.0
                } else {
                    prob.weight.q(x) * (prob.nonlin.f(v) - fl)
                }
            })
            .collect();
        let cg = cumtrapz(&t, &g);
        let w1: Vec<f64> = t
            .iter()
            .zip(&w0s)
            .zip(&cg)
            .map(|((&x, &w), &c)| {
                if x == 0.0 {
                    0.0
                } else {
                    w - c / prob.weight.q(x)
                }
            })
            .collect();
        let diff: Vec<f64> = w1
            .iter()
            .zip(&w0s)
            .map(|(&a, &b)| phi(a, pc) - phi(b, pc))
            .collect();
        let dv = *cumtrapz(&t, &diff).last().unwrap();
        let v = lambda + dev + dv;
        let w = *w1.last().unwrap();
        correction = dv.abs();
        if !(v.is_finite() && w.is_finite()) {
            return Err(Error::Domain(format!(
                "non-finite startup state at r = {r:e}"
            )));
        }
        if correction <= 1e-3 * lambda.abs() {
            return Ok(StartupState {
                r1: r,
                v,
                w,
                shrinks,
            });
        }
        r *= 0.5;
    }
    Err(Error::Startup {
        shrinks: 20,
        correction,
    })
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

type State = [f64; 4];

struct System<'a> {
    prob: &'a Problem,
    evals: usize,
}

impl System<'_> {
    fn rhs(&mut self, r: f64, y: &State) -> State {
        self.evals += 1;
        let p = self.prob.p;
        let (v, w) = (y[0], y[1]);
        let l = self.prob.weight.log_derivative(r);
        let fv = self.prob.nonlin.f(v);
        let wp = w.abs().powf(p.pconj);
        let rho = v.abs().powf(p.p) + (p.p - 1.0) * wp;
        let dtheta = if rho > 0.0 {
            -(p.p / p.pconj * wp + v * fv + l * v * w) / rho
        } else {
            0.0
        };
        [phi(w, p.pconj), -l * w - fv, dtheta, -l * wp]
    }

    /// A step whose error estimate also covers the `|w|^{p'-1}` cusp of `v'` near `w = 0` when `p > 2`.
    fn guarded_step(&mut self, r: f64, y: &State, k1: &State, h: f64) -> (State, State, State) {
        let (y1, mut err, k7) = self.step(r, y, k1, h);
        let dw = (y1[1] - y[1]).abs();
        if self.prob.p.p > 2.0
            && (y[1].abs().min(y1[1].abs()) <= dw || (y[1] > 0.0) != (y1[1] > 0.0))
        {
            // step doubling: the embedded pair underestimates errors at the cusp
            let (ym, _, km) = self.step(r, y, k1, 0.5 * h);
            let (y2, _, _) = self.step(r + 0.5 * h, &ym, &km, 0.5 * h);
            for i in 0..4 {
                err[i] = err[i].abs().max(1.6 * (y2[i] - y1[i]).abs());
            }
        }
        (y1, err, k7)
    }

    /// One Dormand–Prince step; returns the new state, error estimate and last stage.
    fn step(&mut self, r: f64, y: &State, k1: &State, h: f64) -> (State, State, State) {
        let mut k = [[0.0; 4]; 7];
        k[0] = *k1;
        for s in 1..7 {
            let mut ys = *y;
            for (j, kj) in k.iter().enumerate().take(s) {
                let a = A[s][j];
                if a != 0.0 {
                    for i in 0..4 {
                        ys[i] += h * a * kj[i];
                    }
                }
            }
            k[s] = self.rhs(r + C[s] * h, &ys);
            if s == 6 {
                let mut err = [0.0; 4];
                for (i, e) in err.iter_mut().enumerate() {
                    *e = h * (0..7).map(|j| E[j] * k[j][i]).sum::<f64>();
                }
                return (ys, err, k[6]);
            }
        }
        unreachable!()
    }
}

fn is_finite(y: &State) -> bool {
    y.iter().all(|v| v.is_finite())
}

/// Integrates from `v(0) = λ`, `v'(0) = 0` until a terminal condition.
pub fn solve(prob: &Problem, lambda: f64, opts: &SolveOptions) -> Result<Trajectory> {
    opts.validate()?;
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::InvalidParameter("lambda must be nonzero".into()));
    }
    let p = prob.p;
    let r_max = opts.r_max.min(0.99 * prob.weight.r_limit());
    let mut warnings = Vec::new();
    if r_max < opts.r_max {
        warnings.push(format!(
            "r_max reduced to {r_max} (range of the reduced weight)"
        ));
    }
    if lambda.abs() <= prob.nonlin.beta_plus().max(-prob.nonlin.beta_minus()) {
        warnings.push(format!("|lambda| = {} does not exceed beta", lambda.abs()));
    }
    let energy = |v: f64, w: f64| w.abs().powf(p.pconj) / p.pconj + prob.nonlin.big_f(v);
    let e0 = energy(lambda, 0.0);
    let theta0 = if lambda > 0.0 { 0.0 } else { pi_p(p)? };
    let mut traj = Trajectory {
        lambda,
        p: p.p,
        samples: vec![Sample {
            r: 0.0,
            v: lambda,
            w: 0.0,
            e: e0,
            theta: theta0,
        }],
        dissipation: vec![0.0],
        nodes: Vec::new(),
        critical_points: Vec::new(),
        double_zero: None,
        terminal: Terminal::ReachedRMax,
        settle_radius: None,
        message: None,
        warnings,
        stats: SolveStats::default(),
    };

    if prob.nonlin.f(lambda) == 0.0 {
        // constant solution
        traj.samples.push(Sample {
            r: r_max,
            v: lambda,
            w: 0.0,
            e: e0,
            theta: theta0,
        });
        traj.dissipation.push(0.0);
        if e0 < -opts.settle_tol {
            traj.terminal = Terminal::SettledNegativeEnergy;
            traj.settle_radius = Some(0.0);
        }
        return Ok(traj);
    }

    let st = startup(prob, lambda, opts.startup_radius, r_max)?;
    traj.stats.startup_radius = st.r1;
    let theta1 = p_polar_from_cartesian(st.v, st.w, p, theta0)?.theta;
    let mut r = st.r1;
    let mut y: State = [st.v, st.w, theta1, 0.0];
    let e1 = energy(y[0], y[1]);
    traj.samples.push(Sample {
        r,
        v: y[0],
        w: y[1],
        e: e1,
        theta: y[2],
    });
    traj.dissipation.push(0.0);

    let mut sys = System { prob, evals: 0 };
    let mut k1 = sys.rhs(r, &y);
    let mut h = 0.1 * st.r1;
    let mut err_prev: f64 = 1e-4;
    let h_floor = |r: f64| 1e-14 * r.max(1e-300);
    let land_w = p.p > 2.0;

    let norm = |y0: &State, y1: &State, e: &State| -> f64 {
        let mut acc = 0.0;
        for i in 0..4 {
            let sc = opts.abs_tol + opts.rel_tol * y0[i].abs().max(y1[i].abs());
            acc += (e[i] / sc).powi(2);
        }
        (acc / 4.0).sqrt()
    };

    loop {
        if traj.stats.accepted >= opts.max_steps {
            traj.terminal = Terminal::StepFailure;
            traj.message = Some(format!(
                "step limit {} reached at r = {r:e}",
                opts.max_steps
            ));
            break;
        }
        if r >= r_max * (1.0 - 1e-15) {
            traj.terminal = Terminal::ReachedRMax;
            break;
        }
        let h_try = h.min(r_max - r);
        let (y_new, err, k7) = sys.guarded_step(r, &y, &k1, h_try);
        if !is_finite(&y_new) || !is_finite(&err) {
            if !is_finite(&y) {
                return Err(Error::Domain(format!("non-finite state at r = {r:e}")));
            }
            // probe the right-hand side to distinguish bad inputs from a too-large step
            let probe = sys.rhs(r + h_try, &y);
            if !is_finite(&probe) {
                let (q, fv) = (prob.weight.q(r + h_try), prob.nonlin.f(y[0]));
                if !q.is_finite() || !fv.is_finite() {
                    return Err(Error::Domain(format!(
                        "NaN in f or q near r = {:e}",
                        r + h_try
                    )));
                }
            }
            h = 0.25 * h_try;
            traj.stats.rejected += 1;
            if h < h_floor(r) {
                traj.terminal = Terminal::StepFailure;
                traj.message = Some(format!("step size underflow at r = {r:e}"));
                break;
            }
            continue;
        }
        let en = norm(&y, &y_new, &err);
        if en > 1.0 {
            traj.stats.rejected += 1;
            h = h_try * (0.9 * en.powf(-0.2)).max(0.2);
            if h < h_floor(r) {
                traj.terminal = Terminal::StepFailure;
                traj.message = Some(format!("step size underflow at r = {r:e}"));
                break;
            }
            continue;
        }

        // events: sign changes of v (nodes) and of w (critical points)
        let node = (y[0] > 0.0) != (y_new[0] > 0.0);
        let crit = (y[1] > 0.0) != (y_new[1] > 0.0);
        let mut h_take = h_try;
        let mut event: Option<(usize, f64)> = None;
        if node || crit {
            // land on the earliest crossing, just past the root
            let tol = 1e-13 * (r + h_try);
            for (comp, flag) in [(0usize, node), (1usize, crit)] {
                if !flag {
                    continue;
                }
                let s0 = y[comp] > 0.0;
                let (mut lo, mut hi) = (0.0, h_try);
                while hi - lo > tol {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    let (ys, _, _) = sys.step(r, &y, &k1, mid);
                    if (ys[comp] > 0.0) != s0 {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                if event.is_none() || hi < h_take {
                    h_take = hi;
                    event = Some((comp, r + 0.5 * (lo + hi)));
                }
            }
        }
        let (y_acc, k_next) = if h_take == h_try {
            (y_new, k7)
        } else {
            let (ys, es, _) = sys.guarded_step(r, &y, &k1, h_take);
            // the landing step is error-controlled like any other
            if norm(&y, &ys, &es) > 1.0 {
                traj.stats.rejected += 1;
                h = 0.5 * h_take;
                if h < h_floor(r) {
                    traj.terminal = Terminal::StepFailure;
                    traj.message = Some(format!("step size underflow at r = {r:e}"));
                    break;
                }
                continue;
            }
            (ys, sys.rhs(r + h_take, &ys))
        };
        r += h_take;
        y = y_acc;
        k1 = k_next;
        traj.stats.accepted += 1;
        let e = energy(y[0], y[1]);
        traj.samples.push(Sample {
            r,
            v: y[0],
            w: y[1],
            e,
            theta: y[2],
        });
        traj.dissipation.push(y[3]);

        // step-size update (PI control)
        let en_c = en.max(1e-10);
        let fac = 0.9 * en_c.powf(-0.7 / 5.0) * err_prev.powf(0.4 / 5.0);
        err_prev = en_c;
        let h_next = h_try * fac.clamp(0.2, 5.0);
        h = if h_take < h_try {
            h_next.max(h_take)
        } else {
            h_next
        };

        let rho = y[0].abs().powf(p.p) + (p.p - 1.0) * y[1].abs().powf(p.pconj);
        let at_double_zero =
            prob.compact_support && rho < opts.double_zero_tol && e.abs() < opts.double_zero_tol;
        if let Some((comp, r_event)) = event {
            if comp == 0 && !at_double_zero {
                traj.nodes.push(r_event);
            } else if comp == 1 {
                traj.critical_points.push(r_event);
                if land_w && prob.nonlin.f(y[0]).abs() <= 1e-12 * (1.0 + y[0].abs()) {
                    traj.terminal = Terminal::UniquenessBoundary;
                    traj.message = Some(format!("w = 0 with f(v) = 0 at r = {r_event:e}"));
                    break;
                }
            }
        }
        if at_double_zero {
            let remaining = if y[0] * y[1] < 0.0 {
                let sign = y[0].signum();
                tanh_sinh(0.0, y[0].abs(), 1e-8, |s, _, _| {
                    (p.pconj * prob.nonlin.big_f(sign * s).abs()).powf(-1.0 / p.p)
                })
                .map(|q| q.value)
                .unwrap_or(0.0)
            } else {
                0.0
            };
            traj.double_zero = Some(r + remaining);
            traj.terminal = Terminal::DoubleZero;
            break;
        }
        if traj.nodes.len() > opts.max_nodes {
            traj.terminal = Terminal::MaxNodes;
            break;
        }
        if e < -opts.settle_tol && traj.settle_radius.is_none() {
            traj.settle_radius = Some(r);
            if opts.stop_on_settle {
                traj.terminal = Terminal::SettledNegativeEnergy;
                break;
            }
        }
        if let Some(level) = opts.stop_below_energy {
            if e < level {
                traj.terminal = Terminal::EnergyLevel;
                break;
            }
        }
    }
    if traj.terminal == Terminal::ReachedRMax && traj.settle_radius.is_some() {
        traj.terminal = Terminal::SettledNegativeEnergy;
    }
    traj.stats.rhs_evals = sys.evals;
    Ok(traj)
}
