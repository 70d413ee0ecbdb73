//! Generalized p-trigonometric functions `(cos_{p'}, sin_{p'})` and the odd
//! power maps `φ_p`, `Φ_p`.
//!
//! The pair solves `x' = -φ_{p'}(y)`, `y' = φ_p(x)`, `x(0) = 1`, `y(0) = 0` and
//! conserves `|x|^p + (p-1)|y|^{p'} = 1`. One quarter period is tabulated per
//! exponent, the rest follows from the reflection symmetries of the system.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{gl10, hermite, segment_index, tanh_sinh};

/// Exponent `p > 1` together with its Hölder conjugate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct PExponent {
    pub p: f64,
    pub pconj: f64,
}

impl PExponent {
    pub fn new(p: f64) -> Result<Self> {
        if !(p.is_finite() && p > 1.0) {
            return Err(Error::InvalidParameter(format!(
                "exponent p must be > 1, got {p}"
            )));
        }
        Ok(Self {
            p,
            pconj: p / (p - 1.0),
        })
    }

    /// The conjugate exponent as a `PExponent`.
    pub fn conjugate(self) -> Self {
        Self {
            p: self.pconj,
            pconj: self.p,
        }
    }
}

impl TryFrom<f64> for PExponent {
    type Error = Error;
    fn try_from(p: f64) -> Result<Self> {
        Self::new(p)
    }
}

impl From<PExponent> for f64 {
    fn from(e: PExponent) -> f64 {
        e.p
    }
}

/// Generalized polar coordinates of a phase-plane point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PPolar {
    pub rho: f64,
    pub theta: f64,
}

/// `|s|^{p-2} s`, with `φ_p(0) = 0`.
#[inline]
pub fn phi_p(s: f64, p: PExponent) -> f64 {
    phi(s, p.p)
}

/// `|s|^{p-2} s` for a raw exponent.
#[inline]
pub fn phi(s: f64, p: f64) -> f64 {
    if s == 0.0 {
        0.0
    } else if p == 2.0 {
        s
    } else {
        s.abs().powf(p - 1.0).copysign(s)
    }
}

/// `|s|^p / p`.
#[inline]
pub fn capital_phi_p(s: f64, p: PExponent) -> f64 {
    if s == 0.0 {
        0.0
    } else {
        s.abs().powf(p.p) / p.p
    }
}

fn pi_cache() -> &'static Mutex<HashMap<u64, f64>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, f64>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Half period `π_p` of the `(cos_{p'}, sin_{p'})` system.
pub fn pi_p(p: PExponent) -> Result<f64> {
    let key = p.p.to_bits();
    if let Some(v) = pi_cache().lock().unwrap().get(&key) {
        return Ok(*v);
    }
    let pp = p.p;
    let scale = (pp - 1.0).powf(1.0 / pp);
    let res = tanh_sinh(0.0, 1.0, 1e-14, |x, _, db| {
        // 1 - x^p evaluated from the distance to 1
        let one_minus = if db < 0.5 {
            -(pp * (-db).ln_1p()).exp_m1()
        } else {
            1.0 - x.powf(pp)
        };
        one_minus.powf(-1.0 / pp)
    })?;
    let v = 2.0 * scale * res.value;
    pi_cache().lock().unwrap().insert(key, v);
    Ok(v)
}

/// Quarter-period table for one exponent.
#[derive(Debug)]
struct Table {
    p: f64,
    pc: f64,
    quarter: f64,
    // near theta = 0, parametrized by y
    th1: Vec<f64>,
    y1: Vec<f64>,
    // near theta = T, parametrized by x (ascending x, descending theta)
    th2: Vec<f64>,
    x2: Vec<f64>,
    theta_split: f64,
}

const TABLE_NODES: usize = 5000;

impl Table {
    fn build(p: f64) -> Table {
        let pc = p / (p - 1.0);
        let rule = gl10();
        let n = TABLE_NODES;
        let y_split = (0.5 / (p - 1.0)).powf(1.0 / pc);
        let x_split = 0.5f64.powf(1.0 / p);

        let dth_dy = |t: f64| -> f64 {
            let x_p = 1.0 - (p - 1.0) * t.powf(pc);
            x_p.max(0.0).powf(-(p - 1.0) / p)
        };
        let mut y1 = Vec::with_capacity(n + 1);
        let mut th1 = Vec::with_capacity(n + 1);
        y1.push(0.0);
        th1.push(0.0);
        for i in 1..=n {
            let s = i as f64 / n as f64;
            let y = y_split * s * s;
            let prev = *y1.last().unwrap();
            let inc = rule.integrate(prev, y, dth_dy);
            th1.push(th1.last().unwrap() + inc);
            y1.push(y);
        }
        let theta_split = *th1.last().unwrap();

        let dth_dx = |s: f64| -> f64 { ((1.0 - s.powf(p)) / (p - 1.0)).powf(-1.0 / p) };
        let mut x2 = Vec::with_capacity(n + 1);
        let mut cum = Vec::with_capacity(n + 1);
        x2.push(0.0);
        cum.push(0.0);
        for i in 1..=n {
            let s = i as f64 / n as f64;
            let x = x_split * s * s;
            let prev = *x2.last().unwrap();
            let inc = rule.integrate(prev, x, dth_dx);
            cum.push(cum.last().unwrap() + inc);
            x2.push(x);
        }
        let quarter = theta_split + cum.last().unwrap();
        let th2 = cum.iter().map(|c| quarter - c).collect();
        Table {
            p,
            pc,
            quarter,
            th1,
            y1,
            th2,
            x2,
            theta_split,
        }
    }

    fn x_from_y(&self, y: f64) -> f64 {
        (1.0 - (self.p - 1.0) * y.abs().powf(self.pc))
            .max(0.0)
            .powf(1.0 / self.p)
    }

    fn y_from_x(&self, x: f64) -> f64 {
        ((1.0 - x.abs().powf(self.p)).max(0.0) / (self.p - 1.0)).powf(1.0 / self.pc)
    }

    /// `(x, y)` for `theta` in `[0, T]`.
    fn first_quadrant(&self, theta: f64) -> (f64, f64) {
        let theta = theta.clamp(0.0, self.quarter);
        if theta <= self.theta_split {
            let i = segment_index(&self.th1, theta);
            let (t0, t1) = (self.th1[i], self.th1[i + 1]);
            let (a, b) = (self.y1[i], self.y1[i + 1]);
            let (xa, xb) = (self.x_from_y(a), self.x_from_y(b));
            let da = xa.powf(self.p - 1.0);
            let db = xb.powf(self.p - 1.0);
            let y = hermite(t0, t1, a, b, da, db, theta);
            (self.x_from_y(y), y)
        } else {
            // th2 is descending; search on the reversed orientation
            let n = self.th2.len();
            let j = self.th2.partition_point(|&t| t > theta).clamp(1, n - 1);
            let (t0, t1) = (self.th2[j - 1], self.th2[j]);
            let (a, b) = (self.x2[j - 1], self.x2[j]);
            let da = -self.y_from_x(a).powf(self.pc - 1.0);
            let db = -self.y_from_x(b).powf(self.pc - 1.0);
            let x = hermite(t0, t1, a, b, da, db, theta);
            (x, self.y_from_x(x))
        }
    }

    /// Angle in `[0, T]` of a first-quadrant point on the unit level set.
    fn first_quadrant_angle(&self, x: f64, y: f64) -> f64 {
        if x.powf(self.p) >= 0.5 {
            let i = segment_index(&self.y1, y);
            let (a, b) = (self.y1[i], self.y1[i + 1]);
            let da = self.x_from_y(a).powf(1.0 - self.p);
            let db = self.x_from_y(b).powf(1.0 - self.p);
            hermite(a, b, self.th1[i], self.th1[i + 1], da, db, y)
        } else {
            let i = segment_index(&self.x2, x);
            let (a, b) = (self.x2[i], self.x2[i + 1]);
            let da = -self.y_from_x(a).powf(1.0 - self.pc);
            let db = -self.y_from_x(b).powf(1.0 - self.pc);
            hermite(a, b, self.th2[i], self.th2[i + 1], da, db, x)
        }
    }
}

fn table_for(p: f64) -> Arc<Table> {
    static TABLES: OnceLock<Mutex<HashMap<u64, Arc<Table>>>> = OnceLock::new();
    let map = TABLES.get_or_init(|| Mutex::new(HashMap::new()));
    let key = p.to_bits();
    if let Some(t) = map.lock().unwrap().get(&key) {
        return t.clone();
    }
    let table = Arc::new(Table::build(p));
    map.lock().unwrap().entry(key).or_insert(table).clone()
}

/// `(cos_{p'}(θ), sin_{p'}(θ))`.
pub fn cos_sin_pp(theta: f64, p: PExponent) -> (f64, f64) {
    let t = table_for(p.p);
    let q = t.quarter;
    let period = 4.0 * q;
    let mut th = theta.rem_euclid(period);
    if th >= period {
        th = 0.0;
    }
    if th <= q {
        t.first_quadrant(th)
    } else if th <= 2.0 * q {
        let (x, y) = t.first_quadrant(2.0 * q - th);
        (-x, y)
    } else if th <= 3.0 * q {
        let (x, y) = t.first_quadrant(th - 2.0 * q);
        (-x, -y)
    } else {
        let (x, y) = t.first_quadrant(period - th);
        (x, -y)
    }
}

/// Inverse of `(ρ, θ) ↦ (ρ^{1/p} cos_{p'}θ, ρ^{1/p'} sin_{p'}θ)`, with the angle
/// taken on the branch nearest `theta_hint`.
pub fn p_polar_from_cartesian(v: f64, w: f64, p: PExponent, theta_hint: f64) -> Result<PPolar> {
    if v == 0.0 && w == 0.0 {
        return Err(Error::PolarOrigin);
    }
    let rho = v.abs().powf(p.p) + (p.p - 1.0) * w.abs().powf(p.pconj);
    let x = v / rho.powf(1.0 / p.p);
    let y = w / rho.powf(1.0 / p.pconj);
    let t = table_for(p.p);
    let q = t.quarter;
    let base = match (x >= 0.0, y >= 0.0) {
        (true, true) => t.first_quadrant_angle(x, y),
        (false, true) => 2.0 * q - t.first_quadrant_angle(-x, y),
        (false, false) => 2.0 * q + t.first_quadrant_angle(-x, -y),
        (true, false) => 4.0 * q - t.first_quadrant_angle(x, -y),
    };
    let period = 4.0 * q;
    let n = ((theta_hint - base) / period).round();
    Ok(PPolar {
        rho,
        theta: base + n * period,
    })
}

/// Inverse map from polar to phase-plane coordinates.
pub fn cartesian_from_p_polar(polar: PPolar, p: PExponent) -> (f64, f64) {
    let (c, s) = cos_sin_pp(polar.theta, p);
    (
        polar.rho.powf(1.0 / p.p) * c,
        polar.rho.powf(1.0 / p.pconj) * s,
    )
}
