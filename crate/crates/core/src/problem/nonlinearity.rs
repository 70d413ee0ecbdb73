//! Nonlinearities `f` with primitive `F` and the zeros `β− < 0 < β+` of `F`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{brent, gl10, segment_index};
use crate::ptrig::PExponent;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NonlinearityKind {
    DoublePower,
    Power,
    PowerLog,
    CriticalExtended,
    User,
}

#[derive(Debug)]
enum Repr {
    DoublePower { gamma: f64, m: f64 },
    Power { gamma: f64 },
    PowerLog(PowerLog),
    CriticalExtended(CriticalFill),
    User(Tabulated),
}

/// A continuous nonlinearity `f` with `f(0) = 0`.
#[derive(Debug, Clone)]
pub struct Nonlinearity {
    repr: Arc<Repr>,
    beta_minus: f64,
    beta_plus: f64,
    warnings: Vec<String>,
}

/// `f(s) = |s|^{γ-1}s - |s|^{m-1}s`.
pub fn make_double_power(gamma: f64, m: f64) -> Result<Nonlinearity> {
    if !(m > 0.0 && gamma > m && gamma.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "double power needs gamma > m > 0, got gamma={gamma}, m={m}"
        )));
    }
    let beta = ((gamma + 1.0) / (m + 1.0)).powf(1.0 / (gamma - m));
    Ok(Nonlinearity {
        repr: Arc::new(Repr::DoublePower { gamma, m }),
        beta_minus: -beta,
        beta_plus: beta,
        warnings: Vec::new(),
    })
}

/// `f(s) = |s|^{γ-1}s`. Its primitive has no negative region, so `β± = 0`.
pub fn make_power(gamma: f64) -> Result<Nonlinearity> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "power nonlinearity needs gamma > 0, got {gamma}"
        )));
    }
    Ok(Nonlinearity {
        repr: Arc::new(Repr::Power { gamma }),
        beta_minus: 0.0,
        beta_plus: 0.0,
        warnings: Vec::new(),
    })
}

/// Odd `f` equal to `|s|^{2*-2}s` for `|s| >= β`, with a quartic fill on `(0, β)`
/// that makes `F` negative on `(0, β)` and zero at `β`.
pub fn make_critical_extended(d: u32, beta: f64) -> Result<Nonlinearity> {
    if d < 3 {
        return Err(Error::InvalidParameter(format!(
            "critical nonlinearity needs d >= 3, got {d}"
        )));
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "beta must be positive, got {beta}"
        )));
    }
    let fill = CriticalFill::new(d, beta);
    let bp = fill.zero;
    Ok(Nonlinearity {
        repr: Arc::new(Repr::CriticalExtended(fill)),
        beta_minus: -bp,
        beta_plus: bp,
        warnings: Vec::new(),
    })
}

/// Odd `f` equal to `|s|^{p*-2}s / (log|s|)^ζ` for `|s| >= s0`.
pub fn make_power_log(d: u32, p: PExponent, zeta: f64, s0: Option<f64>) -> Result<Nonlinearity> {
    let df = d as f64;
    if !(p.p < df) {
        return Err(Error::InvalidParameter(format!(
            "power-log needs p < d, got p={}, d={d}",
            p.p
        )));
    }
    let beta_core = 2f64.sqrt();
    let s_min = (2.0 * std::f64::consts::E).max(2.0 * beta_core);
    let s0 = s0.unwrap_or(1.01 * s_min);
    if !(s0 > s_min) {
        return Err(Error::InvalidParameter(format!(
            "power-log needs s0 > {s_min}, got {s0}"
        )));
    }
    if !(zeta.is_finite() && zeta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "zeta must be positive, got {zeta}"
        )));
    }
    let mut warnings = Vec::new();
    let threshold = p.p / (df - p.p);
    if zeta <= threshold {
        warnings.push(format!(
            "zeta = {zeta} <= p/(d-p) = {threshold}: growth condition of the family violated"
        ));
    }
    let pl = PowerLog::new(df * p.p / (df - p.p), zeta, s0);
    Ok(Nonlinearity {
        repr: Arc::new(Repr::PowerLog(pl)),
        beta_minus: -beta_core,
        beta_plus: beta_core,
        warnings,
    })
}

/// Natural cubic spline `f` through user samples, extended linearly.
pub fn make_user_nonlinearity(s: Vec<f64>, f: Vec<f64>, s_max: f64) -> Result<Nonlinearity> {
    let tab = Tabulated::new(s, f)?;
    let repr = Arc::new(Repr::User(tab));
    let mut nl = Nonlinearity {
        repr,
        beta_minus: 0.0,
        beta_plus: 0.0,
        warnings: Vec::new(),
    };
    nl.beta_plus = nl.find_beta(1.0, s_max).unwrap_or(0.0);
    nl.beta_minus = -nl.find_beta(-1.0, s_max).unwrap_or(0.0);
    Ok(nl)
}

impl Nonlinearity {
    pub fn kind(&self) -> NonlinearityKind {
        match &*self.repr {
            Repr::DoublePower { .. } => NonlinearityKind::DoublePower,
            Repr::Power { .. } => NonlinearityKind::Power,
            Repr::PowerLog(_) => NonlinearityKind::PowerLog,
            Repr::CriticalExtended(_) => NonlinearityKind::CriticalExtended,
            Repr::User(_) => NonlinearityKind::User,
        }
    }

    pub fn beta_minus(&self) -> f64 {
        self.beta_minus
    }

    pub fn beta_plus(&self) -> f64 {
        self.beta_plus
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn f(&self, s: f64) -> f64 {
        match &*self.repr {
            Repr::DoublePower { gamma, m } => {
                let a = s.abs();
                if a == 0.0 {
                    return 0.0;
                }
                (a.powf(*gamma) - a.powf(*m)) * s.signum()
            }
            Repr::Power { gamma } => {
                if s == 0.0 {
                    0.0
                } else {
                    s.abs().powf(*gamma).copysign(s)
                }
            }
            Repr::PowerLog(pl) => pl.f(s.abs()) * s.signum(),
            Repr::CriticalExtended(c) => c.f(s.abs()) * s.signum(),
            Repr::User(t) => t.f(s),
        }
    }

    /// `F(s) = ∫_0^s f`.
    pub fn big_f(&self, s: f64) -> f64 {
        match &*self.repr {
            Repr::DoublePower { gamma, m } => {
                let a = s.abs();
                a.powf(gamma + 1.0) / (gamma + 1.0) - a.powf(m + 1.0) / (m + 1.0)
            }
            Repr::Power { gamma } => s.abs().powf(gamma + 1.0) / (gamma + 1.0),
            Repr::PowerLog(pl) => pl.big_f(s.abs()),
            Repr::CriticalExtended(c) => c.big_f(s.abs()),
            Repr::User(t) => t.big_f(s),
        }
    }

    /// Exponent `κ` in `F(s) ≈ -c |s|^κ` near `0` when known in closed form.
    pub fn near_zero_exponent(&self) -> Option<f64> {
        match &*self.repr {
            Repr::DoublePower { m, .. } => Some(m + 1.0),
            Repr::PowerLog(_) | Repr::CriticalExtended(_) => Some(2.0),
            _ => None,
        }
    }

    /// Smallest `s > 0` in direction `sign` past the negative well with `F(s) = 0`.
    fn find_beta(&self, sign: f64, s_max: f64) -> Option<f64> {
        let n = 2000;
        let lo = s_max * 1e-12;
        let ratio = (s_max / lo).ln() / n as f64;
        let mut prev = lo;
        let mut seen_negative = false;
        for i in 0..=n {
            let s = lo * (ratio * i as f64).exp();
            let v = self.big_f(sign * s);
            if v < 0.0 {
                seen_negative = true;
            } else if seen_negative && v >= 0.0 {
                return brent(|x| self.big_f(sign * x), prev, s, 1e-15 * s).ok();
            }
            prev = s;
        }
        None
    }

    /// Estimate of `γ = lim s f(s)/F(s) - 1` by extrapolation in `1/log s`.
    pub fn growth_exponent(&self) -> Option<f64> {
        let ratio = |s: f64| {
            let big = self.big_f(s);
            if big > 0.0 && big.is_finite() {
                Some(s * self.f(s) / big - 1.0)
            } else {
                None
            }
        };
        let rough = ratio(1e4)?;
        let top = (250.0 / (rough + 1.0).max(1.0)).min(60.0);
        let pts: Vec<(f64, f64)> = (1..=4)
            .filter_map(|j| {
                let e = top * j as f64 / 4.0;
                let s = 10f64.powf(e);
                ratio(s).map(|v| (1.0 / s.ln(), v))
            })
            .collect();
        if pts.len() < 2 {
            return Some(rough);
        }
        Some(neville_at_zero(&pts))
    }
}

fn neville_at_zero(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len();
    let mut p: Vec<f64> = pts.iter().map(|v| v.1).collect();
    for k in 1..n {
        for i in 0..n - k {
            let (xi, xk) = (pts[i].0, pts[i + k].0);
            p[i] = (xk * p[i] - xi * p[i + 1]) / (xk - xi);
        }
    }
    p[0]
}

#[derive(Debug)]
struct PowerLog {
    exponent: f64,
    zeta: f64,
    s0: f64,
    kappa: f64,
    f_bridge_end: f64,
    nodes: Vec<f64>,
    cum: Vec<f64>,
}

impl PowerLog {
    fn new(pstar: f64, zeta: f64, s0: f64) -> Self {
        let exponent = pstar - 1.0;
        let f_s0 = s0.powf(exponent) / s0.ln().powf(zeta);
        let kappa = (f_s0 / 6.0).ln() / (s0 / 2.0).ln();
        let mut pl = PowerLog {
            exponent,
            zeta,
            s0,
            kappa,
            f_bridge_end: 0.0,
            nodes: vec![],
            cum: vec![],
        };
        pl.f_bridge_end = pl.bridge_primitive(s0);
        let rule = gl10();
        let mut nodes = vec![s0];
        let mut cum = vec![pl.f_bridge_end];
        let step = 1.1f64;
        loop {
            let lo = *nodes.last().unwrap();
            let hi = lo * step;
            let inc = rule.integrate(lo, hi, |s| pl.tail_f(s));
            let next = cum.last().unwrap() + inc;
            if !next.is_finite() || next > 1e300 || hi > 1e300 {
                break;
            }
            nodes.push(hi);
            cum.push(next);
        }
        pl.nodes = nodes;
        pl.cum = cum;
        pl
    }

    fn tail_f(&self, s: f64) -> f64 {
        s.powf(self.exponent) / s.ln().powf(self.zeta)
    }

    fn bridge_primitive(&self, s: f64) -> f64 {
        // F(2) = 4 - 2 = 2; bridge f = 6 (s/2)^κ
        2.0 + 12.0 / (self.kappa + 1.0) * ((s / 2.0).powf(self.kappa + 1.0) - 1.0)
    }

    fn f(&self, s: f64) -> f64 {
        if s <= 2.0 {
            s * s * s - s
        } else if s < self.s0 {
            6.0 * (s / 2.0).powf(self.kappa)
        } else {
            self.tail_f(s)
        }
    }

    fn big_f(&self, s: f64) -> f64 {
        if s <= 2.0 {
            let s2 = s * s;
            s2 * s2 / 4.0 - s2 / 2.0
        } else if s < self.s0 {
            self.bridge_primitive(s)
        } else if s > *self.nodes.last().unwrap() {
            f64::INFINITY
        } else {
            let i = segment_index(&self.nodes, s);
            self.cum[i] + gl10().integrate(self.nodes[i], s, |t| self.tail_f(t))
        }
    }
}

#[derive(Debug)]
struct CriticalFill {
    n: f64,
    beta: f64,
    a: f64,
    b: f64,
    c: f64,
    e: f64,
    zero: f64,
}

impl CriticalFill {
    /// Quartic `β^n (a x + b x² + c x³ + e x⁴)`, `x = s/β`, with `a = -1/2`, matching
    /// `f` and `f'` at `β` and with `∫_0^β f = 0`, so `F` vanishes exactly at `β`.
    fn new(d: u32, beta: f64) -> Self {
        let df = d as f64;
        let n = (df + 2.0) / (df - 2.0);
        let a = -0.5;
        let slope = n - 2.5;
        let e = (5.0 * slope - 15.0) / 2.0;
        let c = 15.0 - 4.0 * slope;
        let b = 1.0 - a - c - e;
        CriticalFill {
            n,
            beta,
            a,
            b,
            c,
            e,
            zero: beta,
        }
    }

    fn g_primitive(&self, x: f64) -> f64 {
        let x2 = x * x;
        x2 * (self.a / 2.0 + x * (self.b / 3.0 + x * (self.c / 4.0 + x * self.e / 5.0)))
    }

    fn f(&self, s: f64) -> f64 {
        if s >= self.beta {
            s.powf(self.n)
        } else {
            let x = s / self.beta;
            self.beta.powf(self.n) * x * (self.a + x * (self.b + x * (self.c + self.e * x)))
        }
    }

    fn big_f(&self, s: f64) -> f64 {
        let scale = self.beta.powf(self.n + 1.0);
        if s >= self.beta {
            (s.powf(self.n + 1.0) - scale) / (self.n + 1.0)
        } else {
            scale * self.g_primitive(s / self.beta)
        }
    }
}

#[derive(Debug)]
struct Tabulated {
    s: Vec<f64>,
    f: Vec<f64>,
    /// Second derivatives of the natural cubic spline at the knots.
    m: Vec<f64>,
    cum: Vec<f64>,
}

impl Tabulated {
    fn new(s: Vec<f64>, f: Vec<f64>) -> Result<Self> {
        if s.len() != f.len() || s.len() < 2 {
            return Err(Error::InvalidParameter(
                "user nonlinearity needs >= 2 matching (s, f) samples".into(),
            ));
        }
        if s.windows(2).any(|w| w[1] <= w[0]) || s.iter().chain(&f).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "user nonlinearity samples must be finite with increasing s".into(),
            ));
        }
        if !(s[0] < 0.0 && *s.last().unwrap() > 0.0) {
            return Err(Error::InvalidParameter(
                "user nonlinearity samples must bracket s = 0".into(),
            ));
        }
        let m = natural_spline(&s, &f);
        let mut t = Tabulated {
            s,
            f,
            m,
            cum: Vec::new(),
        };
        // accumulate outwards from the segment holding 0 so F stays accurate near 0
        let n = t.s.len();
        let seg = |i: usize| {
            let h = t.s[i + 1] - t.s[i];
            0.5 * h * (t.f[i] + t.f[i + 1]) - h * h * h * (t.m[i] + t.m[i + 1]) / 24.0
        };
        let z = segment_index(&t.s, 0.0);
        let mut cum = vec![0.0; n];
        t.cum = cum.clone();
        cum[z] = -t.raw_primitive(0.0);
        for i in z..n - 1 {
            cum[i + 1] = cum[i] + seg(i);
        }
        for i in (0..z).rev() {
            cum[i] = cum[i + 1] - seg(i);
        }
        t.cum = cum;
        Ok(t)
    }

    fn f(&self, x: f64) -> f64 {
        let n = self.s.len();
        if x < self.s[0] || x > self.s[n - 1] {
            // natural end conditions make the linear extension C²
            let (i, j) = if x < self.s[0] {
                (0, 0)
            } else {
                (n - 2, n - 1)
            };
            return self.f[j] + self.end_slope(i, j) * (x - self.s[j]);
        }
        let i = segment_index(&self.s, x);
        let h = self.s[i + 1] - self.s[i];
        let (t, u) = (x - self.s[i], self.s[i + 1] - x);
        self.m[i] * u * u * u / (6.0 * h)
            + self.m[i + 1] * t * t * t / (6.0 * h)
            + (self.f[i] / h - self.m[i] * h / 6.0) * u
            + (self.f[i + 1] / h - self.m[i + 1] * h / 6.0) * t
    }

    /// Spline slope at knot `j`, an end of segment `i`.
    fn end_slope(&self, i: usize, j: usize) -> f64 {
        let h = self.s[i + 1] - self.s[i];
        let secant = (self.f[i + 1] - self.f[i]) / h;
        if j == i {
            secant - h * (2.0 * self.m[i] + self.m[i + 1]) / 6.0
        } else {
            secant + h * (self.m[i] + 2.0 * self.m[i + 1]) / 6.0
        }
    }

    fn raw_primitive(&self, x: f64) -> f64 {
        let n = self.s.len();
        if x < self.s[0] {
            let (d, g) = (x - self.s[0], self.end_slope(0, 0));
            return self.cum[0] + self.f[0] * d + 0.5 * g * d * d;
        }
        if x > self.s[n - 1] {
            let (d, g) = (x - self.s[n - 1], self.end_slope(n - 2, n - 1));
            return self.cum[n - 1] + self.f[n - 1] * d + 0.5 * g * d * d;
        }
        let i = segment_index(&self.s, x);
        let h = self.s[i + 1] - self.s[i];
        let (t, u) = (x - self.s[i], self.s[i + 1] - x);
        let (a, b) = (
            self.f[i] / h - self.m[i] * h / 6.0,
            self.f[i + 1] / h - self.m[i + 1] * h / 6.0,
        );
        self.cum[i]
            + self.m[i] * (h.powi(4) - u.powi(4)) / (24.0 * h)
            + self.m[i + 1] * t.powi(4) / (24.0 * h)
            + 0.5 * a * (h * h - u * u)
            + 0.5 * b * t * t
    }

    fn big_f(&self, x: f64) -> f64 {
        self.raw_primitive(x)
    }
}

/// Knot second derivatives of the natural cubic spline through `(x, y)`.
fn natural_spline(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut m = vec![0.0; n];
    if n < 3 {
        return m;
    }
    // Thomas algorithm on the interior equations
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        let (h0, h1) = (x[i] - x[i - 1], x[i + 1] - x[i]);
        let rhs = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
        let diag = 2.0 * (h0 + h1) - h0 * c[i - 1];
        c[i] = h1 / diag;
        d[i] = (rhs - h0 * d[i - 1]) / diag;
    }
    for i in (1..n - 1).rev() {
        m[i] = d[i] - c[i] * m[i + 1];
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_power_betas() {
        let nl = make_double_power(3.0, 1.0).unwrap();
        assert!((nl.beta_plus() - 2f64.sqrt()).abs() < 1e-15);
        assert!(nl.big_f(nl.beta_plus()).abs() < 1e-14);
        assert!(nl.big_f(nl.beta_minus()).abs() < 1e-14);
        assert_eq!(nl.f(0.0), 0.0);
        for i in 1..100 {
            let s = nl.beta_plus() * i as f64 / 100.0;
            assert!(nl.big_f(s) < 0.0 && nl.big_f(-s) < 0.0);
        }
        assert!(make_double_power(1.0, 1.0).is_err());
        assert!((nl.growth_exponent().unwrap() - 3.0).abs() < 1e-9);
    }

    #[test]
    fn primitive_matches_quadrature() {
        let p = PExponent::new(2.0).unwrap();
        let all = [
            make_double_power(3.0, 0.5).unwrap(),
            make_critical_extended(3, 1.0).unwrap(),
            make_critical_extended(5, 0.7).unwrap(),
            make_power_log(3, p, 4.0, None).unwrap(),
        ];
        for nl in &all {
            for s in [0.3, 1.1, 2.5, 5.0, 9.0, 40.0] {
                let mut cuts: Vec<f64> = [
                    0.0,
                    0.35,
                    0.5,
                    0.7,
                    1.0,
                    2.0,
                    1.01 * 2.0 * std::f64::consts::E,
                ]
                .into_iter()
                .filter(|c| *c < s)
                .collect();
                cuts.push(s);
                let q: f64 = cuts
                    .windows(2)
                    .map(|w| {
                        crate::numeric::tanh_sinh(w[0], w[1], 1e-12, |t, _, _| nl.f(t))
                            .unwrap_or_else(|e| panic!("{:?} {w:?}: {e}", nl.kind()))
                            .value
                    })
                    .sum();
                assert!(
                    (nl.big_f(s) - q).abs() < 1e-9 * q.abs().max(1.0),
                    "{:?} s={s}",
                    nl.kind()
                );
                assert!((nl.big_f(-s) - nl.big_f(s)).abs() < 1e-12 * q.abs().max(1.0));
            }
            assert!(nl.big_f(nl.beta_plus()).abs() < 1e-10);
            assert!(nl.f(nl.beta_plus()) > 0.0);
        }
    }

    #[test]
    fn critical_fill_properties() {
        for d in 3..8 {
            let nl = make_critical_extended(d, 1.3).unwrap();
            let n = (d as f64 + 2.0) / (d as f64 - 2.0);
            assert!((nl.f(2.6) - 2.6f64.powf(n)).abs() < 1e-12 * 2.6f64.powf(n));
            assert_eq!(nl.beta_plus(), 1.3);
            assert!(nl.big_f(1.3).abs() < 1e-12);
            assert!((1..100).all(|i| nl.big_f(0.013 * i as f64) < 0.0));
            let changes = (1..200)
                .filter(|i| nl.f(0.0065 * *i as f64) * nl.f(0.0065 * (*i + 1) as f64) <= 0.0)
                .count();
            assert_eq!(changes, 1);
            // continuity at β
            assert!((nl.f(1.3 - 1e-12) - nl.f(1.3)).abs() < 1e-9);
            assert_eq!(nl.f(-0.4), -nl.f(0.4));
        }
    }

    #[test]
    fn power_log_growth() {
        let p = PExponent::new(2.0).unwrap();
        let nl = make_power_log(3, p, 4.0, None).unwrap();
        assert!(nl.warnings().is_empty());
        let g = nl.growth_exponent().unwrap();
        assert!((g + 1.0 - 6.0).abs() < 1e-2, "{g}");
        let s = 6.0 * std::f64::consts::E;
        assert!(nl.f(s) > 0.0 && nl.f(s).is_finite());
        let weak = make_power_log(3, p, 1.0, None).unwrap();
        assert_eq!(weak.warnings().len(), 1);
    }

    #[test]
    fn user_table() {
        let s: Vec<f64> = (-40..=40).map(|i| i as f64 * 0.1).collect();
        let f: Vec<f64> = s.iter().map(|x| x * x * x - x).collect();
        let nl = make_user_nonlinearity(s, f, 4.0).unwrap();
        assert!((nl.beta_plus() - 2f64.sqrt()).abs() < 1e-2);
        assert!((nl.beta_minus() + 2f64.sqrt()).abs() < 1e-2);
        assert!(nl.big_f(nl.beta_plus()).abs() < 1e-12);
        for x in [-5.0f64, -3.95, -1.23, 0.0, 0.37, 2.5, 3.99, 4.5] {
            if x.abs() <= 4.0 {
                assert!((nl.f(x) - (x * x * x - x)).abs() < 5e-2, "f({x})");
            }
            // Gauss-Legendre is exact on each cubic piece between knots
            let mut cuts: Vec<f64> = (0..=50)
                .map(|i| i as f64 * 0.1 * x.signum())
                .take_while(|c| c.abs() < x.abs())
                .collect();
            cuts.push(x);
            let oracle: f64 = cuts
                .windows(2)
                .map(|w| crate::numeric::gl10().integrate(w[0], w[1], |t| nl.f(t)))
                .sum();
            assert!(
                (nl.big_f(x) - oracle).abs() < 1e-11 * (1.0 + oracle.abs()),
                "F({x})"
            );
        }
        let h = 1e-5;
        for x in [-4.0, -0.1, 0.1, 4.0] {
            let d2 = (nl.f(x + h) - 2.0 * nl.f(x) + nl.f(x - h)) / (h * h);
            let d2l = (nl.f(x) - 2.0 * nl.f(x - h) + nl.f(x - 2.0 * h)) / (h * h);
            assert!((d2 - d2l).abs() < 1e-2, "f'' jumps at {x}");
        }
    }
}
