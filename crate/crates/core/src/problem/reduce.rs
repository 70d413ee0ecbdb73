//! Two-weight problems `(a φ_p(u'))' + b f(u) = 0` and their reduction to a
//! single weight through `t = χ(r) = ∫_0^r (b/a)^{1/p}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{gl10, hermite, segment_index};
use crate::ptrig::PExponent;

/// Radial profile `r^e (r^s / (1 + r^s))^{σ/s}`; `σ = 0` is a pure power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub exponent: f64,
    #[serde(default = "one")]
    pub s: f64,
    #[serde(default)]
    pub sigma: f64,
}

fn one() -> f64 {
    1.0
}

impl Profile {
    pub fn power(exponent: f64) -> Self {
        Self {
            exponent,
            s: 1.0,
            sigma: 0.0,
        }
    }

    pub fn saturated(exponent: f64, s: f64, sigma: f64) -> Self {
        Self { exponent, s, sigma }
    }

    fn validate(&self) -> Result<()> {
        if !self.exponent.is_finite() || !(self.s > 0.0) || !(self.sigma >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "profile needs finite exponent, s > 0 and sigma >= 0, got {self:?}"
            )));
        }
        Ok(())
    }

    pub fn ln_value(&self, r: f64) -> f64 {
        let lr = r.ln();
        if self.sigma == 0.0 {
            return self.exponent * lr;
        }
        // ln(r^s/(1+r^s)) = -ln(1 + r^{-s})
        let sl = self.s * lr;
        let ln_sat = if sl < 0.0 {
            sl - sl.exp().ln_1p()
        } else {
            -(-sl).exp().ln_1p()
        };
        self.exponent * lr + self.sigma / self.s * ln_sat
    }

    pub fn value(&self, r: f64) -> f64 {
        self.ln_value(r).exp()
    }

    /// `d ln(profile) / dr`.
    pub fn log_derivative(&self, r: f64) -> f64 {
        if self.sigma == 0.0 {
            return self.exponent / r;
        }
        let rs = (self.s * r.ln()).exp();
        (self.exponent + self.sigma / (1.0 + rs)) / r
    }

    pub fn exponent_at_zero(&self) -> f64 {
        self.exponent + self.sigma
    }

    pub fn exponent_at_infinity(&self) -> f64 {
        self.exponent
    }
}

/// The raw weights `(a, b)` of a two-weight radial problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightPair {
    pub a: Profile,
    pub b: Profile,
}

impl WeightPair {
    pub fn new(a: Profile, b: Profile) -> Result<Self> {
        a.validate()?;
        b.validate()?;
        Ok(Self { a, b })
    }

    /// `a = b = r^e`.
    pub fn identity(exponent: f64) -> Result<Self> {
        Self::new(Profile::power(exponent), Profile::power(exponent))
    }

    /// `a = r^{d+k-1}`, `b = r^{d+ℓ-1} (r^s/(1+r^s))^{σ/s}`.
    pub fn unified(d: f64, k: f64, ell: f64, sigma: f64, s: f64) -> Result<Self> {
        Self::new(
            Profile::power(d + k - 1.0),
            Profile::saturated(d + ell - 1.0, s, sigma),
        )
    }

    /// `a = r^{d-1}`, `b = r^{d-1} / (1 + r^σ)`.
    pub fn matukuma(d: f64, sigma: f64) -> Result<Self> {
        Self::unified(d, 0.0, -sigma, sigma, sigma)
    }

    /// `a = r^{d-1}`, `b = r^{d-1+σ-p'} / (1 + r^{p'})^{σ/p'}`.
    pub fn stellar(d: f64, sigma: f64, p: PExponent) -> Result<Self> {
        Self::unified(d, 0.0, -p.pconj, sigma, p.pconj)
    }

    /// `a = r^{d-k}`, `b = r^{d-1}`, to be used with `p = k + 1`.
    pub fn k_hessian(d: f64, k: f64) -> Result<Self> {
        Self::new(Profile::power(d - k), Profile::power(d - 1.0))
    }

    pub fn a(&self, r: f64) -> f64 {
        self.a.value(r)
    }

    pub fn b(&self, r: f64) -> f64 {
        self.b.value(r)
    }

    /// Integrand of `χ`: `(b/a)^{1/p}`.
    pub fn chi_density(&self, r: f64, p: PExponent) -> f64 {
        ((self.b.ln_value(r) - self.a.ln_value(r)) / p.p).exp()
    }

    /// `ψ = (a'/(p a) + b'/(p' b)) (a/b)^{1/p}`.
    pub fn psi(&self, r: f64, p: PExponent) -> f64 {
        let lin = self.a.log_derivative(r) / p.p + self.b.log_derivative(r) / p.pconj;
        lin / self.chi_density(r, p)
    }

    /// `a^{p'-1} b`, the quantity whose increments drive the (W4) check.
    pub fn w4_quantity(&self, r: f64, p: PExponent) -> f64 {
        ((p.pconj - 1.0) * self.a.ln_value(r) + self.b.ln_value(r)).exp()
    }

    /// Leading power of `(b/a)^{1/p}` at `0` and at infinity.
    pub fn chi_exponents(&self, p: PExponent) -> (f64, f64) {
        (
            (self.b.exponent_at_zero() - self.a.exponent_at_zero()) / p.p,
            (self.b.exponent_at_infinity() - self.a.exponent_at_infinity()) / p.p,
        )
    }

    /// Analytic (W1) verdict from the leading exponents.
    pub fn w1_analytic(&self, p: PExponent) -> std::result::Result<(), String> {
        let (c0, cinf) = self.chi_exponents(p);
        if c0 <= -1.0 {
            return Err(format!("(b/a)^(1/p) ~ r^{c0} is not integrable at 0"));
        }
        if cinf < -1.0 {
            return Err(format!(
                "(b/a)^(1/p) ~ r^{cinf} at infinity, chi stays bounded"
            ));
        }
        if self.b.exponent_at_zero() <= -1.0 {
            return Err("b is not integrable at 0".into());
        }
        Ok(())
    }
}

const R_FIRST: f64 = 1e-30;
const R_LAST: f64 = 1e30;
const PANEL_RATIO: f64 = 1.05;

/// Cumulative integral of a positive density on a geometric grid, exact near 0
/// through the substitution `u = r^{c+1}` where the density behaves like `r^c`.
#[derive(Debug, Clone)]
struct Cumulative {
    nodes: Vec<f64>,
    values: Vec<f64>,
}

impl Cumulative {
    fn build<F: Fn(f64) -> f64>(density: F, c0: f64) -> Cumulative {
        let rule = gl10();
        let n = ((R_LAST / R_FIRST).ln() / PANEL_RATIO.ln()).ceil() as usize;
        let mut nodes = Vec::with_capacity(n + 1);
        let mut values = Vec::with_capacity(n + 1);
        let e = c0 + 1.0;
        let u_top = R_FIRST.powf(e);
        let head = rule.integrate(0.0, u_top, |u| {
            let r = u.powf(1.0 / e);
            density(r) / r.powf(c0)
        }) / e;
        nodes.push(R_FIRST);
        values.push(head);
        let lr = PANEL_RATIO.ln();
        for i in 1..=n {
            let lo = *nodes.last().unwrap();
            let hi = R_FIRST * (lr * i as f64).exp();
            let inc = rule.integrate(lo, hi, &density);
            values.push(values.last().unwrap() + inc);
            nodes.push(hi);
        }
        Cumulative { nodes, values }
    }

    fn eval<F: Fn(f64) -> f64>(&self, r: f64, density: F, c0: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        if r < self.nodes[0] {
            let e = c0 + 1.0;
            return gl10().integrate(0.0, r.powf(e), |u| {
                let t = u.powf(1.0 / e);
                density(t) / t.powf(c0)
            }) / e;
        }
        if r > *self.nodes.last().unwrap() {
            return f64::NAN;
        }
        let i = segment_index(&self.nodes, r);
        self.values[i] + gl10().integrate(self.nodes[i], r, density)
    }
}

/// Single weight obtained from a pair by the `χ` change of variables.
#[derive(Debug, Clone)]
pub struct ReducedWeight {
    pub pair: WeightPair,
    pub p: PExponent,
    chi: Cumulative,
    big_b: Cumulative,
    c_chi: f64,
}

impl ReducedWeight {
    pub fn new(pair: WeightPair, p: PExponent) -> Result<Self> {
        pair.w1_analytic(p).map_err(Error::W1Violation)?;
        let (c_chi, _) = pair.chi_exponents(p);
        let chi = Cumulative::build(|r| pair.chi_density(r, p), c_chi);
        let c_b = pair.b.exponent_at_zero();
        let big_b = Cumulative::build(|r| pair.b(r), c_b);
        let w = Self {
            pair,
            p,
            chi,
            big_b,
            c_chi,
        };
        // numeric confirmation that chi keeps growing
        let hi = w.chi(1e20);
        let lo = w.chi(1e10);
        if !(hi.is_finite() && hi > lo * (1.0 + 1e-6)) {
            return Err(Error::W1Violation(format!(
                "chi(1e10) = {lo:e}, chi(1e20) = {hi:e}: no divergence"
            )));
        }
        Ok(w)
    }

    /// `χ(r)`.
    pub fn chi(&self, r: f64) -> f64 {
        let (pair, p) = (self.pair, self.p);
        self.chi.eval(r, |t| pair.chi_density(t, p), self.c_chi)
    }

    /// `B(r) = ∫_0^r b`.
    pub fn big_b(&self, r: f64) -> f64 {
        let pair = self.pair;
        self.big_b.eval(r, |t| pair.b(t), pair.b.exponent_at_zero())
    }

    /// `χ^{-1}(t)` by table lookup, Hermite guess and Newton polish.
    pub fn chi_inv(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let vals = &self.chi.values;
        let nodes = &self.chi.nodes;
        if !t.is_finite() || t > *vals.last().unwrap() {
            return f64::NAN;
        }
        let mut r = if t < vals[0] {
            // leading-order inversion of χ ≈ g0 r^{c+1}/(c+1)
            let e = self.c_chi + 1.0;
            nodes[0] * (t / vals[0]).powf(1.0 / e)
        } else {
            let i = segment_index(vals, t);
            let d0 = 1.0 / self.pair.chi_density(nodes[i], self.p);
            let d1 = 1.0 / self.pair.chi_density(nodes[i + 1], self.p);
            hermite(vals[i], vals[i + 1], nodes[i], nodes[i + 1], d0, d1, t)
        };
        for _ in 0..8 {
            let g = self.pair.chi_density(r, self.p);
            let dr = (self.chi(r) - t) / g;
            let next = r - dr;
            r = if next > 0.0 { next } else { 0.5 * r };
            if dr.abs() <= 1e-15 * r {
                break;
            }
        }
        r
    }

    /// Reduced weight and its logarithmic derivative at `t`.
    pub fn q_and_log_derivative(&self, t: f64) -> (f64, f64) {
        let r = self.chi_inv(t);
        (self.q_at_r(r), self.pair.psi(r, self.p))
    }

    /// `a(r)^{1/p} b(r)^{1/p'}`.
    pub fn q_at_r(&self, r: f64) -> f64 {
        (self.pair.a.ln_value(r) / self.p.p + self.pair.b.ln_value(r) / self.p.pconj).exp()
    }

    pub fn q(&self, t: f64) -> f64 {
        self.q_at_r(self.chi_inv(t))
    }

    pub fn big_q(&self, t: f64) -> f64 {
        self.big_b(self.chi_inv(t))
    }

    /// `Q/q` at `t`, evaluated from `r = χ^{-1}(t)` to avoid cancellation.
    pub fn q_ratio(&self, t: f64) -> f64 {
        let r = self.chi_inv(t);
        self.big_b(r) / self.q_at_r(r)
    }

    pub fn t_max(&self) -> f64 {
        *self.chi.values.last().unwrap()
    }
}
