//! Single weights `q` of the radial operator `(q φ_p(v'))'`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::reduce::{ReducedWeight, WeightPair};
use crate::error::{Error, Result};
use crate::numeric::{gl10, hermite, hermite_derivative, segment_index};
use crate::ptrig::PExponent;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightKind {
    PowerLaw,
    Reduced,
    User,
}

#[derive(Debug)]
enum Repr {
    Power { n: f64 },
    Reduced(ReducedWeight),
    User(TabulatedWeight),
}

/// A weight `q` together with `q'`, `Q = ∫_0^r q` and `h = q^{p'}`.
#[derive(Debug, Clone)]
pub struct Weight {
    repr: Arc<Repr>,
}

/// `q = r^{N-1}`.
pub fn make_power_weight(n: f64) -> Result<Weight> {
    if !(n.is_finite() && n > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "power weight needs N > 1, got {n}"
        )));
    }
    Ok(Weight {
        repr: Arc::new(Repr::Power { n }),
    })
}

/// Reduced weight `q = (a∘χ^{-1})^{1/p} (b∘χ^{-1})^{1/p'}`.
pub fn reduce_weights(pair: WeightPair, p: PExponent) -> Result<Weight> {
    Ok(Weight {
        repr: Arc::new(Repr::Reduced(ReducedWeight::new(pair, p)?)),
    })
}

impl Weight {
    /// Weight tabulated at increasing radii, interpolated in log-log space.
    pub fn tabulated(r: Vec<f64>, q: Vec<f64>) -> Result<Weight> {
        Ok(Weight {
            repr: Arc::new(Repr::User(TabulatedWeight::new(r, q)?)),
        })
    }

    pub fn kind(&self) -> WeightKind {
        match &*self.repr {
            Repr::Power { .. } => WeightKind::PowerLaw,
            Repr::Reduced(_) => WeightKind::Reduced,
            Repr::User(_) => WeightKind::User,
        }
    }

    /// `N` for `q = r^{N-1}`.
    pub fn power_dimension(&self) -> Option<f64> {
        match &*self.repr {
            Repr::Power { n } => Some(*n),
            _ => None,
        }
    }

    pub fn reduced(&self) -> Option<&ReducedWeight> {
        match &*self.repr {
            Repr::Reduced(w) => Some(w),
            _ => None,
        }
    }

    pub fn q(&self, r: f64) -> f64 {
        match &*self.repr {
            Repr::Power { n } => r.powf(n - 1.0),
            Repr::Reduced(w) => w.q(r),
            Repr::User(w) => w.q(r),
        }
    }

    /// `q'/q`.
    pub fn log_derivative(&self, r: f64) -> f64 {
        match &*self.repr {
            Repr::Power { n } => (n - 1.0) / r,
            Repr::Reduced(w) => w.q_and_log_derivative(r).1,
            Repr::User(w) => w.log_derivative(r),
        }
    }

    pub fn dq(&self, r: f64) -> f64 {
        match &*self.repr {
            Repr::Reduced(w) => {
                let (q, l) = w.q_and_log_derivative(r);
                q * l
            }
            _ => self.q(r) * self.log_derivative(r),
        }
    }

    /// `Q(r) = ∫_0^r q`.
    pub fn big_q(&self, r: f64) -> f64 {
        match &*self.repr {
            Repr::Power { n } => r.powf(*n) / n,
            Repr::Reduced(w) => w.big_q(r),
            Repr::User(w) => w.big_q(r),
        }
    }

    /// `Q/q`.
    pub fn q_ratio(&self, r: f64) -> f64 {
        match &*self.repr {
            Repr::Power { n } => r / n,
            Repr::Reduced(w) => w.q_ratio(r),
            Repr::User(w) => w.big_q(r) / w.q(r),
        }
    }

    /// `(Q/q)' = 1 - (Q/q)(q'/q)`.
    pub fn q_ratio_derivative(&self, r: f64) -> f64 {
        match &*self.repr {
            Repr::Power { n } => 1.0 / n,
            _ => 1.0 - self.q_ratio(r) * self.log_derivative(r),
        }
    }

    /// `h = q^{p'}`.
    pub fn h(&self, r: f64, p: PExponent) -> f64 {
        self.q(r).powf(p.pconj)
    }

    /// `h' = p' q^{p'} q'/q`.
    pub fn dh(&self, r: f64, p: PExponent) -> f64 {
        p.pconj * self.h(r, p) * self.log_derivative(r)
    }

    /// Largest radius at which the weight can be evaluated.
    pub fn r_limit(&self) -> f64 {
        match &*self.repr {
            Repr::Reduced(w) => w.t_max(),
            _ => f64::INFINITY,
        }
    }
}

/// Log-log monotone cubic interpolation of user samples with power-law tails.
#[derive(Debug)]
struct TabulatedWeight {
    x: Vec<f64>,
    y: Vec<f64>,
    slope: Vec<f64>,
    cum: Vec<f64>,
}

impl TabulatedWeight {
    fn new(r: Vec<f64>, q: Vec<f64>) -> Result<Self> {
        if r.len() != q.len() || r.len() < 2 {
            return Err(Error::InvalidParameter(
                "user weight needs >= 2 matching (r, q) samples".into(),
            ));
        }
        if r.iter().any(|&v| !(v > 0.0 && v.is_finite()))
            || q.iter().any(|&v| !(v > 0.0 && v.is_finite()))
        {
            return Err(Error::InvalidParameter(
                "user weight samples must be positive and finite".into(),
            ));
        }
        if r.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter(
                "user weight radii must be strictly increasing".into(),
            ));
        }
        let x: Vec<f64> = r.iter().map(|v| v.ln()).collect();
        let y: Vec<f64> = q.iter().map(|v| v.ln()).collect();
        let n = x.len();
        let delta: Vec<f64> = (0..n - 1)
            .map(|i| (y[i + 1] - y[i]) / (x[i + 1] - x[i]))
            .collect();
        let mut slope = vec![0.0; n];
        slope[0] = delta[0];
        slope[n - 1] = delta[n - 2];
        for i in 1..n - 1 {
            let (d0, d1) = (delta[i - 1], delta[i]);
            slope[i] = if d0 * d1 <= 0.0 {
                0.0
            } else {
                let (h0, h1) = (x[i] - x[i - 1], x[i + 1] - x[i]);
                let w1 = 2.0 * h1 + h0;
                let w2 = h1 + 2.0 * h0;
                (w1 + w2) / (w1 / d0 + w2 / d1)
            };
        }
        if slope[0] <= -1.0 {
            return Err(Error::InvalidParameter(
                "user weight is not integrable at 0".into(),
            ));
        }
        let mut w = TabulatedWeight {
            x,
            y,
            slope,
            cum: Vec::new(),
        };
        let r0 = r[0];
        let mut cum = vec![w.q(r0) * r0 / (w.slope[0] + 1.0)];
        for i in 0..n - 1 {
            let inc = gl10().integrate_composite(r[i], r[i + 1], 4, |t| w.q(t));
            cum.push(cum[i] + inc);
        }
        w.cum = cum;
        Ok(w)
    }

    fn ln_q_and_slope(&self, r: f64) -> (f64, f64) {
        let lx = r.ln();
        let n = self.x.len();
        if lx <= self.x[0] {
            return (self.y[0] + self.slope[0] * (lx - self.x[0]), self.slope[0]);
        }
        if lx >= self.x[n - 1] {
            return (
                self.y[n - 1] + self.slope[n - 1] * (lx - self.x[n - 1]),
                self.slope[n - 1],
            );
        }
        let i = segment_index(&self.x, lx);
        let args = (
            self.x[i],
            self.x[i + 1],
            self.y[i],
            self.y[i + 1],
            self.slope[i],
            self.slope[i + 1],
        );
        (
            hermite(args.0, args.1, args.2, args.3, args.4, args.5, lx),
            hermite_derivative(args.0, args.1, args.2, args.3, args.4, args.5, lx),
        )
    }

    fn q(&self, r: f64) -> f64 {
        self.ln_q_and_slope(r).0.exp()
    }

    fn log_derivative(&self, r: f64) -> f64 {
        self.ln_q_and_slope(r).1 / r
    }

    fn big_q(&self, r: f64) -> f64 {
        let r0 = self.x[0].exp();
        if r <= r0 {
            return self.q(r) * r / (self.slope[0] + 1.0);
        }
        let rs: Vec<f64> = self.x.iter().map(|v| v.exp()).collect();
        let n = rs.len();
        if r >= rs[n - 1] {
            let a = self.slope[n - 1] + 1.0;
            let qn = self.q(rs[n - 1]);
            let tail = if a.abs() < 1e-12 {
                qn * rs[n - 1] * (r / rs[n - 1]).ln()
            } else {
                qn * rs[n - 1] / a * ((r / rs[n - 1]).powf(a) - 1.0)
            };
            return self.cum[n - 1] + tail;
        }
        let i = segment_index(&rs, r);
        self.cum[i] + gl10().integrate_composite(rs[i], r, 4, |t| self.q(t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_weight_values() {
        let w = make_power_weight(3.0).unwrap();
        assert!((w.big_q(2.0) / w.q(2.0) - 2.0 / 3.0).abs() < 1e-15);
        assert!((w.q_ratio_derivative(0.1) - 1.0 / 3.0).abs() < 1e-15);
        assert!(make_power_weight(1.0).is_err());
        let p = PExponent::new(2.0).unwrap();
        assert!((w.h(2.0, p) - 16.0).abs() < 1e-12);
        assert!((w.dh(2.0, p) - 32.0).abs() < 1e-12);
    }

    #[test]
    fn tabulated_power_law_is_reproduced() {
        let r: Vec<f64> = (0..30).map(|i| 0.01 * 1.4f64.powi(i)).collect();
        let q: Vec<f64> = r.iter().map(|v| v * v).collect();
        let w = Weight::tabulated(r, q).unwrap();
        for x in [1e-4, 0.05, 1.0, 10.0, 1e4] {
            assert!((w.q(x) - x * x).abs() < 1e-10 * x * x);
            assert!((w.log_derivative(x) - 2.0 / x).abs() < 1e-10 / x);
            assert!((w.big_q(x) - x.powi(3) / 3.0).abs() < 1e-9 * x.powi(3));
        }
    }

    #[test]
    fn reduced_dq_matches_finite_difference() {
        let w = reduce_weights(
            WeightPair::matukuma(3.0, 2.0).unwrap(),
            PExponent::new(2.0).unwrap(),
        )
        .unwrap();
        for t in [0.3, 1.0, 4.0] {
            let h = 1e-5;
            let fd = (w.q(t + h) - w.q(t - h)) / (2.0 * h);
            assert!((fd - w.dq(t)).abs() < 1e-7 * w.dq(t));
            let fq = (w.big_q(t + h) - w.big_q(t - h)) / (2.0 * h);
            assert!((fq - w.q(t)).abs() < 1e-7 * w.q(t));
        }
    }
}
