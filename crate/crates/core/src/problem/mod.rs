//! Weights, nonlinearities, the two-weight reduction and hypothesis checks.

pub mod conditions;
pub mod config;
pub mod nonlinearity;
pub mod reduce;
pub mod weight;

use serde::{Deserialize, Serialize};

pub use conditions::{ConditionEntry, ConditionReport, Hypothesis, ScOptions, Verdict};
pub use nonlinearity::{
    make_critical_extended, make_double_power, make_power, make_power_log, make_user_nonlinearity,
    Nonlinearity, NonlinearityKind,
};
pub use reduce::{Profile, ReducedWeight, WeightPair};
pub use weight::{make_power_weight, reduce_weights, Weight, WeightKind};

use crate::error::{Error, Result};
use crate::ptrig::PExponent;

/// Sampling ranges used by the hypothesis checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Grids {
    pub r_min: f64,
    pub r_max: f64,
    pub s_max: f64,
}

impl Default for Grids {
    fn default() -> Self {
        Self {
            r_min: 1e-6,
            r_max: 1e3,
            s_max: 1e3,
        }
    }
}

/// Estimate of `N` from `liminf (Q/q)'(0+)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EffectiveDimension {
    pub n_eff: f64,
    pub mu_star: f64,
    pub conclusive: bool,
    /// `(r, (Q/q)'(r))` samples, largest `r` first.
    pub samples: Vec<(f64, f64)>,
}

/// `N` and `μ* = [1/p - 1/N]₊` from `(Q/q)'` at `r0 2^{-j}`, `j = 0..40`.
pub fn effective_dimension(w: &Weight, p: PExponent) -> Result<EffectiveDimension> {
    let r0 = 1e-2f64.min(0.25 * w.r_limit());
    let samples: Vec<(f64, f64)> = (0..=40)
        .map(|j| {
            let r = r0 * 0.5f64.powi(j);
            (r, w.q_ratio_derivative(r))
        })
        .collect();
    let y: Vec<f64> = samples.iter().map(|s| s.1).collect();
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("non-finite (Q/q)' near r = 0".into()));
    }
    // Aitken extrapolation of the tail
    let extrap: Vec<f64> = (0..y.len() - 2)
        .map(|i| {
            let d1 = y[i + 1] - y[i];
            let d2 = y[i + 2] - 2.0 * y[i + 1] + y[i];
            if d2.abs() <= 1e-14 * y[i + 2].abs().max(1e-300) || (d1 * d1 / d2).abs() > 1.0 {
                y[i + 2]
            } else {
                y[i + 2] - (y[i + 2] - y[i + 1]).powi(2) / (y[i + 2] - 2.0 * y[i + 1] + y[i])
            }
        })
        .collect();
    let tail = &extrap[extrap.len() - 10..];
    let lo = tail.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let conclusive = hi - lo <= 1e-3;
    if !(lo > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "liminf (Q/q)'(0+) = {lo} is not positive"
        )));
    }
    let n_eff = 1.0 / lo;
    let mu_star = (1.0 / p.p - 1.0 / n_eff).max(0.0);
    Ok(EffectiveDimension {
        n_eff,
        mu_star,
        conclusive,
        samples,
    })
}

/// A validated initial value problem `(q φ_p(v'))' + q f(v) = 0`, `v(0) = λ`, `v'(0) = 0`.
#[derive(Debug, Clone)]
pub struct Problem {
    pub p: PExponent,
    pub weight: Weight,
    pub nonlin: Nonlinearity,
    pub n_eff: f64,
    pub mu_star: f64,
    pub n_eff_conclusive: bool,
    pub grids: Grids,
    /// `|F|^{-1/p}` integrable near `0`, so double zeros can occur.
    pub compact_support: bool,
    pub label: String,
}

impl Problem {
    pub fn new(p: PExponent, weight: Weight, nonlin: Nonlinearity, grids: Grids) -> Result<Self> {
        if !(grids.r_min > 0.0 && grids.r_max > grids.r_min && grids.s_max > 0.0) {
            return Err(Error::InvalidParameter(format!("invalid grids {grids:?}")));
        }
        let ed = effective_dimension(&weight, p)?;
        if !(ed.n_eff > 1.0) {
            return Err(Error::InvalidParameter(format!(
                "effective dimension N = {} must exceed 1",
                ed.n_eff
            )));
        }
        let (integrable, _) = conditions::f_integrability(&nonlin, p);
        Ok(Self {
            p,
            weight,
            nonlin,
            n_eff: ed.n_eff,
            mu_star: ed.mu_star,
            n_eff_conclusive: ed.conclusive,
            grids,
            compact_support: integrable != Verdict::Fail,
            label: String::new(),
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// `E = |w|^{p'}/p' + F(v)`.
    pub fn energy(&self, v: f64, w: f64) -> f64 {
        energy(self, v, w)
    }

    /// Report over every hypothesis with default (SC) options.
    pub fn check(&self) -> ConditionReport {
        conditions::check_all(self, &ScOptions::default())
    }
}

/// `E = |w|^{p'}/p' + F(v)`.
pub fn energy(prob: &Problem, v: f64, w: f64) -> f64 {
    w.abs().powf(prob.p.pconj) / prob.p.pconj + prob.nonlin.big_f(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: f64) -> PExponent {
        PExponent::new(v).unwrap()
    }

    #[test]
    fn power_weight_dimension() {
        let ed = effective_dimension(&make_power_weight(4.0).unwrap(), p(2.0)).unwrap();
        assert!((ed.n_eff - 4.0).abs() < 1e-12 && ed.conclusive);
        let ed = effective_dimension(&make_power_weight(2.0).unwrap(), p(3.0)).unwrap();
        assert_eq!(ed.mu_star, 0.0);
        let ed = effective_dimension(&make_power_weight(3.0).unwrap(), p(2.0)).unwrap();
        assert!((ed.mu_star - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn unified_family_mu_star() {
        for &(d, k, l, sigma, s, pp) in &[
            (3.0, 0.0, -2.0, 2.0, 2.0, 2.0),
            (3.0, 1.0, 0.5, 1.0, 2.0, 3.0),
            (4.0, 0.5, 0.0, 3.0, 1.0, 1.5),
        ] {
            let pe = p(pp);
            let w = reduce_weights(WeightPair::unified(d, k, l, sigma, s).unwrap(), pe).unwrap();
            let ed = effective_dimension(&w, pe).unwrap();
            let expect = (d + k - pp) / (pp * (d + l + sigma));
            assert!(
                (ed.mu_star - expect).abs() < 1e-6,
                "{} vs {}",
                ed.mu_star,
                expect
            );
        }
    }

    #[test]
    fn energy_values() {
        let prob = Problem::new(
            p(2.0),
            make_power_weight(3.0).unwrap(),
            make_double_power(3.0, 1.0).unwrap(),
            Grids::default(),
        )
        .unwrap();
        assert!(prob.energy(2f64.sqrt(), 0.0).abs() < 1e-14);
        assert!((prob.energy(0.0, 0.7) - 0.245).abs() < 1e-14);
        assert_eq!(prob.energy(3.0, 0.0), prob.nonlin.big_f(3.0));
    }
}
