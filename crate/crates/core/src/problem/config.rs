//! JSON problem descriptions.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::nonlinearity::{
    make_critical_extended, make_double_power, make_power, make_power_log, make_user_nonlinearity,
    Nonlinearity,
};
use super::reduce::{Profile, WeightPair};
use super::weight::{make_power_weight, reduce_weights, Weight};
use super::{Grids, Problem};
use crate::error::{Error, Result};
use crate::integrator::SolveOptions;
use crate::ptrig::PExponent;
use crate::shooter::SearchOptions;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum WeightConfig {
    /// `q = r^{N-1}`.
    PowerLaw {
        #[serde(rename = "N")]
        n: f64,
    },
    Matukuma {
        d: f64,
        sigma: f64,
    },
    Stellar {
        d: f64,
        sigma: f64,
    },
    KHessian {
        d: f64,
        k: f64,
    },
    Unified {
        d: f64,
        k: f64,
        ell: f64,
        sigma: f64,
        #[serde(default = "one")]
        s: f64,
    },
    /// Explicit saturated power profiles `a` and `b`.
    Pair {
        a: Profile,
        b: Profile,
    },
    /// Tabulated `q`.
    User {
        r: Vec<f64>,
        q: Vec<f64>,
    },
}

fn one() -> f64 {
    1.0
}

impl WeightConfig {
    /// The raw pair behind a two-weight description.
    pub fn pair(&self, p: PExponent) -> Result<Option<WeightPair>> {
        Ok(Some(match self {
            WeightConfig::Matukuma { d, sigma } => WeightPair::matukuma(*d, *sigma)?,
            WeightConfig::Stellar { d, sigma } => WeightPair::stellar(*d, *sigma, p)?,
            WeightConfig::KHessian { d, k } => WeightPair::k_hessian(*d, *k)?,
            WeightConfig::Unified {
                d,
                k,
                ell,
                sigma,
                s,
            } => WeightPair::unified(*d, *k, *ell, *sigma, *s)?,
            WeightConfig::Pair { a, b } => WeightPair::new(*a, *b)?,
            _ => return Ok(None),
        }))
    }

    pub fn build(&self, p: PExponent) -> Result<Weight> {
        match self {
            WeightConfig::PowerLaw { n } => make_power_weight(*n),
            WeightConfig::User { r, q } => Weight::tabulated(r.clone(), q.clone()),
            other => reduce_weights(other.pair(p)?.expect("pair families"), p),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum NonlinearityConfig {
    DoublePower {
        gamma: f64,
        m: f64,
    },
    Power {
        gamma: f64,
    },
    PowerLog {
        d: u32,
        zeta: f64,
        #[serde(default)]
        s0: Option<f64>,
    },
    CriticalExtended {
        d: u32,
        beta: f64,
    },
    User {
        s: Vec<f64>,
        f: Vec<f64>,
    },
}

impl NonlinearityConfig {
    pub fn build(&self, p: PExponent, s_max: f64) -> Result<Nonlinearity> {
        match self {
            NonlinearityConfig::DoublePower { gamma, m } => make_double_power(*gamma, *m),
            NonlinearityConfig::Power { gamma } => make_power(*gamma),
            NonlinearityConfig::PowerLog { d, zeta, s0 } => make_power_log(*d, p, *zeta, *s0),
            NonlinearityConfig::CriticalExtended { d, beta } => make_critical_extended(*d, *beta),
            NonlinearityConfig::User { s, f } => {
                make_user_nonlinearity(s.clone(), f.clone(), s_max)
            }
        }
    }
}

/// Everything a command needs: the problem plus solver and search settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    #[serde(default)]
    pub label: String,
    pub p: f64,
    pub weight: WeightConfig,
    pub nonlinearity: NonlinearityConfig,
    #[serde(default)]
    pub grids: Grids,
    #[serde(default)]
    pub solver: SolveOptions,
    #[serde(default)]
    pub search: SearchOptions,
}

impl ProblemConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn exponent(&self) -> Result<PExponent> {
        PExponent::new(self.p)
    }

    pub fn build(&self) -> Result<Problem> {
        let p = self.exponent()?;
        let weight = self.weight.build(p)?;
        let nonlin = self.nonlinearity.build(p, self.grids.s_max)?;
        Ok(Problem::new(p, weight, nonlin, self.grids)?.with_label(self.label.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_builds() {
        let cfg = ProblemConfig::from_json(
            r#"{"p": 2, "weight": {"kind": "power-law", "N": 3},
                "nonlinearity": {"kind": "double-power", "gamma": 3, "m": 1}}"#,
        )
        .unwrap();
        let prob = cfg.build().unwrap();
        assert!((prob.n_eff - 3.0).abs() < 1e-12);
        let cfg = ProblemConfig::from_json(
            r#"{"p": 2, "weight": {"kind": "matukuma", "d": 3, "sigma": 2},
                "nonlinearity": {"kind": "power", "gamma": 3}}"#,
        )
        .unwrap();
        assert!(cfg.build().is_ok());
    }

    #[test]
    fn unknown_kind_lists_supported() {
        let err = ProblemConfig::from_json(
            r#"{"p": 2, "weight": {"kind": "bogus"}, "nonlinearity": {"kind": "power", "gamma": 3}}"#,
        )
        .unwrap_err()
        .to_string();
        assert!(
            err.contains("power-law") && err.contains("matukuma"),
            "{err}"
        );
    }
}
