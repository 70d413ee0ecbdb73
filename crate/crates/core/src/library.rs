//! Built-in desk-scale problems.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::problem::config::ProblemConfig;

#[derive(Debug, Clone)]
pub struct LibraryEntry {
    pub name: &'static str,
    pub config: ProblemConfig,
    /// Representative shooting amplitude.
    pub lambda: f64,
    /// (Q1)–(Q4) and (f1)–(f2) hold and the growth is below the critical exponent.
    pub sub_critical: bool,
    /// Amplitude whose trajectory visits the rotation bands `[c1/2, c1]`, `c1 ∈ {0.5, 1, 2}`, beyond `r̄`.
    pub rotation_lambda: f64,
}

fn cfg(p: f64, weight: Value, nonlinearity: Value, r_max: f64) -> ProblemConfig {
    let v = json!({
        "p": p,
        "weight": weight,
        "nonlinearity": nonlinearity,
        "solver": {"r_max": r_max},
    });
    serde_json::from_value(v).expect("library config")
}

fn power(n: f64) -> Value {
    json!({"kind": "power-law", "N": n})
}

fn dp(gamma: f64, m: f64) -> Value {
    json!({"kind": "double-power", "gamma": gamma, "m": m})
}

fn rotation_lambda(name: &str) -> f64 {
    match name {
        "canonical" | "canonical-high" | "compact-support" | "p3-4d" | "p4-6d" | "matukuma-s2"
        | "matukuma-s1" | "stellar" | "user-nonlinearity" | "user-weight" => 1e3,
        "canonical-negative" => -1e3,
        "fractional-dimension"
        | "p2.5-3d"
        | "unified"
        | "pure-power"
        | "critical-extended"
        | "power-log" => 1e2,
        "quadratic-4d" => 1e6,
        "mild-5d" => 1e8,
        "p1.5-3d" => 1e7,
        "k-hessian" => 8.0,
        _ => 1.0,
    }
}

/// Every built-in problem, in a fixed order.
pub fn library() -> Vec<LibraryEntry> {
    let cubic_s: Vec<f64> = (-300..=300).map(|i| i as f64 * 0.05).collect();
    let cubic_f: Vec<f64> = cubic_s.iter().map(|s| s * s * s - s).collect();
    let rs: Vec<f64> = (0..60).map(|i| 1e-4 * 1.3f64.powi(i)).collect();
    let qs: Vec<f64> = rs.iter().map(|r| r * r).collect();
    let mut out = vec![
        (
            "canonical",
            cfg(2.0, power(3.0), dp(3.0, 1.0), 60.0),
            5.0,
            true,
        ),
        (
            "canonical-high",
            cfg(2.0, power(3.0), dp(3.0, 1.0), 60.0),
            12.0,
            true,
        ),
        (
            "canonical-negative",
            cfg(2.0, power(3.0), dp(3.0, 1.0), 60.0),
            -5.0,
            true,
        ),
        (
            "fractional-dimension",
            cfg(2.0, power(2.5), dp(3.0, 1.0), 60.0),
            6.0,
            true,
        ),
        (
            "quadratic-4d",
            cfg(2.0, power(4.0), dp(2.0, 1.0), 60.0),
            4.0,
            true,
        ),
        (
            "mild-5d",
            cfg(2.0, power(5.0), dp(1.8, 1.0), 60.0),
            5.0,
            true,
        ),
        (
            "compact-support",
            cfg(2.0, power(3.0), dp(3.0, 0.5), 60.0),
            3.0,
            true,
        ),
        ("p3-4d", cfg(3.0, power(4.0), dp(4.0, 2.0), 60.0), 4.0, true),
        (
            "p1.5-3d",
            cfg(1.5, power(3.0), dp(1.5, 0.5), 60.0),
            4.0,
            true,
        ),
        (
            "p2.5-3d",
            cfg(2.5, power(3.0), dp(3.0, 1.5), 60.0),
            4.0,
            true,
        ),
        ("p4-6d", cfg(4.0, power(6.0), dp(5.0, 3.5), 60.0), 3.0, true),
        (
            "matukuma-s2",
            cfg(
                2.0,
                json!({"kind": "matukuma", "d": 3.0, "sigma": 2.0}),
                dp(3.0, 1.0),
                40.0,
            ),
            6.0,
            false,
        ),
        (
            "matukuma-s1",
            cfg(
                2.0,
                json!({"kind": "matukuma", "d": 3.0, "sigma": 1.0}),
                dp(2.0, 1.0),
                40.0,
            ),
            5.0,
            true,
        ),
        (
            "stellar",
            cfg(
                2.0,
                json!({"kind": "stellar", "d": 3.0, "sigma": 2.0}),
                dp(3.0, 1.0),
                40.0,
            ),
            5.0,
            false,
        ),
        (
            "k-hessian",
            cfg(
                3.0,
                json!({"kind": "k-hessian", "d": 3.0, "k": 2.0}),
                dp(3.0, 2.0),
                40.0,
            ),
            4.0,
            true,
        ),
        (
            "unified",
            cfg(
                3.0,
                json!({"kind": "unified", "d": 3.0, "k": 1.0, "ell": 0.5, "sigma": 1.0, "s": 2.0}),
                dp(3.0, 2.0),
                40.0,
            ),
            4.0,
            true,
        ),
        (
            "user-nonlinearity",
            cfg(
                2.0,
                power(3.0),
                json!({"kind": "user", "s": cubic_s, "f": cubic_f}),
                60.0,
            ),
            5.0,
            true,
        ),
        (
            "user-weight",
            cfg(
                2.0,
                json!({"kind": "user", "r": rs, "q": qs}),
                dp(3.0, 1.0),
                60.0,
            ),
            5.0,
            true,
        ),
        (
            "aubin-talenti",
            cfg(2.0, power(4.0), json!({"kind": "power", "gamma": 3.0}), 5.0),
            1.0,
            false,
        ),
        (
            "pure-power",
            cfg(
                2.0,
                power(3.0),
                json!({"kind": "power", "gamma": 3.0}),
                20.0,
            ),
            2.0,
            false,
        ),
        (
            "critical-extended",
            cfg(
                2.0,
                power(3.0),
                json!({"kind": "critical-extended", "d": 3, "beta": 1.0}),
                20.0,
            ),
            5.0,
            false,
        ),
        (
            "power-log",
            cfg(
                2.0,
                power(3.0),
                json!({"kind": "power-log", "d": 3, "zeta": 4.0}),
                30.0,
            ),
            8.0,
            false,
        ),
    ];
    out.iter_mut().for_each(|e| e.1.label = e.0.to_string());
    out.into_iter()
        .map(|(name, config, lambda, sub_critical)| LibraryEntry {
            name,
            config,
            lambda,
            sub_critical,
            rotation_lambda: rotation_lambda(name),
        })
        .collect()
}

pub fn names() -> Vec<&'static str> {
    library().iter().map(|e| e.name).collect()
}

pub fn lookup(name: &str) -> Result<LibraryEntry> {
    library()
        .into_iter()
        .find(|e| e.name == name)
        .ok_or_else(|| {
            Error::Config(format!(
                "unknown built-in problem {name:?}; available: {}",
                names().join(", ")
            ))
        })
}
