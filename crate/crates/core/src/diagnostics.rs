//! Certificates evaluated along computed trajectories.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::{solve, SolveOptions, Trajectory};
use crate::numeric::{brent, geometric_grid};
use crate::problem::{make_critical_extended, make_power_weight, Grids, Problem, Verdict};
use crate::ptrig::{phi, PExponent};

/// Grid extrema of `r q'(r)/q(r)`.
pub fn q3_bounds(prob: &Problem) -> (f64, f64) {
    let hi = prob.grids.r_max.min(0.5 * prob.weight.r_limit());
    geometric_grid(prob.grids.r_min, hi, 400)
        .into_iter()
        .map(|r| r * prob.weight.log_derivative(r))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
            (lo.min(x), hi.max(x))
        })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationConstants {
    pub rho1: f64,
    pub rho2: f64,
    #[serde(rename = "A")]
    pub a: f64,
    pub omega: f64,
    pub c0: f64,
    pub r_bar: f64,
    pub f_bar: f64,
    /// Grid estimate of the upper (Q3) constant used for `r_bar`.
    pub c2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationSample {
    pub r: f64,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotationCertificate {
    pub c1: f64,
    pub constants: RotationConstants,
    /// In-band samples.
    pub samples: Vec<RotationSample>,
    /// In-band samples with `r >= r_bar`.
    pub checked: usize,
    pub violations: usize,
    pub min_margin: f64,
    pub verdict: Verdict,
}

/// Root of `F(s) = c` on the branch beyond `β+` (`sign = 1`) or below `β-` (`sign = -1`).
pub fn f_inverse(prob: &Problem, c: f64, sign: f64) -> Result<f64> {
    let nl = &prob.nonlin;
    let beta = if sign > 0.0 {
        nl.beta_plus()
    } else {
        nl.beta_minus()
    };
    let mut hi = beta.abs().max(1.0);
    for _ in 0..2000 {
        if nl.big_f(sign * hi) >= c {
            let lo = beta.abs();
            let s = brent(|s| nl.big_f(sign * s) - c, lo, hi, 1e-14 * hi)?;
            return Ok(sign * s);
        }
        hi *= 1.5;
    }
    Err(Error::RootFinding(format!(
        "F never reaches {c} on the {} branch",
        if sign > 0.0 { "right" } else { "left" }
    )))
}

/// Constants of the angular velocity bound for the energy band `[c1/2, c1]`.
pub fn rotation_constants(prob: &Problem, c1: f64) -> Result<RotationConstants> {
    let p = prob.p;
    let nl = &prob.nonlin;
    let (bm, bp) = (nl.beta_minus(), nl.beta_plus());
    if !(bm < 0.0 && bp > 0.0) {
        return Err(Error::InvalidParameter(
            "rotation bound needs beta- < 0 < beta+".into(),
        ));
    }
    let f_sup = nl.big_f(1e6).min(nl.big_f(-1e6));
    if !(c1 > 0.0 && c1 < f_sup) {
        return Err(Error::InvalidParameter(format!(
            "c1 = {c1} must lie in (0, lim F)"
        )));
    }
    let f_bar = (0..=4000)
        .map(|i| bm + (bp - bm) * i as f64 / 4000.0)
        .map(|s| -nl.big_f(s))
        .fold(0.0, f64::max);
    let (r4, l4) = (
        f_inverse(prob, 0.25 * c1, 1.0)?,
        f_inverse(prob, 0.25 * c1, -1.0)?,
    );
    let (r1, l1) = (f_inverse(prob, c1, 1.0)?, f_inverse(prob, c1, -1.0)?);
    let rho1 = (0.25 * p.p * c1)
        .min(r4.abs().powf(p.p))
        .min(l4.abs().powf(p.p));
    let rho2 = r1.abs().powf(p.p).max(l1.abs().powf(p.p)) + p.p * (c1 + f_bar);
    let top = rho2.powf(1.0 / p.p);
    let n = 4000;
    let mut a = f64::INFINITY;
    for i in 0..=n {
        let t = i as f64 / n as f64;
        if top > bp {
            let s = bp + (top - bp) * t;
            a = a.min(s * nl.f(s));
        }
        if -top < bm {
            let s = bm + (-top - bm) * t;
            a = a.min(s * nl.f(s));
        }
    }
    let (_, c2) = q3_bounds(prob);
    let omega = (a / (2.0 * rho2)).min(p.p * c1 / (4.0 * rho2));
    let c0 = (2.0 / (p.pconj * c1)).powf(1.0 / p.p) / rho1;
    let r_bar = (2.0 * c2 * rho2 / (p.p * a)).max(4.0 * c2 * rho2 / (p.p * p.p * c1));
    Ok(RotationConstants {
        rho1,
        rho2,
        a,
        omega,
        c0,
        r_bar,
        f_bar,
        c2,
    })
}

/// `-θ'` from the angle equation at a phase-plane state.
pub fn angular_speed(prob: &Problem, r: f64, v: f64, w: f64) -> f64 {
    let p = prob.p;
    let wp = w.abs().powf(p.pconj);
    let rho = v.abs().powf(p.p) + (p.p - 1.0) * wp;
    let l = prob.weight.log_derivative(r);
    (p.p / p.pconj * wp + v * prob.nonlin.f(v) + l * v * w) / rho
}

/// Checks `-θ' > ω - c0 g(v, v')` on the band `c1/2 <= E <= c1`, `r >= r_bar`.
pub fn rotation_certificate(
    prob: &Problem,
    traj: &Trajectory,
    c1: f64,
) -> Result<RotationCertificate> {
    let k = rotation_constants(prob, c1)?;
    let (bm, bp) = (prob.nonlin.beta_minus(), prob.nonlin.beta_plus());
    let mut samples = Vec::new();
    let mut checked = 0;
    let mut violations = 0;
    let mut min_margin = f64::INFINITY;
    for s in traj.samples.iter().filter(|s| s.r > 0.0) {
        if !(s.e >= 0.5 * c1 && s.e <= c1) {
            continue;
        }
        let dv = phi(s.w, prob.p.pconj);
        let g = if s.v >= bm && s.v <= bp {
            (s.v * prob.nonlin.f(s.v) * dv).abs()
        } else {
            0.0
        };
        let lhs = angular_speed(prob, s.r, s.v, s.w);
        let rhs = k.omega - k.c0 * g;
        samples.push(RotationSample { r: s.r, lhs, rhs });
        if s.r >= k.r_bar {
            checked += 1;
            let margin = lhs - rhs;
            min_margin = min_margin.min(margin);
            if margin <= -1e-12 {
                violations += 1;
            }
        }
    }
    let verdict = if violations > 0 {
        Verdict::Fail
    } else if checked == 0 {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    };
    Ok(RotationCertificate {
        c1,
        constants: k,
        samples,
        checked,
        violations,
        min_margin,
        verdict,
    })
}

/// Identity residual for `K' = R` on every `stride`-th sample.
///
/// Samples closer than `1e-5 r` to the previously kept one are skipped.
/// On each triple of consecutive samples the centred difference `(K_{i+1} - K_{i-1}) / (r_{i+1} - r_{i-1})`
/// is compared with the mean of `R` over the same interval from the interpolatory three-point rule.
/// Triples whose two steps differ by more than a factor 4 are left out.
/// The squared mismatch is averaged over `r` and divided by the mean square of `R`; when `R` vanishes
/// identically, by that of the sum of its term magnitudes instead.
fn identity_residual<K, R>(traj: &Trajectory, stride: usize, k: K, rhs: R) -> f64
where
    K: Fn(f64, f64, f64, f64) -> f64,
    R: Fn(f64, f64, f64, f64) -> (f64, f64),
{
    let strided: Vec<_> = traj
        .samples
        .iter()
        .filter(|s| s.r > 0.0)
        .step_by(stride.max(1))
        .collect();
    if strided.len() < 3 {
        return f64::NAN;
    }
    // samples packed closer than 1e-5 r only resolve rounding noise in K
    let mut pts = vec![strided[0]];
    for s in &strided[1..] {
        if s.r - pts.last().unwrap().r >= 1e-5 * s.r {
            pts.push(s);
        }
    }
    let n = pts.len();
    if n < 3 {
        return f64::NAN;
    }
    let ks: Vec<f64> = pts.iter().map(|s| k(s.r, s.v, s.w, s.e)).collect();
    let rs: Vec<(f64, f64)> = pts.iter().map(|s| rhs(s.r, s.v, s.w, s.e)).collect();
    let (mut num, mut den, mut scale) = (0.0, 0.0, 0.0);
    for i in 1..n - 1 {
        let (a, b) = (pts[i].r - pts[i - 1].r, pts[i + 1].r - pts[i].r);
        let h = a + b;
        if a > 4.0 * b || b > 4.0 * a {
            // the three-point weights go strongly negative; the neighbouring triples cover this stretch
            continue;
        }
        let w0 = h * (2.0 * a - b) / (6.0 * a);
        let w2 = h * (2.0 * b - a) / (6.0 * b);
        let w1 = h - w0 - w2;
        let mean = (w0 * rs[i - 1].0 + w1 * rs[i].0 + w2 * rs[i + 1].0) / h;
        let mag = (w0.abs() * rs[i - 1].1 + w1.abs() * rs[i].1 + w2.abs() * rs[i + 1].1) / h;
        let d = (ks[i + 1] - ks[i - 1]) / h;
        num += h * (d - mean).powi(2);
        den += h * mean * mean;
        scale += h * mag * mag;
    }
    if den <= 1e-16 * scale {
        den = scale;
    }
    if den == 0.0 {
        return num.sqrt();
    }
    (num / den).sqrt()
}

/// Residual of `(Q E + μ q v φ_p(v'))' = q|v'|^p (μ + (Q/q)' - 1/p) + q (F(v) - μ v f(v))`.
pub fn dissipation_residual(prob: &Problem, traj: &Trajectory, mu: f64, stride: usize) -> f64 {
    let wt = &prob.weight;
    let p = prob.p;
    identity_residual(
        traj,
        stride,
        |r, v, w, e| wt.big_q(r) * e + mu * wt.q(r) * v * w,
        |r, v, w, _| {
            let q = wt.q(r);
            let wp = q * w.abs().powf(p.pconj);
            let (big_f, vf) = (prob.nonlin.big_f(v), v * prob.nonlin.f(v));
            let qr = wt.q_ratio_derivative(r);
            (
                wp * (mu + qr - 1.0 / p.p) + q * (big_f - mu * vf),
                wp * (mu + qr.abs() + 1.0 / p.p) + q * (big_f.abs() + mu * vf.abs()),
            )
        },
    )
}

/// Residual of `(h E)' = h' F(v)` with `h = q^{p'}`.
pub fn h_identity_residual(prob: &Problem, traj: &Trajectory, stride: usize) -> f64 {
    let wt = &prob.weight;
    let p = prob.p;
    identity_residual(
        traj,
        stride,
        |r, _, _, e| wt.h(r, p) * e,
        |r, v, _, _| {
            let x = wt.dh(r, p) * prob.nonlin.big_f(v);
            (x, x.abs())
        },
    )
}

/// First radius at which `E` reaches each level, keyed by the level's decimal text.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LevelCrossings {
    pub levels: Vec<f64>,
    pub radii: BTreeMap<String, f64>,
}

impl LevelCrossings {
    pub fn get(&self, level: f64) -> Option<f64> {
        self.radii.get(&format!("{level:e}")).copied()
    }
}

/// `r_λ(a) = inf{r > 0 : E(r) = a}`, linearly refined between samples.
pub fn level_crossings(traj: &Trajectory, levels: &[f64]) -> LevelCrossings {
    let mut out = LevelCrossings {
        levels: levels.to_vec(),
        radii: BTreeMap::new(),
    };
    for &a in levels {
        let s = &traj.samples;
        if let Some(i) = s.iter().position(|x| x.e <= a) {
            let r = if i == 0 {
                s[0].r
            } else {
                let (x0, x1) = (&s[i - 1], &s[i]);
                let t = (x0.e - a) / (x0.e - x1.e);
                x0.r + t * (x1.r - x0.r)
            };
            out.radii.insert(format!("{a:e}"), r);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerEntry {
    pub lambda: f64,
    /// Radius where `E = sqrt(F(λ))`; `None` when not reached.
    #[serde(rename = "R")]
    pub r: Option<f64>,
}

/// `R(λ)` with `E(R) = sqrt(F(λ))` for each amplitude.
pub fn layer_probe(
    prob: &Problem,
    lambdas: &[f64],
    opts: &SolveOptions,
) -> Result<Vec<LayerEntry>> {
    let mut out = Vec::new();
    for &lambda in lambdas {
        let fl = prob.nonlin.big_f(lambda);
        if !(fl > 1.0) {
            return Err(Error::InvalidParameter(format!(
                "F({lambda}) = {fl} must exceed 1"
            )));
        }
        let level = fl.sqrt();
        let o = SolveOptions {
            stop_below_energy: Some(level),
            stop_on_settle: true,
            ..opts.clone()
        };
        let traj = solve(prob, lambda, &o)?;
        out.push(LayerEntry {
            lambda,
            r: level_crossings(&traj, &[level]).get(level),
        });
    }
    Ok(out)
}

/// The probe for `p = 2`, `q = r^{d-1}` and the extended critical nonlinearity.
pub fn critical_layer_probe(d: u32, lambdas: &[f64]) -> Result<Vec<LayerEntry>> {
    let prob = Problem::new(
        PExponent::new(2.0)?,
        make_power_weight(d as f64)?,
        make_critical_extended(d, 1.0)?,
        Grids::default(),
    )?;
    let opts = SolveOptions {
        max_nodes: 10_000,
        ..Default::default()
    };
    layer_probe(&prob, lambdas, &opts)
}

pub fn layer_csv(entries: &[LayerEntry]) -> String {
    let mut s = String::from("lambda,R\n");
    for e in entries {
        match e.r {
            Some(r) => s.push_str(&format!("{:.16e},{:.16e}\n", e.lambda, r)),
            None => s.push_str(&format!("{:.16e},nan\n", e.lambda)),
        }
    }
    s
}
