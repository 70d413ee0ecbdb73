//! Grid-based evidence for the structural hypotheses on `q`, `f` and `(a, b)`.
//!
//! Every verdict is tri-state: a checker certifies behaviour on the sampled
//! range only.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::nonlinearity::Nonlinearity;
use super::reduce::WeightPair;
use super::weight::Weight;
use super::Problem;
use crate::error::{Error, Result};
use crate::numeric::{geometric_grid, gl10};
use crate::ptrig::{phi, PExponent};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    fn from_ratio(ratio: f64, pass_at: f64, fail_at: f64) -> Verdict {
        if ratio.is_nan() {
            Verdict::Inconclusive
        } else if ratio >= pass_at {
            Verdict::Pass
        } else if ratio <= fail_at {
            Verdict::Fail
        } else {
            Verdict::Inconclusive
        }
    }

    fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
            (Verdict::Inconclusive, _) | (_, Verdict::Inconclusive) => Verdict::Inconclusive,
            _ => Verdict::Pass,
        }
    }

    fn or(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::Pass, _) | (_, Verdict::Pass) => Verdict::Pass,
            (Verdict::Inconclusive, _) | (_, Verdict::Inconclusive) => Verdict::Inconclusive,
            _ => Verdict::Fail,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Hypothesis {
    #[serde(rename = "(Q1)")]
    Q1,
    #[serde(rename = "(Q2)")]
    Q2,
    #[serde(rename = "(Q3)")]
    Q3,
    #[serde(rename = "(Q4)")]
    Q4,
    #[serde(rename = "(f1)")]
    F1,
    #[serde(rename = "(f2)")]
    F2,
    #[serde(rename = "(SC)")]
    SC,
    #[serde(rename = "(H)")]
    H,
    #[serde(rename = "(W1)")]
    W1,
    #[serde(rename = "(W2)")]
    W2,
    #[serde(rename = "(W3)")]
    W3,
    #[serde(rename = "(W4)")]
    W4,
}

impl Hypothesis {
    pub const ALL: [Hypothesis; 12] = [
        Hypothesis::Q1,
        Hypothesis::Q2,
        Hypothesis::Q3,
        Hypothesis::Q4,
        Hypothesis::F1,
        Hypothesis::F2,
        Hypothesis::SC,
        Hypothesis::H,
        Hypothesis::W1,
        Hypothesis::W2,
        Hypothesis::W3,
        Hypothesis::W4,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Hypothesis::Q1 => "(Q1)",
            Hypothesis::Q2 => "(Q2)",
            Hypothesis::Q3 => "(Q3)",
            Hypothesis::Q4 => "(Q4)",
            Hypothesis::F1 => "(f1)",
            Hypothesis::F2 => "(f2)",
            Hypothesis::SC => "(SC)",
            Hypothesis::H => "(H)",
            Hypothesis::W1 => "(W1)",
            Hypothesis::W2 => "(W2)",
            Hypothesis::W3 => "(W3)",
            Hypothesis::W4 => "(W4)",
        }
    }
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Evidence for a single hypothesis.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConditionEntry {
    pub name: Hypothesis,
    pub holds: Verdict,
    pub evidence: BTreeMap<String, Value>,
    pub notes: Vec<String>,
}

impl ConditionEntry {
    fn new(name: Hypothesis, holds: Verdict) -> Self {
        Self {
            name,
            holds,
            evidence: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    fn with(mut self, key: &str, value: Value) -> Self {
        self.evidence.insert(key.to_string(), value);
        self
    }

    fn note(mut self, text: impl Into<String>) -> Self {
        self.notes.push(text.into());
        self
    }

    /// One-line summary of the evidence.
    pub fn evidence_summary(&self) -> String {
        let mut parts: Vec<String> = self
            .evidence
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        parts.extend(self.notes.iter().cloned());
        parts.join("; ")
    }
}

/// Full hypothesis report; each hypothesis appears exactly once.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConditionReport {
    pub entries: Vec<ConditionEntry>,
}

impl ConditionReport {
    pub fn get(&self, h: Hypothesis) -> Option<&ConditionEntry> {
        self.entries.iter().find(|e| e.name == h)
    }

    pub fn verdict(&self, h: Hypothesis) -> Verdict {
        self.get(h)
            .map(|e| e.holds)
            .unwrap_or(Verdict::Inconclusive)
    }

    /// No hypothesis failed.
    pub fn no_failures(&self) -> bool {
        self.entries.iter().all(|e| e.holds != Verdict::Fail)
    }

    pub fn failures(&self) -> Vec<&ConditionEntry> {
        self.entries
            .iter()
            .filter(|e| e.holds == Verdict::Fail)
            .collect()
    }

    /// Plain-text table.
    pub fn to_table(&self) -> String {
        let mut out = format!("{:<6} {:<13} evidence\n", "hyp", "verdict");
        for e in &self.entries {
            out.push_str(&format!(
                "{:<6} {:<13} {}\n",
                e.name.label(),
                e.holds.to_string(),
                e.evidence_summary()
            ));
        }
        out
    }
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    geometric_grid(lo, hi, n)
}

fn weight_grid(w: &Weight, r_min: f64, r_max: f64) -> Vec<f64> {
    let hi = r_max.min(0.5 * w.r_limit());
    grid(r_min, hi, 400)
}

/// (Q1)–(Q4) on the sampled range `[r_min, r_max]`.
pub fn check_q(w: &Weight, p: PExponent, r_min: f64, r_max: f64) -> Vec<ConditionEntry> {
    let rs = weight_grid(w, r_min, r_max);
    let q: Vec<f64> = rs.iter().map(|&r| w.q(r)).collect();
    let l: Vec<f64> = rs.iter().map(|&r| w.log_derivative(r)).collect();

    let min_q = q.iter().cloned().fold(f64::INFINITY, f64::min);
    let min_l = l.iter().cloned().fold(f64::INFINITY, f64::min);
    let finite = q.iter().chain(&l).all(|v| v.is_finite());
    let q1 = if finite && min_q > 0.0 && min_l > 0.0 {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    let e1 = ConditionEntry::new(Hypothesis::Q1, q1)
        .with("min_q", json!(min_q))
        .with("min_dq_over_q", json!(min_l))
        .with("grid", json!([rs[0], *rs.last().unwrap(), rs.len()]));

    let worst = max_increment(&l);
    let q2 = if finite && worst <= 0.0 {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    let e2 = ConditionEntry::new(Hypothesis::Q2, q2)
        .with("max_increment_of_dq_over_q", json!(worst))
        .note("increments at the rounding level of dq/q count as non-increasing");

    let rl: Vec<f64> = rs.iter().zip(&l).map(|(r, v)| r * v).collect();
    let c1 = rl.iter().cloned().fold(f64::INFINITY, f64::min);
    let c2 = rl.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let dq: Vec<f64> = rs
        .iter()
        .zip(&q)
        .map(|(&r, &qq)| r * qq / w.big_q(r))
        .collect();
    let d1 = dq.iter().cloned().fold(f64::INFINITY, f64::min);
    let d2 = dq.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = (rs[0], *rs.last().unwrap());
    let rlq = |r: f64| r * w.log_derivative(r);
    let end_small = settles(rlq(100.0 * lo), rlq(10.0 * lo), rlq(lo));
    let end_large = settles(rlq(0.01 * hi), rlq(0.1 * hi), rlq(hi));
    let q3 = if !(c1.is_finite() && c2.is_finite())
        || c1 <= 0.0
        || c2 / c1 > 1e6
        || !end_small
        || !end_large
    {
        Verdict::Fail
    } else {
        Verdict::Pass
    };
    let e3 = ConditionEntry::new(Hypothesis::Q3, q3)
        .with("C1", json!(c1))
        .with("C2", json!(c2))
        .with("D1", json!(d1))
        .with("D2", json!(d2))
        .with("settles_at_ends", json!([end_small, end_large]));

    let big_r = *rs.last().unwrap();
    let mut q4 = Verdict::Pass;
    let mut ratios = Vec::new();
    for r0 in [0.1, 1.0, 10.0] {
        let inc = |r: f64| w.h(r + r0, p) - w.h(r, p);
        let ratio = inc(big_r - r0) / inc(0.1 * big_r);
        ratios.push(ratio);
        q4 = q4.and(Verdict::from_ratio(ratio, 2.0, 1.05));
    }
    let e4 = ConditionEntry::new(Hypothesis::Q4, q4)
        .with("r0", json!([0.1, 1.0, 10.0]))
        .with("increment_ratio_R_over_R10", json!(ratios))
        .note("tested for r0 in {0.1, 1, 10} only");
    vec![e1, e2, e3, e4]
}

/// Whether `v(x0), v(x1), v(x2)` (geometrically spaced towards an end) settle to a limit.
fn settles(v0: f64, v1: f64, v2: f64) -> bool {
    let (d1, d2) = ((v1 - v0).abs(), (v2 - v1).abs());
    v2.is_finite() && (d2 <= 1e-6 * v2.abs() || d2 <= 0.5 * d1)
}

/// Largest increment of `xs`, ignoring increments at the rounding level of the values.
fn max_increment(xs: &[f64]) -> f64 {
    xs.windows(2)
        .map(|v| {
            let d = v[1] - v[0];
            if d.abs() <= 64.0 * f64::EPSILON * v[0].abs().max(v[1].abs()) {
                -0.0
            } else {
                d
            }
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// (f1) and (f2) on `[-s_max, s_max]`.
pub fn check_f(nl: &Nonlinearity, s_max: f64) -> Vec<ConditionEntry> {
    let f0 = nl.f(0.0);
    let near = [1e-14, 1e-12, 1e-10]
        .iter()
        .map(|&e| nl.f(e).abs().max(nl.f(-e).abs()))
        .fold(0.0, f64::max);
    let finite = grid(1e-8, s_max, 400)
        .iter()
        .all(|&s| nl.f(s).is_finite() && nl.f(-s).is_finite());
    let f1 = if f0 == 0.0 && near < 1e-4 && finite {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    let e1 = ConditionEntry::new(Hypothesis::F1, f1)
        .with("f(0)", json!(f0))
        .with("max_abs_f_near_0", json!(near));

    let (bm, bp) = (nl.beta_minus(), nl.beta_plus());
    let mut e2 = ConditionEntry::new(Hypothesis::F2, Verdict::Pass)
        .with("beta_minus", json!(bm))
        .with("beta_plus", json!(bp));
    if !(bm < 0.0 && bp > 0.0) {
        e2.holds = Verdict::Fail;
        return vec![e1, e2.note("F has no negative well around 0")];
    }
    let fb = nl.big_f(bp).abs().max(nl.big_f(bm).abs());
    let mut ok = fb <= 1e-10 * (1.0 + bp.abs().max(bm.abs()));
    let mut max_f_in_well = f64::NEG_INFINITY;
    for i in 1..1000 {
        let t = i as f64 / 1000.0;
        for s in [bp * t, bm * t, bp * t.powi(6), bm * t.powi(6)] {
            max_f_in_well = max_f_in_well.max(nl.big_f(s));
        }
    }
    ok &= max_f_in_well < 0.0;
    let mut min_f_right = f64::INFINITY;
    let mut max_f_left = f64::NEG_INFINITY;
    if s_max > bp {
        for s in grid(bp, s_max, 800) {
            min_f_right = min_f_right.min(nl.f(s));
        }
    }
    if s_max > -bm {
        for s in grid(-bm, s_max, 800) {
            max_f_left = max_f_left.max(nl.f(-s));
        }
    }
    ok &= min_f_right > 0.0 && max_f_left < 0.0;
    let (fr, fl) = (nl.big_f(s_max), nl.big_f(-s_max));
    let symmetric = (fr - fl).abs() <= 1e-8 * fr.abs().max(fl.abs());
    let both_growing =
        fr > 10.0 * nl.big_f(0.1 * s_max).max(0.0) && fl > 10.0 * nl.big_f(-0.1 * s_max).max(0.0);
    e2 = e2
        .with("abs_F_at_beta", json!(fb))
        .with("max_F_in_well", json!(max_f_in_well))
        .with("min_f_right", json!(min_f_right))
        .with("max_f_left", json!(max_f_left))
        .with("F_at_plus_minus_smax", json!([fr, fl]));
    e2.holds = if !ok {
        Verdict::Fail
    } else if symmetric || (fr > 0.0 && fl > 0.0 && both_growing) {
        Verdict::Pass
    } else {
        Verdict::Inconclusive
    };
    vec![e1, e2]
}

/// Options of the sub-criticality test.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScOptions {
    pub alpha: f64,
    /// `None` picks the smallest `μ >= μ*` compatible with the small-`r` inequality.
    pub mu: Option<f64>,
    pub s_grid: Option<Vec<f64>>,
    pub points_per_decade: usize,
}

impl Default for ScOptions {
    fn default() -> Self {
        Self {
            alpha: 0.5,
            mu: None,
            s_grid: None,
            points_per_decade: 200,
        }
    }
}

/// Default `s`-grid for (SC): `10^2` up to where `F` stays representable.
pub fn default_sc_grid(nl: &Nonlinearity) -> Vec<f64> {
    let gamma = nl.growth_exponent().unwrap_or(10.0).max(0.1);
    let top = (280.0 / (gamma + 1.0)).min(40.0);
    let n = ((top - 2.0) * 20.0).round().max(20.0) as usize;
    grid(1e2, 10f64.powf(top), n + 1)
}

/// Evaluates the (SC) product on an `s`-grid and judges its divergence.
pub fn check_sc(prob: &Problem, opts: &ScOptions) -> Result<ConditionEntry> {
    let p = prob.p;
    let alpha = opts.alpha;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    // small-r inequality  μ + (Q/q)' - 1/p >= 0
    let small: Vec<f64> = (0..=40).map(|j| 1e-2 * 0.5f64.powi(j)).collect();
    let base = small
        .iter()
        .map(|&r| prob.weight.q_ratio_derivative(r) - 1.0 / p.p)
        .fold(f64::INFINITY, f64::min);
    let mut entry = ConditionEntry::new(Hypothesis::SC, Verdict::Pass);
    let mu = match opts.mu {
        Some(mu) => {
            if mu < prob.mu_star - 1e-12 {
                return Err(Error::InvalidParameter(format!(
                    "mu = {mu} is below mu* = {}",
                    prob.mu_star
                )));
            }
            mu
        }
        None => prob.mu_star.max(-base),
    };
    let margin = mu + base;
    entry = entry
        .with("alpha", json!(alpha))
        .with("mu", json!(mu))
        .with("mu_star", json!(prob.mu_star))
        .with("small_r_margin", json!(margin));
    if margin < -1e-12 {
        entry.holds = Verdict::Fail;
        return Ok(entry.note("mu + (Q/q)' - 1/p < 0 near r = 0"));
    }

    let s_grid = opts
        .s_grid
        .clone()
        .unwrap_or_else(|| default_sc_grid(&prob.nonlin));
    let nl = &prob.nonlin;
    let decades = (1.0 / alpha).log10();
    let m = ((opts.points_per_decade as f64 * decades).ceil() as usize).max(64);
    let mut products = Vec::with_capacity(s_grid.len());
    for &s in &s_grid {
        let pts = grid(alpha * s, s, m);
        let mut a_min = f64::INFINITY;
        let mut f_min = f64::INFINITY;
        let mut f_max = f64::NEG_INFINITY;
        for &t in &pts {
            let ft = nl.f(t);
            if !(ft > 0.0) {
                return Err(Error::F2Violation(format!(
                    "f({t:e}) = {ft:e} <= 0 on [alpha s, s] with s = {s:e}"
                )));
            }
            let big = nl.big_f(t);
            let mut a = big - mu * t * ft;
            if a.abs() <= 1e-12 * big.abs() {
                a = 0.0;
            }
            a_min = a_min.min(a);
            f_min = f_min.min(ft);
            f_max = f_max.max(ft);
        }
        let arg = |fv: f64| ((1.0 - alpha) * s / phi(fv, p.pconj)).powf(1.0 / p.pconj);
        let q_small = prob.weight.big_q(arg(f_max));
        let q_large = prob.weight.big_q(arg(f_min));
        let prod = if a_min >= 0.0 {
            a_min * q_small
        } else {
            a_min * q_large
        };
        products.push(prod);
    }
    let decade_of = |s: f64| s.log10().floor();
    let first_dec = decade_of(s_grid[0]);
    let last_dec = decade_of(*s_grid.last().unwrap() * (1.0 - 1e-12));
    let first_max = s_grid
        .iter()
        .zip(&products)
        .filter(|(s, _)| decade_of(**s) == first_dec)
        .map(|(_, v)| *v)
        .fold(f64::NEG_INFINITY, f64::max);
    let last_min = s_grid
        .iter()
        .zip(&products)
        .filter(|(s, _)| *s / s_grid.last().unwrap() >= 0.1 && decade_of(**s) >= last_dec - 1.0)
        .map(|(_, v)| *v)
        .fold(f64::INFINITY, f64::min);
    let ratio = if last_min <= 0.0 {
        0.0
    } else if first_max <= 0.0 {
        f64::INFINITY
    } else {
        last_min / first_max
    };
    entry.holds = Verdict::from_ratio(ratio, 10.0, 2.0);
    // means over three equal stretches of ln s; non-shrinking increments mean at least log growth
    let (l0, l1) = (s_grid[0].ln(), s_grid.last().unwrap().ln());
    let mut sums = [(0.0, 0usize); 3];
    for (sv, pv) in s_grid.iter().zip(&products) {
        let j = ((3.0 * (sv.ln() - l0) / (l1 - l0)) as usize).min(2);
        sums[j].0 += pv;
        sums[j].1 += 1;
    }
    let means: Vec<f64> = sums
        .iter()
        .map(|(t, c)| if *c > 0 { t / *c as f64 } else { f64::NAN })
        .collect();
    let (d1, d2) = (means[1] - means[0], means[2] - means[1]);
    let log_growth = means[0] > 0.0 && d1 > 0.0 && d2 >= 0.5 * d1;
    if log_growth && entry.holds == Verdict::Inconclusive {
        entry.holds = Verdict::Pass;
        entry = entry.note("product grows at least like log s");
    }
    entry = entry.with("third_means", json!(means));
    if products.iter().any(|v| !v.is_finite()) {
        entry.holds = Verdict::Inconclusive;
        entry = entry.note("non-finite products on the s-grid");
    }
    let n = products.len();
    let stride = (n / 12).max(1);
    let sample: Vec<[f64; 2]> = (0..n)
        .step_by(stride)
        .map(|i| [s_grid[i], products[i]])
        .collect();
    Ok(entry
        .with("s_range", json!([s_grid[0], s_grid[n - 1], n]))
        .with("points_per_window", json!(m))
        .with("first_decade_max", json!(first_max))
        .with("last_decade_min", json!(last_min))
        .with("ratio", json!(ratio))
        .with("products", json!(sample)))
}

/// Integrability of `|F|^{-1/p}` near `0` from dyadic increments on both sides.
pub fn f_integrability(nl: &Nonlinearity, p: PExponent) -> (Verdict, [f64; 2]) {
    let mut verdict = Verdict::Pass;
    let mut ratios = [0.0; 2];
    for (k, (sign, beta)) in [(1.0, nl.beta_plus()), (-1.0, nl.beta_minus())]
        .into_iter()
        .enumerate()
    {
        let eps0 = if beta != 0.0 { 0.5 * beta.abs() } else { 0.5 };
        let piece = |j: i32| {
            let hi = eps0 * 0.5f64.powi(j);
            gl10().integrate(0.5 * hi, hi, |s| nl.big_f(sign * s).abs().powf(-1.0 / p.p))
        };
        let incs: Vec<f64> = (0..60).map(piece).collect();
        let tail: Vec<f64> = (50..59).map(|j| incs[j + 1] / incs[j]).collect();
        let r = tail.iter().sum::<f64>() / tail.len() as f64;
        ratios[k] = r;
        // small ratio means a convergent tail
        let v = if !r.is_finite() {
            Verdict::Inconclusive
        } else if r <= 0.95 {
            Verdict::Pass
        } else if r >= 0.99 {
            Verdict::Fail
        } else {
            Verdict::Inconclusive
        };
        verdict = verdict.and(v);
    }
    (verdict, ratios)
}

/// (H): compact-support integrability or growth of `h'`.
pub fn check_h(prob: &Problem) -> ConditionEntry {
    let (b1, ratios) = f_integrability(&prob.nonlin, prob.p);
    let w = &prob.weight;
    let rs = weight_grid(w, prob.grids.r_min, prob.grids.r_max);
    let dh: Vec<f64> = rs.iter().map(|&r| w.dh(r, prob.p)).collect();
    let monotone = dh.windows(2).all(|v| v[1] >= v[0] * (1.0 - 1e-12));
    let big_r = *rs.last().unwrap();
    let growth = w.dh(big_r, prob.p) / w.dh(0.1 * big_r, prob.p);
    let b2 = if !monotone {
        Verdict::Fail
    } else {
        Verdict::from_ratio(growth, 2.0, 1.05)
    };
    let holds = b1.or(b2);
    let branch = match (b1, b2) {
        (Verdict::Pass, _) => "integrable |F|^(-1/p) near 0",
        (_, Verdict::Pass) => "h' nondecreasing and unbounded",
        _ => "none",
    };
    ConditionEntry::new(Hypothesis::H, holds)
        .with("branch", json!(branch))
        .with("integrability_ratios", json!(ratios))
        .with("integrability", json!(b1))
        .with("h_prime_monotone", json!(monotone))
        .with("h_prime_growth_ratio", json!(growth))
}

/// Functions entering the (W*) tests.
struct WData<'a> {
    chi: Box<dyn Fn(f64) -> f64 + 'a>,
    psi: Box<dyn Fn(f64) -> f64 + 'a>,
    w4: Box<dyn Fn(f64) -> f64 + 'a>,
    density: Box<dyn Fn(f64) -> f64 + 'a>,
}

fn w_entries(
    data: WData<'_>,
    lo: f64,
    hi: f64,
    analytic_w1: std::result::Result<(), String>,
) -> Vec<ConditionEntry> {
    // (W1): integrable density at 0, divergent χ at infinity
    let piece = |j: i32| {
        let top = lo * 0.5f64.powi(j);
        gl10().integrate(0.5 * top, top, &data.density)
    };
    let incs: Vec<f64> = (0..40).map(piece).collect();
    let r0 = incs[39] / incs[38];
    let at_zero = Verdict::from_ratio(-r0, -0.95, -0.99);
    let growth: Vec<f64> = [hi, 10.0 * hi, 100.0 * hi]
        .iter()
        .map(|&r| (data.chi)(r))
        .collect();
    let d1 = growth[1] - growth[0];
    let d2 = growth[2] - growth[1];
    let inc_ratio = d2 / d1;
    let at_inf = Verdict::from_ratio(inc_ratio, 0.99, 0.95);
    let mut w1 = at_zero.and(at_inf);
    let mut e1 = ConditionEntry::new(Hypothesis::W1, Verdict::Pass)
        .with("density_increment_ratio_at_0", json!(r0))
        .with("chi_increment_ratio_at_infinity", json!(inc_ratio));
    match analytic_w1 {
        Ok(()) => e1 = e1.with("analytic", json!("pass")),
        Err(msg) => {
            w1 = Verdict::Fail;
            e1 = e1.with("analytic", json!(msg));
        }
    }
    e1.holds = w1;

    let rs = grid(lo, hi, 400);
    let psi: Vec<f64> = rs.iter().map(|&r| (data.psi)(r)).collect();
    let min_psi = psi.iter().cloned().fold(f64::INFINITY, f64::min);
    let worst = max_increment(&psi);
    let w2 = if min_psi > 0.0 && worst <= 0.0 && psi.iter().all(|v| v.is_finite()) {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    let e2 = ConditionEntry::new(Hypothesis::W2, w2)
        .with("min_psi", json!(min_psi))
        .with("max_increment_of_psi", json!(worst));

    let cp: Vec<f64> = rs
        .iter()
        .zip(&psi)
        .map(|(&r, &s)| (data.chi)(r) * s)
        .collect();
    let c1 = cp.iter().cloned().fold(f64::INFINITY, f64::min);
    let c2 = cp.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let cpsi = |r: f64| (data.chi)(r) * (data.psi)(r);
    let lim0 = cpsi(1e-12);
    let lim_inf = cpsi(1e12);
    let ends = [
        settles(cpsi(1e-8), cpsi(1e-10), lim0),
        settles(cpsi(1e8), cpsi(1e10), lim_inf),
    ];
    let w3 = if c1 > 0.0
        && c2.is_finite()
        && lim0 > 0.0
        && lim_inf > 0.0
        && c2 / c1 < 1e6
        && ends[0]
        && ends[1]
    {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    let e3 = ConditionEntry::new(Hypothesis::W3, w3)
        .with("C1", json!(c1))
        .with("C2", json!(c2))
        .with("chi_psi_at_1e-12", json!(lim0))
        .with("chi_psi_at_1e12", json!(lim_inf))
        .with("settles_at_ends", json!(ends));

    let mut w4 = Verdict::Pass;
    let mut ratios = Vec::new();
    for r0 in [0.1, 1.0, 10.0] {
        let inc = |r: f64| (data.w4)(r + r0) - (data.w4)(r);
        let ratio = inc(hi) / inc(0.1 * hi);
        ratios.push(ratio);
        w4 = w4.and(Verdict::from_ratio(ratio, 2.0, 1.05));
    }
    let e4 = ConditionEntry::new(Hypothesis::W4, w4)
        .with("increment_ratio_R_over_R10", json!(ratios))
        .note("tested for r0 in {0.1, 1, 10} only");
    vec![e1, e2, e3, e4]
}

/// (W1)–(W4) for a weight pair on `[r_min, r_max]` in the original radius.
pub fn check_w(pair: &WeightPair, p: PExponent, r_min: f64, r_max: f64) -> Vec<ConditionEntry> {
    let pr = *pair;
    let analytic = pr.w1_analytic(p);
    // χ by direct quadrature so that the check does not depend on the reduction table
    let (c0, _) = pr.chi_exponents(p);
    let chi = move |r: f64| -> f64 {
        if c0 <= -1.0 {
            return f64::INFINITY;
        }
        let e = c0 + 1.0;
        let head_r = r.min(1e-30);
        let head = gl10().integrate(0.0, head_r.powf(e), |u| {
            let t = u.powf(1.0 / e);
            pr.chi_density(t, p) / t.powf(c0)
        }) / e;
        if r <= head_r {
            return head;
        }
        let n = ((r / head_r).ln() / 0.05).ceil() as usize;
        let ratio = ((r / head_r).ln() / n as f64).exp();
        let mut acc = head;
        let mut a = head_r;
        for _ in 0..n {
            let b = a * ratio;
            acc += gl10().integrate(a, b, |t| pr.chi_density(t, p));
            a = b;
        }
        acc
    };
    let data = WData {
        chi: Box::new(chi),
        psi: Box::new(move |r| pr.psi(r, p)),
        w4: Box::new(move |r| pr.w4_quantity(r, p)),
        density: Box::new(move |r| pr.chi_density(r, p)),
    };
    w_entries(data, r_min, r_max, analytic)
}

/// (W1)–(W4) for a single weight viewed as the pair `a = b = q`.
pub fn check_w_identity(w: &Weight, p: PExponent, r_min: f64, r_max: f64) -> Vec<ConditionEntry> {
    let hi = r_max.min(0.5 * w.r_limit());
    let w1 = w.clone();
    let w2 = w.clone();
    let data = WData {
        chi: Box::new(|r| r),
        psi: Box::new(move |r| w1.log_derivative(r)),
        w4: Box::new(move |r| w2.h(r, p)),
        density: Box::new(|_| 1.0),
    };
    let mut entries = w_entries(data, r_min, hi, Ok(()));
    for e in &mut entries {
        e.notes.push("evaluated as the pair a = b = q".into());
    }
    entries
}

/// Every hypothesis exactly once, in a fixed order.
pub fn check_all(prob: &Problem, sc: &ScOptions) -> ConditionReport {
    let g = &prob.grids;
    let mut entries = check_q(&prob.weight, prob.p, g.r_min, g.r_max);
    entries.extend(check_f(&prob.nonlin, g.s_max));
    let sc_entry = match check_sc(prob, sc) {
        Ok(e) => e,
        Err(err) => ConditionEntry::new(Hypothesis::SC, Verdict::Fail).note(err.to_string()),
    };
    entries.push(sc_entry);
    entries.push(check_h(prob));
    match prob.weight.reduced() {
        Some(red) => entries.extend(check_w(&red.pair, prob.p, 1e-6, 1e6)),
        None => entries.extend(check_w_identity(&prob.weight, prob.p, g.r_min, g.r_max)),
    }
    let mut warn = Vec::new();
    warn.extend(prob.nonlin.warnings().iter().cloned());
    if !warn.is_empty() {
        if let Some(e) = entries.iter_mut().find(|e| e.name == Hypothesis::SC) {
            e.notes.extend(warn);
        }
    }
    ConditionReport { entries }
}
