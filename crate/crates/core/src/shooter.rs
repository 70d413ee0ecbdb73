//! Classification of shooting amplitudes and the search for `k`-node solutions.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::{solve, SolveOptions, Terminal, Trajectory};
use crate::problem::{Problem, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClassTag {
    /// Settled with negative energy, no double zero.
    A,
    /// Ended in a double zero.
    I,
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub settle_radius: Option<f64>,
    pub double_zero_radius: Option<f64>,
    pub final_energy: f64,
    pub final_radius: f64,
    pub nodes: Vec<f64>,
    pub terminal: Option<Terminal>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub lambda: f64,
    pub tag: ClassTag,
    pub k: usize,
    pub reason: Option<String>,
    pub evidence: Evidence,
}

impl Classification {
    pub fn decided(&self) -> bool {
        self.tag != ClassTag::Undecided
    }

    pub fn label(&self) -> String {
        match self.tag {
            ClassTag::A => format!("A({})", self.k),
            ClassTag::I => format!("I({})", self.k),
            ClassTag::Undecided => format!("Undecided({})", self.reason.as_deref().unwrap_or("")),
        }
    }
}

fn classify_trajectory(lambda: f64, traj: &Trajectory) -> Classification {
    let last = traj.last();
    let evidence = Evidence {
        settle_radius: traj.settle_radius,
        double_zero_radius: traj.double_zero,
        final_energy: last.e,
        final_radius: last.r,
        nodes: traj.nodes.clone(),
        terminal: Some(traj.terminal),
    };
    let (tag, reason) = match traj.terminal {
        Terminal::SettledNegativeEnergy => (ClassTag::A, None),
        Terminal::DoubleZero => (ClassTag::I, None),
        Terminal::ReachedRMax => (ClassTag::Undecided, Some("reached_r_max".to_string())),
        Terminal::MaxNodes => (ClassTag::Undecided, Some("max_nodes".to_string())),
        Terminal::StepFailure => (ClassTag::Undecided, Some("step_failure".to_string())),
        Terminal::UniquenessBoundary => {
            (ClassTag::Undecided, Some("uniqueness_boundary".to_string()))
        }
        Terminal::EnergyLevel => (ClassTag::Undecided, Some("energy_level".to_string())),
    };
    Classification {
        lambda,
        tag,
        k: traj.node_count(),
        reason,
        evidence,
    }
}

/// Maps the terminal state of a solve at `λ` to `A(k)`, `I(k)` or `Undecided`.
pub fn classify(prob: &Problem, lambda: f64, opts: &SolveOptions) -> Classification {
    match solve(prob, lambda, opts) {
        Ok(traj) => classify_trajectory(lambda, &traj),
        Err(e) => Classification {
            lambda,
            tag: ClassTag::Undecided,
            k: 0,
            reason: Some(format!("step_failure: {e}")),
            evidence: Evidence {
                settle_radius: None,
                double_zero_radius: None,
                final_energy: f64::NAN,
                final_radius: f64::NAN,
                nodes: vec![],
                terminal: None,
            },
        },
    }
}

/// Number of sign changes before settling or reaching a double zero.
pub fn node_count(prob: &Problem, lambda: f64, opts: &SolveOptions) -> Result<usize> {
    let c = classify(prob, lambda, opts);
    if c.decided() {
        Ok(c.k)
    } else {
        Err(Error::Undecided {
            lambda,
            reason: format!(
                "{}; increase r_max or max_nodes",
                c.reason.unwrap_or_default()
            ),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchOptions {
    /// First amplitude of the sweep; `None` starts just above `β+`.
    pub lambda_start: Option<f64>,
    pub growth_factor: f64,
    pub bisect_tol: f64,
    pub lambda_max: f64,
    /// Amplitudes classified in parallel per sweep round.
    pub batch: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            lambda_start: None,
            growth_factor: 1.2,
            bisect_tol: 1e-9,
            lambda_max: 1e12,
            batch: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub lambda: f64,
    pub class: String,
    pub nodes: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShootResult {
    pub k: usize,
    pub lambda_k: f64,
    pub bracket: (f64, f64),
    pub bracket_classes: (String, String),
    pub iterations: usize,
    /// Amplitude at which `trajectory` was computed.
    pub trajectory_lambda: f64,
    pub trajectory_ref: Option<String>,
    pub classification_evidence: Evidence,
    pub sweep_log: Vec<SweepEntry>,
    pub notes: Vec<String>,
    #[serde(skip)]
    pub trajectory: Option<Trajectory>,
}

fn log_entry(c: &Classification) -> SweepEntry {
    SweepEntry {
        lambda: c.lambda,
        class: c.label(),
        nodes: c.k,
    }
}

/// Locates the amplitude where the node count jumps from `k` to `k + 1`.
pub fn find_k_node(
    prob: &Problem,
    k: usize,
    opts: &SolveOptions,
    search: &SearchOptions,
) -> Result<ShootResult> {
    if !(search.growth_factor > 1.0 && search.bisect_tol > 0.0) {
        return Err(Error::InvalidParameter(
            "growth_factor must exceed 1 and bisect_tol be positive".into(),
        ));
    }
    let beta = prob.nonlin.beta_plus();
    let start = search
        .lambda_start
        .unwrap_or(if beta > 0.0 { beta * 1.01 } else { 1.0 });
    if !(start > 0.0) {
        return Err(Error::InvalidParameter(
            "lambda_start must be positive".into(),
        ));
    }
    let mut log: Vec<SweepEntry> = Vec::new();
    let mut notes = Vec::new();
    if prob.nonlin.beta_plus() > 0.0
        && crate::problem::conditions::check_h(prob).holds == Verdict::Pass
    {
        notes.push("(H) holds: no amplitude is expected to oscillate indefinitely".into());
    }

    // geometric sweep, classified in parallel batches
    let mut prev: Option<Classification> = None;
    let mut bracket: Option<(Classification, Classification)> = None;
    let mut i = 0usize;
    'sweep: loop {
        let lambdas: Vec<f64> = (0..search.batch.max(1))
            .map(|j| start * search.growth_factor.powi((i + j) as i32))
            .collect();
        if lambdas[0] > search.lambda_max {
            break;
        }
        i += lambdas.len();
        let classes: Vec<Classification> = lambdas
            .par_iter()
            .map(|&l| classify(prob, l, opts))
            .collect();
        for c in classes {
            if c.lambda > search.lambda_max {
                break 'sweep;
            }
            log.push(log_entry(&c));
            if c.k > k {
                if let Some(pv) = prev.take() {
                    if pv.decided() && pv.k <= k {
                        bracket = Some((pv, c));
                        break 'sweep;
                    }
                }
                if log.len() == 1 {
                    return Err(Error::NotFound {
                        k,
                        reason: format!("lambda_start = {start} already has {} > {k} nodes", c.k),
                    });
                }
            }
            prev = Some(c);
        }
    }
    let (mut lo, mut hi) = bracket.ok_or_else(|| Error::NotFound {
        k,
        reason: format!(
            "sweep up to lambda = {:e} found no transition; log: {:?}",
            search.lambda_max, log
        ),
    })?;
    let mut iterations = 0;
    let mut exact: Option<Classification> = None;
    // with compact support the k-node solution is the one ending in a double zero, so keep
    // bisecting past bisect_tol until a midpoint lands on it or the bracket is float-tight
    let refine = |lo: f64, hi: f64| {
        hi - lo > search.bisect_tol * lo
            || (prob.compact_support && hi - lo > 4.0 * f64::EPSILON * lo)
    };
    while exact.is_none() && refine(lo.lambda, hi.lambda) {
        iterations += 1;
        if iterations > 200 {
            break;
        }
        let mid = 0.5 * (lo.lambda + hi.lambda);
        let c = classify(prob, mid, opts);
        if c.k > k {
            hi = c;
        } else if c.tag == ClassTag::I && c.k == k {
            exact = Some(c);
        } else if c.decided() {
            lo = c;
        } else {
            return Err(Error::Undecided {
                lambda: mid,
                reason: format!(
                    "{} with {} nodes between {} and {}",
                    c.label(),
                    c.k,
                    lo.label(),
                    hi.label()
                ),
            });
        }
    }
    let lambda_k = exact
        .as_ref()
        .map_or(0.5 * (lo.lambda + hi.lambda), |c| c.lambda);
    let mut traj = solve(prob, lambda_k, opts)?;
    if traj.node_count() != k {
        traj = solve(prob, lo.lambda, opts)?;
    }
    let evidence = classify_trajectory(traj.lambda, &traj).evidence;
    Ok(ShootResult {
        k,
        lambda_k,
        bracket: (lo.lambda, hi.lambda),
        bracket_classes: (lo.label(), hi.label()),
        iterations,
        trajectory_lambda: traj.lambda,
        trajectory_ref: None,
        classification_evidence: evidence,
        sweep_log: log,
        notes,
        trajectory: Some(traj),
    })
}
