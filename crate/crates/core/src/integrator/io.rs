//! Trajectory CSV (`r,v,w,E,theta`) and the JSON event sidecar.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Sample, SolveStats, Terminal, Trajectory};
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "r,v,w,E,theta";

/// Events and metadata written next to the CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Events {
    pub lambda: f64,
    pub p: f64,
    pub nodes: Vec<f64>,
    pub critical_points: Vec<f64>,
    pub double_zero: Option<f64>,
    pub terminal: Terminal,
    pub settle_radius: Option<f64>,
}

impl Events {
    pub fn of(traj: &Trajectory) -> Self {
        Self {
            lambda: traj.lambda,
            p: traj.p,
            nodes: traj.nodes.clone(),
            critical_points: traj.critical_points.clone(),
            double_zero: traj.double_zero,
            terminal: traj.terminal,
            settle_radius: traj.settle_radius,
        }
    }
}

/// CSV text with every `stride`-th sample; the last sample is always kept.
pub fn to_csv(traj: &Trajectory, stride: usize) -> String {
    let stride = stride.max(1);
    let mut out = String::with_capacity(traj.samples.len() / stride * 120 + 32);
    out.push_str(CSV_HEADER);
    out.push('\n');
    let n = traj.samples.len();
    for (i, s) in traj.samples.iter().enumerate() {
        if i % stride == 0 || i + 1 == n {
            let _ = writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                s.r, s.v, s.w, s.e, s.theta
            );
        }
    }
    out
}

pub fn parse_csv(text: &str) -> Result<Vec<Sample>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == CSV_HEADER => {}
        other => {
            return Err(Error::Parse(format!(
                "expected header {CSV_HEADER:?}, got {other:?}"
            )))
        }
    }
    let mut samples = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let vals: Vec<f64> = line
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse(format!("line {}: {e}", i + 2)))?;
        if vals.len() != 5 {
            return Err(Error::Parse(format!(
                "line {}: expected 5 columns, got {}",
                i + 2,
                vals.len()
            )));
        }
        samples.push(Sample {
            r: vals[0],
            v: vals[1],
            w: vals[2],
            e: vals[3],
            theta: vals[4],
        });
    }
    Ok(samples)
}

pub fn events_json(traj: &Trajectory) -> String {
    serde_json::to_string_pretty(&Events::of(traj)).expect("events serialize")
}

pub fn write_trajectory(traj: &Trajectory, csv: &Path, events: &Path, stride: usize) -> Result<()> {
    std::fs::write(csv, to_csv(traj, stride))?;
    std::fs::write(events, events_json(traj) + "\n")?;
    Ok(())
}

/// Rebuilds a trajectory from its CSV and event sidecar.
pub fn load_trajectory(csv: &Path, events: &Path) -> Result<Trajectory> {
    let samples = parse_csv(&std::fs::read_to_string(csv)?)?;
    let ev: Events = serde_json::from_str(&std::fs::read_to_string(events)?)?;
    Ok(from_parts(samples, ev))
}

pub fn from_parts(samples: Vec<Sample>, ev: Events) -> Trajectory {
    Trajectory {
        lambda: ev.lambda,
        p: ev.p,
        samples,
        dissipation: Vec::new(),
        nodes: ev.nodes,
        critical_points: ev.critical_points,
        double_zero: ev.double_zero,
        terminal: ev.terminal,
        settle_radius: ev.settle_radius,
        message: None,
        warnings: Vec::new(),
        stats: SolveStats::default(),
    }
}
