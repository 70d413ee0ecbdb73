use std::fmt::Write as _;
use std::path::Path;

use nodalshoot::diagnostics::{
    dissipation_residual, h_identity_residual, layer_csv, layer_probe, rotation_certificate,
};
use nodalshoot::integrator::io::{events_json, load_trajectory, to_csv};
use nodalshoot::integrator::{solve, SolveOptions, Terminal, Trajectory};
use nodalshoot::library::lookup;
use nodalshoot::problem::conditions::{check_f, check_q, check_w};
use nodalshoot::problem::config::{ProblemConfig, WeightConfig};
use nodalshoot::problem::{
    reduce_weights, ConditionReport, Hypothesis, Problem, Verdict, WeightPair,
};
use nodalshoot::shooter::{classify, find_k_node};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{Cli, Command, DiagArgs, Global};
use crate::output::{
    digest, gnuplot_script, timestamp, Failure, Manifest, OutDir, Outcome, Tolerances,
    EXIT_FAILURE, EXIT_HYPOTHESIS, EXIT_USAGE,
};

struct Loaded {
    config: ProblemConfig,
    /// Library amplitude when the config came from `builtin:<name>`.
    default_lambda: Option<f64>,
}

fn load(g: &Global) -> Outcome<Loaded> {
    let source = g
        .config
        .as_deref()
        .ok_or_else(|| Failure::new(EXIT_USAGE, "--config is required"))?;
    let (mut config, default_lambda) = match source.strip_prefix("builtin:") {
        Some(name) => {
            let e = lookup(name)?;
            (e.config, Some(e.lambda))
        }
        None => (ProblemConfig::from_path(Path::new(source))?, None),
    };
    if let Some(t) = g.tol_rel {
        config.solver.rel_tol = t;
    }
    if let Some(t) = g.tol_abs {
        config.solver.abs_tol = t;
    }
    if let Some(r) = g.r_max {
        config.solver.r_max = r;
    }
    config.solver.validate()?;
    Ok(Loaded {
        config,
        default_lambda,
    })
}

fn manifest(command: &str, arguments: Value, cfg: &ProblemConfig) -> Manifest {
    let value = serde_json::to_value(cfg).expect("config serializes");
    Manifest {
        command: command.to_string(),
        arguments,
        config_digest: digest(&value),
        version: env!("CARGO_PKG_VERSION"),
        tolerances: Tolerances {
            rel_tol: cfg.solver.rel_tol,
            abs_tol: cfg.solver.abs_tol,
            r_max: cfg.solver.r_max,
        },
        timestamp: timestamp(),
        outputs: Vec::new(),
    }
}

pub fn run(cli: &Cli) -> Outcome {
    let g = &cli.global;
    match &cli.command {
        Command::Solve { lambda } => cmd_solve(g, *lambda),
        Command::Shoot { k } => cmd_shoot(g, *k),
        Command::Sweep {
            lambda_min,
            lambda_max,
            count,
        } => cmd_sweep(g, *lambda_min, *lambda_max, *count),
        Command::Check => cmd_check(g),
        Command::Reduce { points } => cmd_reduce(g, *points),
        Command::Diag(args) => cmd_diag(g, args),
    }
}

/// (Q1)–(Q4) and (f1)–(f2); the first failure becomes exit code 2 unless `--force`.
fn gate(prob: &Problem, force: bool) -> Outcome {
    let g = &prob.grids;
    let mut entries = check_q(&prob.weight, prob.p, g.r_min, g.r_max);
    entries.extend(check_f(&prob.nonlin, g.s_max));
    let failed: Vec<String> = entries
        .iter()
        .filter(|e| e.holds == Verdict::Fail)
        .map(|e| format!("hypothesis {} failed: {}", e.name, e.evidence_summary()))
        .collect();
    if failed.is_empty() {
        return Ok(());
    }
    if force {
        for f in &failed {
            eprintln!("warning: {f} (continuing under --force)");
        }
        return Ok(());
    }
    Err(Failure::new(
        EXIT_HYPOTHESIS,
        failed.join("\n") + "\nrerun with --force to integrate anyway",
    ))
}

fn write_trajectory(out: &mut OutDir, traj: &Trajectory) -> Outcome {
    out.write("trajectory.csv", &to_csv(traj, 1))?;
    out.write("events.json", &(events_json(traj) + "\n"))
}

fn cmd_solve(g: &Global, lambda: Option<f64>) -> Outcome {
    let loaded = load(g)?;
    let cfg = &loaded.config;
    let lambda = lambda
        .or(loaded.default_lambda)
        .ok_or_else(|| Failure::new(EXIT_USAGE, "solve needs --lambda"))?;
    if lambda == 0.0 {
        return Err(Failure::new(EXIT_FAILURE, "lambda must be nonzero"));
    }
    if !lambda.is_finite() {
        return Err(Failure::new(
            EXIT_FAILURE,
            format!("lambda must be finite, got {lambda}"),
        ));
    }
    let prob = cfg.build()?;
    gate(&prob, g.force)?;
    let traj = solve(&prob, lambda, &cfg.solver)?;
    let mut out = OutDir::create(&g.out)?;
    write_trajectory(&mut out, &traj)?;
    out.finish(manifest(
        "solve",
        json!({"lambda": lambda, "force": g.force}),
        cfg,
    ))?;
    let last = traj.last();
    println!(
        "lambda={lambda} nodes={} terminal={:?} r_end={} E_end={}",
        traj.node_count(),
        traj.terminal,
        last.r,
        last.e
    );
    if traj.terminal == Terminal::StepFailure {
        return Err(Failure::new(
            EXIT_FAILURE,
            format!(
                "solver failed at r = {}: {}",
                last.r,
                traj.message.clone().unwrap_or_default()
            ),
        ));
    }
    Ok(())
}

fn cmd_shoot(g: &Global, k: i64) -> Outcome {
    if k < 0 {
        return Err(Failure::new(
            EXIT_USAGE,
            format!("--k must be a non-negative node count, got {k}"),
        ));
    }
    let k = k as usize;
    let loaded = load(g)?;
    let cfg = &loaded.config;
    let prob = cfg.build()?;
    gate(&prob, g.force)?;
    let mut res = find_k_node(&prob, k, &cfg.solver, &cfg.search)?;
    let traj = res
        .trajectory
        .take()
        .expect("find_k_node returns its trajectory");
    res.trajectory_ref = Some("trajectory.csv".into());
    let mut out = OutDir::create(&g.out)?;
    out.write_json("shoot.json", &res)?;
    write_trajectory(&mut out, &traj)?;
    let title = format!("{} k={k} lambda={}", prob.label, res.lambda_k);
    out.write(
        "plot.gp",
        &gnuplot_script("trajectory.csv", title.trim(), &traj.nodes),
    )?;
    out.finish(manifest("shoot", json!({"k": k, "force": g.force}), cfg))?;
    println!(
        "k={k} lambda_k={} bracket=[{}, {}] classes=({}, {}) iterations={}",
        res.lambda_k,
        res.bracket.0,
        res.bracket.1,
        res.bracket_classes.0,
        res.bracket_classes.1,
        res.iterations
    );
    Ok(())
}

fn cmd_sweep(g: &Global, lo: f64, hi: f64, count: usize) -> Outcome {
    if !(lo > 0.0 && hi > lo && hi.is_finite() && count >= 2) {
        return Err(Failure::new(
            EXIT_USAGE,
            "sweep needs 0 < --lambda-min < --lambda-max and --count >= 2",
        ));
    }
    let loaded = load(g)?;
    let cfg = &loaded.config;
    let prob = cfg.build()?;
    let mut csv = String::from("lambda,class,nodes\n");
    for i in 0..count {
        let lambda = lo * (hi / lo).powf(i as f64 / (count - 1) as f64);
        let c = classify(&prob, lambda, &cfg.solver);
        let class = c.label().replace(',', ";");
        let _ = writeln!(csv, "{lambda:.16e},{class},{}", c.k);
        println!("{lambda:<24e} {class}");
    }
    let mut out = OutDir::create(&g.out)?;
    out.write("sweep.csv", &csv)?;
    out.finish(manifest(
        "sweep",
        json!({"lambda_min": lo, "lambda_max": hi, "count": count}),
        cfg,
    ))
}

fn cmd_check(g: &Global) -> Outcome {
    let loaded = load(g)?;
    let cfg = &loaded.config;
    let prob = cfg.build()?;
    let report = prob.check();
    print!("{}", report.to_table());
    let mut out = OutDir::create(&g.out)?;
    out.write_json("check.json", &report)?;
    out.finish(manifest("check", json!({}), cfg))?;
    if report.no_failures() {
        return Ok(());
    }
    let names: Vec<String> = report
        .failures()
        .iter()
        .map(|e| e.name.to_string())
        .collect();
    Err(Failure::new(
        EXIT_HYPOTHESIS,
        format!("failed: {}", names.join(", ")),
    ))
}

fn geometric(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect()
}

fn cmd_reduce(g: &Global, points: usize) -> Outcome {
    if points < 2 {
        return Err(Failure::new(EXIT_USAGE, "--points must be at least 2"));
    }
    let loaded = load(g)?;
    let cfg = &loaded.config;
    let p = cfg.exponent()?;
    let pair = match (cfg.weight.pair(p)?, &cfg.weight) {
        (Some(pair), _) => pair,
        (None, WeightConfig::PowerLaw { n }) => WeightPair::identity(n - 1.0)?,
        (None, _) => {
            return Err(Failure::new(
                EXIT_FAILURE,
                "reduce needs a two-weight or power-law description",
            ))
        }
    };
    let grids = cfg.grids;
    let report = ConditionReport {
        entries: check_w(&pair, p, grids.r_min, grids.r_max),
    };
    print!("{}", report.to_table());
    let mut out = OutDir::create(&g.out)?;
    out.write_json("w_report.json", &report)?;
    let args = json!({"points": points});
    if report.verdict(Hypothesis::W1) == Verdict::Fail {
        out.finish(manifest("reduce", args, cfg))?;
        return Err(Failure::new(
            EXIT_HYPOTHESIS,
            "(W1) failed: the reduction does not exist",
        ));
    }
    let weight = match reduce_weights(pair, p) {
        Ok(w) => w,
        Err(e) => {
            out.finish(manifest("reduce", args, cfg))?;
            return Err(e.into());
        }
    };
    let red = weight.reduced().expect("reduced weight");
    let hi = grids.r_max.min(0.5 * red.t_max());
    let mut csv = String::from("r,q,dq,Q,h\n");
    for t in geometric(grids.r_min, hi, points) {
        let _ = writeln!(
            csv,
            "{t:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            weight.q(t),
            weight.dq(t),
            weight.big_q(t),
            weight.h(t, p)
        );
    }
    out.write("reduced.csv", &csv)?;
    out.finish(manifest("reduce", args, cfg))
}

#[derive(Debug, Serialize)]
struct Certificate {
    name: String,
    verdict: Verdict,
    evidence: Value,
}

#[derive(Debug, Serialize)]
struct DiagReport {
    lambda: f64,
    source: String,
    certificates: Vec<Certificate>,
}

fn residual_verdict(x: f64, tol: f64) -> Verdict {
    if x.is_nan() {
        Verdict::Inconclusive
    } else if x <= tol {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

fn cmd_diag(g: &Global, a: &DiagArgs) -> Outcome {
    let loaded = load(g)?;
    let cfg = &loaded.config;
    let prob = cfg.build()?;
    let (traj, source) = match &a.traj {
        Some(csv) => {
            let events = a
                .events
                .clone()
                .unwrap_or_else(|| csv.with_file_name("events.json"));
            (load_trajectory(csv, &events)?, display(csv))
        }
        None => {
            let lambda = a
                .lambda
                .or(loaded.default_lambda)
                .ok_or_else(|| Failure::new(EXIT_USAGE, "diag needs --lambda or --traj"))?;
            if lambda == 0.0 {
                return Err(Failure::new(EXIT_FAILURE, "lambda must be nonzero"));
            }
            (solve(&prob, lambda, &cfg.solver)?, "computed".to_string())
        }
    };
    let all = !a.any_selected();
    let rotation = if all { vec![1.0] } else { a.rotation.clone() };
    let mut certs = Vec::new();
    for c1 in rotation {
        let cert = rotation_certificate(&prob, &traj, c1)?;
        let mut evidence = json!({
            "c1": c1,
            "r_bar": cert.constants.r_bar,
            "checked": cert.checked,
            "violations": cert.violations,
            "min_margin": cert.min_margin,
        });
        if cert.checked == 0 {
            evidence["note"] = json!("band not visited beyond r_bar");
        }
        certs.push(Certificate {
            name: format!("rotation c1={c1}"),
            verdict: cert.verdict,
            evidence,
        });
    }
    if all || a.dissipation {
        let mu = a.mu.unwrap_or(prob.mu_star);
        let (d1, d2) = (
            dissipation_residual(&prob, &traj, mu, 1),
            dissipation_residual(&prob, &traj, mu, 2),
        );
        certs.push(Certificate {
            name: "dissipation".into(),
            verdict: residual_verdict(d1, a.residual_tol),
            evidence: json!({"mu": mu, "residual": d1, "residual_stride2": d2, "tol": a.residual_tol}),
        });
    }
    if all || a.h_identity {
        let (h1, h2) = (
            h_identity_residual(&prob, &traj, 1),
            h_identity_residual(&prob, &traj, 2),
        );
        certs.push(Certificate {
            name: "h-identity".into(),
            verdict: residual_verdict(h1, a.residual_tol),
            evidence: json!({"residual": h1, "residual_stride2": h2, "tol": a.residual_tol}),
        });
    }
    let mut out = OutDir::create(&g.out)?;
    if a.layer_probe {
        let opts = SolveOptions {
            max_nodes: cfg.solver.max_nodes.max(10_000),
            ..cfg.solver.clone()
        };
        let entries = layer_probe(&prob, &a.lambdas, &opts)?;
        out.write("layer.csv", &layer_csv(&entries))?;
        let rs: Vec<Option<f64>> = entries.iter().map(|e| e.r).collect();
        let found = rs.iter().all(|r| r.is_some());
        let decreasing = found && rs.windows(2).all(|w| w[1] < w[0]);
        certs.push(Certificate {
            name: "layer-probe".into(),
            verdict: if found {
                Verdict::Pass
            } else {
                Verdict::Inconclusive
            },
            evidence: json!({"lambda": a.lambdas, "R": rs, "strictly_decreasing": decreasing}),
        });
    }
    for c in &certs {
        println!(
            "{:<20} {:<13} {}",
            c.name,
            c.verdict.to_string(),
            c.evidence
        );
    }
    let failed: Vec<String> = certs
        .iter()
        .filter(|c| c.verdict == Verdict::Fail)
        .map(|c| c.name.clone())
        .collect();
    out.write_json(
        "diag.json",
        &DiagReport {
            lambda: traj.lambda,
            source: source.clone(),
            certificates: certs,
        },
    )?;
    let args = json!({
        "lambda": traj.lambda,
        "source": source,
        "rotation": a.rotation,
        "dissipation": a.dissipation,
        "h_identity": a.h_identity,
        "layer_probe": a.layer_probe,
        "lambdas": a.lambdas,
    });
    out.finish(manifest("diag", args, cfg))?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::new(
            EXIT_HYPOTHESIS,
            format!("certificate failed: {}", failed.join(", ")),
        ))
    }
}

fn display(p: &Path) -> String {
    p.display().to_string()
}
