use std::time::Instant;

use nodalshoot::integrator::{solve, SolveOptions, Terminal};
use nodalshoot::library::lookup;
use nodalshoot::shooter::{classify, find_k_node, ClassTag, SearchOptions};

/// λ₀ for p = 2, q = r², f = s³ - s from an independent fixed-step RK4 bisection.
const LAMBDA_0: f64 = 4.337_387_68;

fn canonical() -> nodalshoot::problem::Problem {
    lookup("canonical").unwrap().config.build().unwrap()
}

#[test]
fn k_node_amplitudes_increase_with_k() {
    let prob = canonical();
    let opts = SolveOptions {
        r_max: 60.0,
        ..Default::default()
    };
    let mut prev = 0.0;
    for k in 0..=4 {
        let t0 = Instant::now();
        let res = find_k_node(&prob, k, &opts, &SearchOptions::default()).unwrap();
        let secs = t0.elapsed().as_secs_f64();
        assert!(secs < 60.0, "k={k} took {secs} s");
        assert!(res.lambda_k > prev, "k={k}: {} after {prev}", res.lambda_k);
        assert!(res.bracket.0 < res.lambda_k && res.lambda_k < res.bracket.1);
        assert!(res.bracket.1 - res.bracket.0 <= 1e-9 * res.bracket.0);
        // the bracket ends straddle the k -> k + 1 transition
        let (lo, hi) = (
            classify(&prob, res.bracket.0, &opts),
            classify(&prob, res.bracket.1, &opts),
        );
        assert_eq!((lo.tag, lo.k), (ClassTag::A, k));
        assert!(hi.k > k);
        if k == 0 {
            assert!(
                (res.lambda_k - LAMBDA_0).abs() <= 1e-3 * LAMBDA_0,
                "{}",
                res.lambda_k
            );
        }
        prev = res.lambda_k;
    }
}

#[test]
fn sweep_log_records_every_classified_amplitude() {
    let prob = canonical();
    let res = find_k_node(
        &prob,
        1,
        &SolveOptions {
            r_max: 60.0,
            ..Default::default()
        },
        &SearchOptions::default(),
    )
    .unwrap();
    assert!(!res.sweep_log.is_empty());
    assert!(res.sweep_log.windows(2).all(|w| w[1].lambda > w[0].lambda));
    assert!(res.sweep_log.last().unwrap().nodes > 1);
}

#[test]
fn sub_linear_term_gives_compact_support() {
    let prob = lookup("compact-support").unwrap().config.build().unwrap();
    let opts = SolveOptions {
        r_max: 200.0,
        ..Default::default()
    };
    let mut prev = 0.0;
    for k in 0..=2 {
        let res = find_k_node(&prob, k, &opts, &SearchOptions::default()).unwrap();
        let traj = res.trajectory.as_ref().unwrap();
        assert_eq!(
            traj.terminal,
            Terminal::DoubleZero,
            "k={k}: {:?}",
            res.classification_evidence
        );
        let support = traj.double_zero.unwrap();
        assert!(support.is_finite() && support < opts.r_max);
        assert_eq!(traj.node_count(), k);
        assert!(support > prev, "k={k}: support {support} after {prev}");
        prev = support;
    }
}

#[test]
fn linear_term_never_reaches_a_double_zero() {
    let prob = canonical();
    let opts = SolveOptions {
        r_max: 1e3,
        max_nodes: 10_000,
        ..Default::default()
    };
    for k in 0..=2 {
        let res = find_k_node(&prob, k, &opts, &SearchOptions::default()).unwrap();
        for lambda in [res.lambda_k, res.bracket.0, res.bracket.1] {
            let traj = solve(&prob, lambda, &opts).unwrap();
            assert!(traj.double_zero.is_none(), "k={k} λ={lambda}");
            assert_ne!(traj.terminal, Terminal::DoubleZero);
        }
    }
}
