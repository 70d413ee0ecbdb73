mod common;

use common::gauss5;
use nodalshoot::problem::conditions::{check_q, check_w};
use nodalshoot::problem::reduce::{ReducedWeight, WeightPair};
use nodalshoot::problem::weight::reduce_weights;
use nodalshoot::problem::Verdict;
use nodalshoot::ptrig::PExponent;

fn e(p: f64) -> PExponent {
    PExponent::new(p).unwrap()
}

/// `χ(r) = ∫_0^r g` on panels halving towards 0, so power singularities at 0 are resolved.
fn chi_quadrature(r: f64, g: &dyn Fn(f64) -> f64) -> f64 {
    let mut acc = 0.0;
    let mut hi = r;
    for _ in 0..200 {
        acc += gauss5(0.5 * hi, hi, 4, g);
        hi *= 0.5;
    }
    acc
}

/// Solves `χ(r) = t` by bisection and returns `a^{1/p} b^{1/p'}` there.
fn q_oracle(t: f64, p: f64, a: &dyn Fn(f64) -> f64, b: &dyn Fn(f64) -> f64) -> f64 {
    let g = |r: f64| (b(r) / a(r)).powf(1.0 / p);
    let (mut lo, mut hi) = (0.0, 1.0);
    while chi_quadrature(hi, &g) < t {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if chi_quadrature(mid, &g) < t {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    let r = 0.5 * (lo + hi);
    a(r).powf(1.0 / p) * b(r).powf(1.0 - 1.0 / p)
}

const TS: [f64; 10] = [1e-3, 0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 40.0];

fn assert_q_matches(red: &ReducedWeight, oracle: impl Fn(f64) -> f64, what: &str) {
    for t in TS {
        let (got, want) = (red.q(t), oracle(t));
        assert!(
            ((got - want) / want).abs() <= 1e-8,
            "{what} t={t}: {got:e} vs {want:e}"
        );
    }
}

#[test]
fn matukuma_reduction_matches_quadrature_inversion() {
    for sigma in [1.0, 2.0] {
        let red = ReducedWeight::new(WeightPair::matukuma(3.0, sigma).unwrap(), e(2.0)).unwrap();
        let a = |r: f64| r * r;
        let b = move |r: f64| r * r / (1.0 + r.powf(sigma));
        assert_q_matches(
            &red,
            |t| q_oracle(t, 2.0, &a, &b),
            &format!("matukuma σ={sigma}"),
        );
    }
}

#[test]
fn matukuma_sigma_two_has_closed_form() {
    // χ = asinh r, so q(t) = sinh²t / cosh t
    let red = ReducedWeight::new(WeightPair::matukuma(3.0, 2.0).unwrap(), e(2.0)).unwrap();
    assert_q_matches(
        &red,
        |t| t.sinh().powi(2) / t.cosh(),
        "matukuma closed form",
    );
}

#[test]
fn k_hessian_reduction_matches_quadrature_inversion() {
    for (d, k) in [(3.0, 2.0), (4.0, 2.0), (5.0, 3.0)] {
        let p = k + 1.0;
        let red = ReducedWeight::new(WeightPair::k_hessian(d, k).unwrap(), e(p)).unwrap();
        let a = move |r: f64| r.powf(d - k);
        let b = move |r: f64| r.powf(d - 1.0);
        assert_q_matches(
            &red,
            |t| q_oracle(t, p, &a, &b),
            &format!("k-hessian d={d} k={k}"),
        );
    }
}

#[test]
fn equal_weights_reduce_to_themselves() {
    for (ex, p) in [(2.0, 2.0), (3.5, 3.0), (1.0, 1.5)] {
        let red = ReducedWeight::new(WeightPair::identity(ex).unwrap(), e(p)).unwrap();
        for t in TS {
            assert!(
                (red.chi(t) - t).abs() <= 1e-12 * t,
                "χ({t}) = {}",
                red.chi(t)
            );
            assert!((red.chi_inv(t) - t).abs() <= 1e-12 * t);
            assert!((red.q(t) - t.powf(ex)).abs() <= 1e-11 * t.powf(ex));
        }
    }
}

#[test]
fn reductions_passing_w_give_weights_passing_q() {
    let p2 = e(2.0);
    let mut pairs = vec![
        (WeightPair::matukuma(3.0, 0.5).unwrap(), p2),
        (WeightPair::matukuma(3.0, 1.0).unwrap(), p2),
        (WeightPair::matukuma(3.0, 1.5).unwrap(), p2),
        (WeightPair::matukuma(3.0, 2.0).unwrap(), p2),
        (WeightPair::matukuma(4.0, 1.0).unwrap(), p2),
        (WeightPair::matukuma(3.0, 1.0).unwrap(), e(3.0)),
        (WeightPair::stellar(3.0, 2.0, p2).unwrap(), p2),
        (WeightPair::stellar(3.0, 1.0, p2).unwrap(), p2),
        (WeightPair::unified(3.0, 0.5, 0.0, 1.0, 2.0).unwrap(), p2),
        (
            WeightPair::unified(4.0, 0.0, -1.0, 1.0, 1.0).unwrap(),
            e(2.5),
        ),
        (WeightPair::identity(2.0).unwrap(), p2),
        (WeightPair::identity(3.0).unwrap(), e(3.0)),
    ];
    for (d, k) in [(3.0, 2.0), (4.0, 2.0), (5.0, 3.0)] {
        pairs.push((WeightPair::k_hessian(d, k).unwrap(), e(k + 1.0)));
    }
    let mut passing = 0;
    for (pair, p) in pairs {
        let w = check_w(&pair, p, 1e-6, 1e6);
        if w.iter().any(|c| c.holds == Verdict::Fail) {
            continue;
        }
        passing += 1;
        let weight = reduce_weights(pair, p).unwrap();
        let q = check_q(&weight, p, 1e-6, 1e3);
        for c in &q {
            assert_ne!(
                c.holds,
                Verdict::Fail,
                "{pair:?} p={}: {:?} {:?}",
                p.p,
                c.name,
                c.evidence
            );
        }
    }
    assert!(passing >= 8, "{passing}");
}

#[test]
fn w1_violation_is_rejected() {
    // (b/a)^{1/p} = r^{-2} is not integrable at 0
    let pair = WeightPair::new(
        nodalshoot::problem::reduce::Profile::power(4.0),
        nodalshoot::problem::reduce::Profile::power(0.0),
    )
    .unwrap();
    assert!(ReducedWeight::new(pair, e(2.0)).is_err());
    assert!(check_w(&pair, e(2.0), 1e-6, 1e6)
        .iter()
        .any(|c| c.holds == Verdict::Fail));
}
