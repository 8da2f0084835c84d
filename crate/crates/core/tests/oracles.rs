//! Solver results against independent computations: quadrature, brute
//! force grids and direct best-response checks.

mod common;

use rand::Rng;
use sigeq::avg_power::{max_separation, nash_avg_best_response, solve_nash_avg};
use sigeq::detection::{follower_risks, game_risks};
use sigeq::nash::{best_response_receiver, best_response_transmitter};
use sigeq::oracle::grid_search_transmitter;
use sigeq::stackelberg::{case6_expression, classify};
use sigeq::*;

fn phi(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

#[allow(clippy::too_many_arguments)]
fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
        return left + right + (left + right - whole) / 15.0;
    }
    simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson(f, a, b, fa, fm, fb, whole, 1e-15, 50)
}

/// Upper Gaussian tail by quadrature of the density.
fn tail(x: f64) -> f64 {
    integrate(&phi, x, x.max(0.0) + 40.0)
}

#[test]
fn q_function_matches_quadrature() {
    assert!((tail(1.0) - 0.158655253931457).abs() < 1e-14);
    for x in [-3.0, -1.2, -0.1, 0.0, 0.4, 1.0, 2.5, 5.0] {
        let q = q_function(x);
        assert!((q - tail(x)).abs() < 1e-13, "x = {x}: {q} vs {}", tail(x));
    }
}

/// Error probabilities of the likelihood-ratio test between `N(0, 1)` and
/// `N(d, 1)`, with the decision boundary located by bisection on the raw
/// likelihood comparison and the tails integrated numerically.
fn lrt_probs_by_quadrature(d: f64, tau: f64, zeta: f64) -> (f64, f64) {
    // Log-likelihoods, so the comparison survives far into the tails.
    let says_h1 = |y: f64| zeta * (-(y - d) * (y - d) / 2.0) >= zeta * (tau.ln() - y * y / 2.0);
    let (mut lo, mut hi) = (-60.0, 60.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if says_h1(mid) == says_h1(hi) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    if says_h1(t + 1.0) {
        // H1 above the boundary.
        (tail(t), 1.0 - tail(t - d))
    } else {
        (1.0 - tail(t), tail(t - d))
    }
}

#[test]
fn conditional_probs_match_quadrature() {
    for (d, tau, zeta) in [(0.4704, 0.75, 1), (2.0, 1.0, 1), (1.3, 2.5, 1), (0.8, 0.4, -1), (3.0, 1.7, -1)] {
        let (p10, p01) = conditional_error_probs(d, tau, zeta).unwrap();
        let (q10, q01) = lrt_probs_by_quadrature(d, tau, f64::from(zeta));
        assert!((p10 - q10).abs() < 1e-12, "{d} {tau} {zeta}: {p10} vs {q10}");
        assert!((p01 - q01).abs() < 1e-12, "{d} {tau} {zeta}: {p01} vs {q01}");
    }
}

#[test]
fn stackelberg_never_beaten_by_grid() {
    let mut r = common::rng(11);
    for _ in 0..300 {
        let spec = common::scalar_spec(&mut r);
        let rep = solve_stackelberg(&spec).unwrap();
        let (_, best) = grid_search_transmitter(&spec, 2001).unwrap();
        assert!(rep.risk_t <= best + 1e-9, "{spec:?}: {} > {best}", rep.risk_t);
        // The reported rule is the receiver's best response.
        assert_eq!(rep.rule, optimal_receiver_rule(&rep.signals, &spec.receiver, &spec.noise).unwrap());
    }
}

#[test]
fn grid_search_examples() {
    let base = GameSpec::new(
        AgentParams::from_costs(0.25, 0.6, 0.4, 0.4, 0.6).unwrap(),
        AgentParams::from_costs(0.25, 0.0, 0.9, 0.4, 0.0).unwrap(),
        NoiseModel::Scalar { sigma: 0.1 },
        PowerConstraint::Peak { p0: 1.0, p1: 1.0 },
    )
    .unwrap();
    let (d, _) = grid_search_transmitter(&base, 20001).unwrap();
    assert!((d - 0.4704).abs() <= 20.0 / 20000.0 + 5e-5, "{d}");

    let mut r = common::rng(5);
    let team = common::team_spec(&mut r);
    let (d, _) = grid_search_transmitter(&team, 1001).unwrap();
    assert_eq!(d, derived_quantities(&team).unwrap().d_max);
}

#[test]
fn interior_optimum_is_stationary() {
    let mut r = common::rng(12);
    let mut seen = 0;
    while seen < 200 {
        let spec = common::scalar_spec(&mut r);
        let dq = derived_quantities(&spec).unwrap();
        let c = classify(&spec, &dq).unwrap();
        if c.case != 3 {
            continue;
        }
        seen += 1;
        let (k0, k1) = (dq.k0.unwrap(), dq.k1.unwrap());
        let ln = dq.tau.finite().unwrap().ln();
        let d2 = c.d_star * c.d_star;
        let g = k0 * (-ln / d2 + 0.5) + k1 * (ln / d2 + 0.5);
        assert!(g.abs() < 1e-9, "{g}");
    }
}

#[test]
fn case6_rule_matches_endpoint_risks() {
    let mut r = common::rng(13);
    let mut seen = 0;
    while seen < 10_000 {
        let spec = common::scalar_spec(&mut r);
        let dq = derived_quantities(&spec).unwrap();
        let (Some(k0), Some(k1)) = (dq.k0, dq.k1) else { continue };
        let tau = dq.tau.finite().unwrap();
        if dq.log_tau_k_diff().unwrap() < 0.0 || dq.k_sum.unwrap() < 0.0 {
            continue;
        }
        let Ok(e) = case6_expression(k0, k1, tau, dq.d_max) else { continue };
        seen += 1;
        let (r0, _) = follower_risks(&spec, &dq, 0.0).unwrap();
        let (r1, _) = follower_risks(&spec, &dq, dq.d_max).unwrap();
        if e.abs() < 1e-9 || (r0 - r1).abs() < 1e-12 {
            continue;
        }
        assert_eq!(e > 0.0, r1 < r0, "{spec:?}: expr {e}, r(0) {r0}, r(d_max) {r1}");
    }
}

/// Slope of the follower risk curve, by differentiating the two tail
/// probabilities of the likelihood-ratio test.
fn risk_slope(spec: &GameSpec, dq: &DerivedQuantities, d: f64) -> f64 {
    let a = spec.transmitter;
    let z = f64::from(dq.zeta);
    let ln = dq.tau.finite().unwrap().ln();
    let (l, h) = (ln / d, d / 2.0);
    let dp10 = -phi(z * (l + h)) * z * (-ln / (d * d) + 0.5);
    let dp01 = -phi(z * (h - l)) * z * (ln / (d * d) + 0.5);
    a.prior0 * a.delta0() * dp10 + a.prior1 * a.delta1() * dp01
}

/// Consecutive risks strictly decrease whenever the true decrease is
/// resolvable in double precision; elsewhere they may only wobble by
/// rounding, which scales with the cost-weighted summands.
fn check_decreasing(spec: &GameSpec, points: usize) -> std::result::Result<(), String> {
    let dq = derived_quantities(spec).unwrap();
    let step = dq.d_max / (points - 1) as f64;
    let a = spec.transmitter;
    let weight = a.prior0 * (a.c(0, 0) + a.c(1, 0)) + a.prior1 * (a.c(0, 1) + a.c(1, 1));
    let ulps = 16.0 * f64::EPSILON * weight.max(1e-300);
    let mut prev = follower_risks(spec, &dq, 0.0).unwrap().0;
    for i in 1..points {
        let d = if i == points - 1 { dq.d_max } else { step * i as f64 };
        let r = follower_risks(spec, &dq, d).unwrap().0;
        let resolvable = -risk_slope(spec, &dq, d - step / 2.0) * step > 4.0 * ulps;
        if r > prev + ulps || (resolvable && r >= prev) {
            return Err(format!("d = {d}: {prev} -> {r}"));
        }
        prev = r;
    }
    Ok(())
}

#[test]
fn team_risk_decreases_in_d() {
    let mut r = common::rng(14);
    for _ in 0..50 {
        let spec = common::team_spec(&mut r);
        check_decreasing(&spec, 1000).unwrap_or_else(|e| panic!("{spec:?}: {e}"));
        assert_eq!(solve_team(&spec).unwrap().d_star, derived_quantities(&spec).unwrap().d_max);
    }
}

#[test]
fn informative_nash_reports_are_mutual_best_responses() {
    let mut r = common::rng(15);
    let mut informative = 0;
    for _ in 0..500 {
        let spec = common::scalar_spec(&mut r);
        let rep = solve_nash(&spec).unwrap();
        if !rep.informative {
            continue;
        }
        informative += 1;
        let s = best_response_transmitter(&rep.rule, &spec.transmitter, &spec.power).unwrap();
        assert_eq!(s, rep.signals);
        let rule = best_response_receiver(&rep.signals, &spec.receiver, &spec.noise).unwrap();
        assert_eq!(rule, rep.rule);
    }
    assert!(informative > 50);
}

#[test]
fn max_separation_beats_random_feasible_pairs() {
    let mut r = common::rng(16);
    for _ in 0..10 {
        let (b0, b1, p) = (r.random_range(0.05..2.0), r.random_range(0.05..2.0), r.random_range(0.1..5.0));
        let (s0, s1) = max_separation(b0, b1, p).unwrap().as_scalar().unwrap();
        assert!((b0 * s0 * s0 + b1 * s1 * s1 - p).abs() <= 1e-12);
        let best = (s1 - s0).powi(2);
        assert!((best - (b0 + b1) * p / (b0 * b1)).abs() < 1e-12 * best.max(1.0));
        for _ in 0..100_000 {
            let t: f64 = r.random_range(0.0..std::f64::consts::TAU);
            let rad: f64 = r.random_range(0.0f64..1.0).sqrt();
            let (x0, x1) = (rad * (p / b0).sqrt() * t.cos(), rad * (p / b1).sqrt() * t.sin());
            assert!((x1 - x0).powi(2) <= best + 1e-9);
        }
    }
}

fn avg_risk(tx: &AgentParams, rule: &ReceiverRule, p_avg: f64, noise: &NoiseModel, x: f64) -> f64 {
    let (d0, d1) = (tx.delta0(), tx.delta1());
    let a = match rule {
        ReceiverRule::Threshold { direction, .. } => direction[0],
        _ => unreachable!(),
    };
    let s0 = -(a * d0).signum() * x;
    let s1 = (a * d1).signum() * ((p_avg - tx.prior0 * x * x) / tx.prior1).max(0.0).sqrt();
    let (p10, p01) = rule_error_probs(&SignalDesign::scalar(s0, s1), rule, noise).unwrap();
    bayes_risk(tx, p10, p01)
}

#[test]
fn average_best_response_matches_dense_grid() {
    let mut r = common::rng(17);
    for _ in 0..100 {
        let tx = common::agent(&mut r);
        let sign = if r.random_bool(0.5) { 1.0 } else { -1.0 };
        let rule = ReceiverRule::scalar(sign * r.random_range(0.2..3.0), r.random_range(-2.0..2.0)).unwrap();
        let noise = NoiseModel::Scalar { sigma: r.random_range(0.3..2.0) };
        let p_avg = r.random_range(0.2..3.0);
        let (_, x) = nash_avg_best_response(&rule, &tx, p_avg, &noise).unwrap();
        let found = avg_risk(&tx, &rule, p_avg, &noise, x);
        let hi = (p_avg / tx.prior0).sqrt();
        let n = 1_000_000;
        let grid = (0..=n)
            .map(|i| avg_risk(&tx, &rule, p_avg, &noise, hi * i as f64 / n as f64))
            .fold(f64::INFINITY, f64::min);
        assert!(found <= grid + 1e-6 && (found - grid).abs() <= 1e-6, "{found} vs {grid}");
    }
}

#[test]
fn average_nash_fixed_points_resist_deviation() {
    let mut r = common::rng(18);
    let mut checked = 0;
    for _ in 0..40 {
        let tx = common::agent(&mut r);
        let rx = common::lrt_agent(&mut r);
        let p_avg = r.random_range(0.2..3.0);
        let spec = GameSpec::new(
            tx,
            rx,
            NoiseModel::Scalar { sigma: r.random_range(0.3..2.0) },
            PowerConstraint::Average { p_avg },
        )
        .unwrap();
        let rep = solve_nash_avg(&spec).unwrap();
        if !rep.informative {
            continue;
        }
        checked += 1;
        assert!(rep.signals.is_feasible(&spec.power, &tx));
        let hi = (p_avg / tx.prior0).sqrt();
        for i in 0..4097 {
            let x = hi * i as f64 / 4096.0;
            let y = ((p_avg - tx.prior0 * x * x) / tx.prior1).max(0.0).sqrt();
            for (u, v) in [(x, y), (-x, y), (x, -y), (-x, -y)] {
                let (rt, _) = game_risks(&SignalDesign::scalar(u, v), &rep.rule, &spec).unwrap();
                assert!(rep.risk_t <= rt + 1e-9, "transmitter gains {} at ({u}, {v})", rep.risk_t - rt);
            }
        }
        let ReceiverRule::Threshold { direction, threshold } = &rep.rule else { unreachable!() };
        for i in 0..4097 {
            let eta = threshold + 8.0 * (i as f64 / 4096.0 - 0.5);
            for a in [direction[0], -direction[0]] {
                let dev = ReceiverRule::scalar(a, eta).unwrap();
                let (_, rr) = game_risks(&rep.signals, &dev, &spec).unwrap();
                assert!(rep.risk_r <= rr + 1e-12);
            }
        }
    }
    assert!(checked > 5, "{checked}");
}

#[test]
fn monte_carlo_antipodal() {
    let a = AgentParams::from_costs(0.5, 0.0, 1.0, 1.0, 0.0).unwrap();
    let e = sigeq::oracle::mc_estimate(
        &SignalDesign::scalar(-1.0, 1.0),
        &ReceiverRule::scalar(2.0, 0.0).unwrap(),
        &NoiseModel::Scalar { sigma: 1.0 },
        (&a, &a),
        1_000_000,
        2024,
    )
    .unwrap();
    let q = q_function(1.0);
    assert!((e.p10_hat - q).abs() <= 3.0 * e.se_p10);
    assert!((e.p01_hat - q).abs() <= 3.0 * e.se_p01);
}
