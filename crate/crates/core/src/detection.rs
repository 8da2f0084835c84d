//! Shared detection mathematics for the binary Gaussian signaling game.
//!
//! Everything downstream (the three solvers, the oracles, the CLI) is built
//! on the handful of functions here: the Gaussian tail `Q`, the receiver's
//! threshold `tau` and its classification, the conditional error
//! probabilities of a decision rule, and the Bayes risk that weighs them.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::model::{AgentParams, GameSpec, NoiseModel, PowerConstraint, ReceiverRule, SignalDesign};
use crate::vector;

/// Relative tolerance under which the two cross products entering
/// `k0 - k1` and `k0 + k1` are considered equal. The products are
/// computed from the same inputs in different association orders, so an
/// exact zero can come out a few ulps off.
const CROSS_SNAP_REL: f64 = 1e-14;

/// Standard Gaussian tail probability `Q(x) = P(N(0,1) > x)`.
#[inline]
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

#[inline]
pub(crate) fn sgn(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// The receiver's likelihood-ratio threshold on the extended real line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Tau {
    /// `tau <= 0`: the receiver never needs the observation.
    NonPositive,
    Finite(f64),
    /// Zero denominator, nonzero numerator.
    Infinite,
    /// Both numerator and denominator vanish.
    Indifferent,
}

impl Tau {
    pub fn finite(self) -> Option<f64> {
        match self {
            Tau::Finite(t) => Some(t),
            _ => None,
        }
    }

    pub fn is_finite_positive(self) -> bool {
        matches!(self, Tau::Finite(_))
    }
}

pub fn receiver_tau(rx: &AgentParams) -> Tau {
    let num = rx.prior0 * rx.delta0();
    let den = rx.prior1 * rx.delta1();
    if den == 0.0 {
        if num == 0.0 {
            Tau::Indifferent
        } else {
            Tau::Infinite
        }
    } else {
        let t = num / den;
        if t > 0.0 {
            Tau::Finite(t)
        } else {
            Tau::NonPositive
        }
    }
}

/// Classification constants of a game instance.
///
/// `k0`, `k1`, `k_sum`, `k_diff`, `xi0`, `xi1` are present only when the
/// receiver runs a genuine likelihood-ratio test (`0 < tau < inf`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedQuantities {
    pub tau: Tau,
    /// `sgn(C^r_01 - C^r_11)`
    pub zeta: i8,
    pub k0: Option<f64>,
    pub k1: Option<f64>,
    /// `k0 + k1`, from an exactly-signed cross-product form.
    pub k_sum: Option<f64>,
    /// `k0 - k1`, from an exactly-signed cross-product form.
    pub k_diff: Option<f64>,
    pub xi0: Option<f64>,
    pub xi1: Option<f64>,
    /// `sgn(xi0)`, `sgn(xi1)` from input signs only; zero when tau is not finite.
    pub xi0_sign: i8,
    pub xi1_sign: i8,
    /// Effective noise standard deviation along the best signaling direction.
    pub noise_scale: f64,
    pub d_max: f64,
}

impl DerivedQuantities {
    /// `ln(tau) * (k0 - k1)`, if defined.
    pub fn log_tau_k_diff(&self) -> Option<f64> {
        Some(self.tau.finite()?.ln() * self.k_diff?)
    }

    /// `|2 ln(tau) (k0 - k1) / (k0 + k1)|`: the squared interior stationary
    /// point of the transmitter's risk curve. Infinite when `k0 + k1 = 0`
    /// with a nonzero numerator; `None` for `0/0`.
    pub fn interior_d_squared(&self) -> Option<f64> {
        let num = 2.0 * self.log_tau_k_diff()?;
        let den = self.k_sum?;
        if den == 0.0 {
            if num == 0.0 {
                None
            } else {
                Some(f64::INFINITY)
            }
        } else {
            Some((num / den).abs())
        }
    }
}

fn snapped_cross(a: f64, b: f64) -> f64 {
    let diff = a - b;
    if diff.abs() <= CROSS_SNAP_REL * (a.abs() + b.abs()) {
        0.0
    } else {
        diff
    }
}

pub fn derived_quantities(spec: &GameSpec) -> Result<DerivedQuantities> {
    spec.validate()?;
    let tx = &spec.transmitter;
    let rx = &spec.receiver;
    let tau = receiver_tau(rx);
    let zeta = sgn(rx.delta1());

    let (noise_scale, d_max) = separation_limit(spec)?;

    let mut dq = DerivedQuantities {
        tau,
        zeta,
        k0: None,
        k1: None,
        k_sum: None,
        k_diff: None,
        xi0: None,
        xi1: None,
        xi0_sign: 0,
        xi1_sign: 0,
        noise_scale,
        d_max,
    };

    if let Tau::Finite(t) = tau {
        let z = f64::from(zeta);
        let sqrt_tau = t.sqrt();
        dq.k0 = Some(tx.prior0 * z * tx.delta0() / sqrt_tau);
        dq.k1 = Some(tx.prior1 * z * tx.delta1() * sqrt_tau);

        // k0 -+ k1 = zeta (x_t y_r -+ x_r y_t) / (y_r sqrt(tau)) with
        // x = prior0 * delta0 and y = prior1 * delta1 for each agent.
        let (xt, yt) = (tx.prior0 * tx.delta0(), tx.prior1 * tx.delta1());
        let (xr, yr) = (rx.prior0 * rx.delta0(), rx.prior1 * rx.delta1());
        let scale = z / (yr * sqrt_tau);
        dq.k_diff = Some(snapped_cross(xt * yr, xr * yt) * scale);
        dq.k_sum = Some(snapped_cross(xt * yr, -(xr * yt)) * scale);

        dq.xi0 = Some(tx.delta0() / rx.delta0());
        dq.xi1 = Some(tx.delta1() / rx.delta1());
        dq.xi0_sign = sgn(tx.delta0()) * sgn(rx.delta0());
        dq.xi1_sign = sgn(tx.delta1()) * sgn(rx.delta1());
    }
    Ok(dq)
}

/// Returns `(noise_scale, d_max)` for the spec's channel and power budget.
fn separation_limit(spec: &GameSpec) -> Result<(f64, f64)> {
    match (&spec.noise, spec.power) {
        (NoiseModel::Scalar { sigma }, PowerConstraint::Peak { p0, p1 }) => {
            Ok((*sigma, (p0.sqrt() + p1.sqrt()) / sigma))
        }
        (NoiseModel::Covariance(m), PowerConstraint::Peak { p0, p1 }) => {
            let eig = vector::min_eigenpair(m)?;
            let scale = eig.lambda_min.sqrt();
            Ok((scale, (p0.sqrt() + p1.sqrt()) / scale))
        }
        (NoiseModel::Scalar { sigma }, PowerConstraint::Average { p_avg }) => {
            let (b0, b1) = (spec.transmitter.prior0, spec.transmitter.prior1);
            Ok((*sigma, (((b0 + b1) / (b0 * b1)) * p_avg).sqrt() / sigma))
        }
        (NoiseModel::Covariance(_), PowerConstraint::Average { .. }) => {
            Err(Error::Unsupported("average power constraint is only defined for scalar channels".into()))
        }
    }
}

/// The receiver's optimal behaviour as a function of its costs alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ReceiverCase {
    Lrt,
    AlwaysH0,
    AlwaysH1,
    Indifferent,
}

pub fn receiver_case(rx: &AgentParams) -> ReceiverCase {
    use std::cmp::Ordering::*;
    let miss = rx.c(0, 1).partial_cmp(&rx.c(1, 1)).unwrap_or(Equal);
    let false_alarm = rx.c(1, 0).partial_cmp(&rx.c(0, 0)).unwrap_or(Equal);
    match (miss, false_alarm) {
        (Greater, Greater) | (Less, Less) => ReceiverCase::Lrt,
        (Greater, _) => ReceiverCase::AlwaysH1,
        (Equal, Greater) => ReceiverCase::AlwaysH0,
        (Equal, Equal) => ReceiverCase::Indifferent,
        (Equal, Less) => ReceiverCase::AlwaysH1,
        (Less, _) => ReceiverCase::AlwaysH0,
    }
}

/// `(P10, P01)` of the likelihood-ratio test at normalized separation `d`.
pub fn conditional_error_probs(d: f64, tau: f64, zeta: i8) -> Result<(f64, f64)> {
    if d.is_nan() || d <= 0.0 || d.is_infinite() {
        return Err(Error::Precondition(format!("separation must be positive and finite, got {d}")));
    }
    if tau.is_nan() || tau <= 0.0 || tau.is_infinite() {
        return Err(Error::Precondition(format!("tau must lie in (0, inf), got {tau}")));
    }
    if zeta != 1 && zeta != -1 {
        return Err(Error::Precondition(format!("zeta must be +-1, got {zeta}")));
    }
    let z = f64::from(zeta);
    let l = tau.ln() / d;
    let h = d / 2.0;
    Ok((q_function(z * (l + h)), q_function(z * (h - l))))
}

/// Bayes risk of `agent` given the conditional error probabilities.
pub fn bayes_risk(agent: &AgentParams, p10: f64, p01: f64) -> f64 {
    agent.prior0 * agent.c(0, 0)
        + agent.prior1 * agent.c(1, 1)
        + agent.prior0 * agent.delta0() * p10
        + agent.prior1 * agent.delta1() * p01
}

/// Error probabilities of a degenerate (observation-free) rule.
pub fn degenerate_probs(rule: &ReceiverRule) -> Option<(f64, f64)> {
    match rule {
        ReceiverRule::AlwaysH1 => Some((1.0, 0.0)),
        ReceiverRule::AlwaysH0 | ReceiverRule::Indifferent => Some((0.0, 1.0)),
        ReceiverRule::Threshold { .. } => None,
    }
}

/// The rule the receiver uses when the observation carries no information:
/// either its Table-style cost classification, or the prior-only
/// comparison `zeta >= zeta * tau` of its likelihood-ratio test.
pub fn prior_only_rule(rx: &AgentParams) -> ReceiverRule {
    match receiver_case(rx) {
        ReceiverCase::AlwaysH0 => ReceiverRule::AlwaysH0,
        ReceiverCase::AlwaysH1 => ReceiverRule::AlwaysH1,
        ReceiverCase::Indifferent => ReceiverRule::Indifferent,
        ReceiverCase::Lrt => {
            let tau = receiver_tau(rx).finite().expect("LRT case has finite tau");
            prior_only_lrt_rule(tau, sgn(rx.delta1()))
        }
    }
}

pub(crate) fn prior_only_lrt_rule(tau: f64, zeta: i8) -> ReceiverRule {
    let s = f64::from(zeta) * (1.0 - tau);
    if s > 0.0 {
        ReceiverRule::AlwaysH1
    } else if s < 0.0 {
        ReceiverRule::AlwaysH0
    } else {
        ReceiverRule::Indifferent
    }
}

/// The receiver's best response to a signal design.
pub fn optimal_receiver_rule(signals: &SignalDesign, rx: &AgentParams, noise: &NoiseModel) -> Result<ReceiverRule> {
    check_dims(signals, noise)?;
    if receiver_case(rx) != ReceiverCase::Lrt || signals.is_degenerate() {
        return Ok(prior_only_rule(rx));
    }
    let tau = receiver_tau(rx).finite().expect("LRT case has finite tau");
    let z = f64::from(sgn(rx.delta1()));
    let rule = match noise {
        NoiseModel::Scalar { sigma } => {
            let (s0, s1) = signals.as_scalar().expect("dimension checked");
            ReceiverRule::Threshold {
                direction: vec![z * (s1 - s0)],
                threshold: z * (sigma * sigma * tau.ln() + (s1 * s1 - s0 * s0) / 2.0),
            }
        }
        NoiseModel::Covariance(m) => {
            let diff = signals.difference();
            let w = m.cholesky()?.solve(&diff);
            let sum: Vec<f64> = signals.s1.iter().zip(&signals.s0).map(|(a, b)| a + b).collect();
            ReceiverRule::Threshold {
                direction: w.iter().map(|v| z * v).collect(),
                threshold: z * (tau.ln() + 0.5 * linalg::dot(&w, &sum)),
            }
        }
    };
    Ok(rule)
}

/// `(P10, P01)` for an arbitrary rule applied to `Y = S_i + N`.
pub fn rule_error_probs(signals: &SignalDesign, rule: &ReceiverRule, noise: &NoiseModel) -> Result<(f64, f64)> {
    check_dims(signals, noise)?;
    if let Some(p) = degenerate_probs(rule) {
        return Ok(p);
    }
    let ReceiverRule::Threshold { direction, threshold } = rule else { unreachable!() };
    if direction.len() != signals.dim() {
        return Err(Error::DimensionMismatch { expected: signals.dim(), got: direction.len() });
    }
    let spread = match noise {
        NoiseModel::Scalar { sigma } => direction[0].abs() * sigma,
        NoiseModel::Covariance(m) => m.quad_form(direction).sqrt(),
    };
    let m0 = linalg::dot(direction, &signals.s0);
    let m1 = linalg::dot(direction, &signals.s1);
    Ok((q_function((threshold - m0) / spread), q_function((m1 - threshold) / spread)))
}

/// `(r^t, r^r)` for the given strategies.
pub fn game_risks(signals: &SignalDesign, rule: &ReceiverRule, spec: &GameSpec) -> Result<(f64, f64)> {
    let (p10, p01) = rule_error_probs(signals, rule, &spec.noise)?;
    Ok((bayes_risk(&spec.transmitter, p10, p01), bayes_risk(&spec.receiver, p10, p01)))
}

/// Error probabilities when the receiver best-responds to signals at
/// normalized separation `d` (`d = 0` takes the prior-only rule).
pub fn follower_error_probs(d: f64, tau: f64, zeta: i8) -> Result<(f64, f64)> {
    if d == 0.0 {
        let rule = prior_only_lrt_rule(tau, zeta);
        Ok(degenerate_probs(&rule).expect("prior-only rule is degenerate"))
    } else {
        conditional_error_probs(d, tau, zeta)
    }
}

/// `(r^t, r^r)` along the leader-follower risk curve at separation `d`.
pub fn follower_risks(spec: &GameSpec, dq: &DerivedQuantities, d: f64) -> Result<(f64, f64)> {
    let tau = dq.tau.finite().ok_or_else(|| Error::Precondition("risk curve needs 0 < tau < inf".into()))?;
    let (p10, p01) = follower_error_probs(d, tau, dq.zeta)?;
    Ok((bayes_risk(&spec.transmitter, p10, p01), bayes_risk(&spec.receiver, p10, p01)))
}

fn check_dims(signals: &SignalDesign, noise: &NoiseModel) -> Result<()> {
    let n = noise.dim();
    for len in [signals.s0.len(), signals.s1.len()] {
        if len != n {
            return Err(Error::DimensionMismatch { expected: n, got: len });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SymMatrix;

    fn agent(p0: f64, c00: f64, c10: f64, c01: f64, c11: f64) -> AgentParams {
        AgentParams::from_costs(p0, c00, c10, c01, c11).unwrap()
    }

    fn interior_spec() -> GameSpec {
        GameSpec::new(
            agent(0.25, 0.6, 0.4, 0.4, 0.6),
            agent(0.25, 0.0, 0.9, 0.4, 0.0),
            NoiseModel::Scalar { sigma: 0.1 },
            PowerConstraint::Peak { p0: 1.0, p1: 1.0 },
        )
        .unwrap()
    }

    #[test]
    fn q_trivial_values() {
        assert_eq!(q_function(0.0), 0.5);
        assert!(q_function(40.0) < 1e-300);
        assert!((q_function(-40.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn interior_derived_quantities() {
        let dq = derived_quantities(&interior_spec()).unwrap();
        assert!((dq.tau.finite().unwrap() - 0.75).abs() < 1e-15);
        assert_eq!(dq.zeta, 1);
        assert!((dq.k0.unwrap() + 0.057735026918962574).abs() < 1e-12);
        assert!((dq.k1.unwrap() + 0.12990381056766578).abs() < 1e-12);
        assert_eq!(dq.d_max, 20.0);
        // Cross-product forms agree with the direct ones.
        assert!((dq.k_sum.unwrap() - (dq.k0.unwrap() + dq.k1.unwrap())).abs() < 1e-15);
        assert!((dq.k_diff.unwrap() - (dq.k0.unwrap() - dq.k1.unwrap())).abs() < 1e-15);
    }

    #[test]
    fn tau_tags() {
        assert_eq!(receiver_tau(&agent(0.5, 1.0, 1.0, 1.0, 0.0)), Tau::NonPositive);
        assert_eq!(receiver_tau(&agent(0.5, 0.0, 1.0, 1.0, 1.0)), Tau::Infinite);
        assert_eq!(receiver_tau(&agent(0.5, 1.0, 1.0, 1.0, 1.0)), Tau::Indifferent);
        assert_eq!(receiver_tau(&agent(0.5, 0.0, 1.0, 1.0, 0.0)), Tau::Finite(1.0));
        // Both differences negative still give a positive threshold.
        assert_eq!(receiver_tau(&agent(0.5, 1.0, 0.0, 0.0, 1.0)), Tau::Finite(1.0));
    }

    #[test]
    fn identical_agents_have_equal_k() {
        let a = agent(0.3, 0.1, 0.8, 0.7, 0.2);
        let spec =
            GameSpec::new(a, a, NoiseModel::Scalar { sigma: 1.0 }, PowerConstraint::Peak { p0: 1.0, p1: 1.0 }).unwrap();
        let dq = derived_quantities(&spec).unwrap();
        let expect = (0.3f64 * 0.7 * 0.7 * 0.5).sqrt();
        assert!((dq.k0.unwrap() - expect).abs() < 1e-12);
        assert!((dq.k1.unwrap() - expect).abs() < 1e-12);
        assert_eq!(dq.k_diff, Some(0.0));
        assert_eq!(dq.xi0, Some(1.0));
        assert_eq!(dq.xi1, Some(1.0));
    }

    #[test]
    fn table_one() {
        use ReceiverCase::*;
        // rows: C01 vs C11 (>, =, <); columns: C10 vs C00 (>, =, <)
        let grid = [[Lrt, AlwaysH1, AlwaysH1], [AlwaysH0, Indifferent, AlwaysH1], [AlwaysH0, AlwaysH0, Lrt]];
        let offsets = [1.0, 0.0, -1.0];
        for (r, &miss) in offsets.iter().enumerate() {
            for (c, &fa) in offsets.iter().enumerate() {
                let a = agent(0.4, 2.0, 2.0 + fa, 2.0 + miss, 2.0);
                assert_eq!(receiver_case(&a), grid[r][c], "row {r} col {c}");
                assert_eq!(receiver_tau(&a).is_finite_positive(), grid[r][c] == Lrt);
            }
        }
    }

    #[test]
    fn conditional_probs_examples() {
        let (p10, p01) = conditional_error_probs(1.3, 1.0, 1).unwrap();
        assert_eq!(p10, p01);
        assert_eq!(p10, q_function(0.65));

        let (p10, p01) = conditional_error_probs(0.4704, 0.75, 1).unwrap();
        assert!((p10 - 0.6467).abs() < 5e-5);
        assert!((p01 - 0.1986).abs() < 5e-5);

        let (p10, p01) = conditional_error_probs(100.0, 0.75, 1).unwrap();
        assert!(p10 < 1e-100 && p01 < 1e-100);

        assert!(conditional_error_probs(0.0, 0.75, 1).is_err());
        assert!(conditional_error_probs(1.0, 0.0, 1).is_err());
    }

    #[test]
    fn bayes_risk_examples() {
        let tx = agent(0.25, 0.6, 0.4, 0.4, 0.6);
        let (p10, p01) = conditional_error_probs(0.4704, 0.75, 1).unwrap();
        assert!((bayes_risk(&tx, p10, p01) - 0.5379).abs() < 5e-5);
        assert_eq!(bayes_risk(&tx, 0.0, 0.0), 0.25 * 0.6 + 0.75 * 0.6);
        let a = agent(0.3, 0.1, 0.8, 0.7, 0.2);
        assert!((bayes_risk(&a, 1.0, 0.0) - (0.3 * 0.8 + 0.7 * 0.2)).abs() < 1e-15);
        assert!((bayes_risk(&a, 0.0, 1.0) - (0.3 * 0.1 + 0.7 * 0.7)).abs() < 1e-15);
    }

    #[test]
    fn optimal_rule_examples() {
        let rx = agent(0.5, 0.0, 1.0, 1.0, 0.0);
        let noise = NoiseModel::Scalar { sigma: 1.0 };
        let rule = optimal_receiver_rule(&SignalDesign::scalar(-1.0, 1.0), &rx, &noise).unwrap();
        assert_eq!(rule, ReceiverRule::scalar(2.0, 0.0).unwrap());

        let rx75 = agent(0.25, 0.0, 0.9, 0.4, 0.0);
        let rule = optimal_receiver_rule(&SignalDesign::scalar(0.3, 0.3), &rx75, &noise).unwrap();
        assert_eq!(rule, ReceiverRule::AlwaysH1);

        let cov = NoiseModel::Covariance(SymMatrix::diagonal(&[1.0, 4.0]).unwrap());
        let s = SignalDesign { s0: vec![-1.0, 0.0], s1: vec![1.0, 0.0] };
        let rule = optimal_receiver_rule(&s, &rx, &cov).unwrap();
        assert_eq!(rule, ReceiverRule::threshold(vec![2.0, 0.0], 0.0).unwrap());

        // Non-LRT receivers ignore the signals.
        let lazy = agent(0.5, 0.0, 1.0, 0.0, 0.0);
        let rule = optimal_receiver_rule(&SignalDesign::scalar(-1.0, 1.0), &lazy, &noise).unwrap();
        assert_eq!(rule, ReceiverRule::AlwaysH0);
    }

    #[test]
    fn rule_probs_match_lrt_closed_form() {
        let rx = agent(0.25, 0.0, 0.9, 0.4, 0.0);
        let noise = NoiseModel::Scalar { sigma: 0.7 };
        let s = SignalDesign::scalar(-0.4, 0.9);
        let rule = optimal_receiver_rule(&s, &rx, &noise).unwrap();
        let (p10, p01) = rule_error_probs(&s, &rule, &noise).unwrap();
        let d = 1.3 / 0.7;
        let (e10, e01) = conditional_error_probs(d, 0.75, 1).unwrap();
        assert!((p10 - e10).abs() < 1e-13);
        assert!((p01 - e01).abs() < 1e-13);
    }

    #[test]
    fn dimension_mismatch() {
        let rx = agent(0.5, 0.0, 1.0, 1.0, 0.0);
        let cov = NoiseModel::Covariance(SymMatrix::identity(2).unwrap());
        let err = optimal_receiver_rule(&SignalDesign::scalar(-1.0, 1.0), &rx, &cov).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 2, got: 1 });
    }
}
