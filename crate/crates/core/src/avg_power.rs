//! Average power budget `pi0^t |S0|^2 + pi1^t |S1|^2 <= P_avg` on a scalar
//! channel.

use crate::detection::{self, derived_quantities, sgn};
use crate::error::{Error, Result};
use crate::model::{AgentParams, GameSpec, NoiseModel, PowerConstraint, ReceiverRule, SignalDesign};
use crate::nash::{self, best_response_receiver, default_init_rule};
use crate::optimize;
use crate::report::{Concept, EquilibriumReport, Existence};

pub const NASH_GRID_POINTS: usize = 4097;
pub const NASH_X_TOL: f64 = 1e-10;
pub const NASH_MAX_ROUNDS: usize = 64;
/// Signal iterates closer than this, relative to `sqrt(P_avg / min prior)`,
/// count as a fixed point. The minimizer of a smooth risk is only located
/// to about the square root of machine precision, so tighter is noise.
pub const NASH_SIGNAL_RTOL: f64 = 1e-7;

/// `(S0, S1)` maximizing `(S1 - S0)^2` subject to `b0 S0^2 + b1 S1^2 = p`.
pub(crate) fn max_separation_pair(b0: f64, b1: f64, p: f64) -> (f64, f64) {
    let s = b0 + b1;
    (-(b1 * p / (b0 * s)).sqrt(), (b0 * p / (b1 * s)).sqrt())
}

/// Maximum-separation pair under `b0 S0^2 + b1 S1^2 <= p`; the squared
/// separation is `(b0 + b1) p / (b0 b1)`.
pub fn max_separation(beta0: f64, beta1: f64, p: f64) -> Result<SignalDesign> {
    for (name, v) in [("beta0", beta0), ("beta1", beta1), ("P", p)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::param(name, format!("must be positive and finite, got {v}")));
        }
    }
    let (s0, s1) = max_separation_pair(beta0, beta1, p);
    Ok(SignalDesign::scalar(s0, s1))
}

fn require_scalar_average(spec: &GameSpec) -> Result<f64> {
    match (&spec.noise, spec.power) {
        (NoiseModel::Scalar { .. }, PowerConstraint::Average { p_avg }) => Ok(p_avg),
        (NoiseModel::Covariance(_), _) => {
            Err(Error::Unsupported("average power constraint is only defined for scalar channels".into()))
        }
        (_, PowerConstraint::Peak { .. }) => Err(Error::Precondition("spec has a peak power constraint".into())),
    }
}

pub fn solve_team_avg(spec: &GameSpec) -> Result<EquilibriumReport> {
    require_scalar_average(spec)?;
    crate::team::solve_team(spec)
}

pub fn solve_stackelberg_avg(spec: &GameSpec) -> Result<EquilibriumReport> {
    require_scalar_average(spec)?;
    crate::stackelberg::solve_stackelberg(spec)
}

/// Transmitter best response to `rule` under the average budget, with the
/// magnitude `x* = |S0|` that minimizes its risk. `S1` takes the remaining
/// budget. Degenerate rules and fully indifferent transmitters send zeros.
pub fn nash_avg_best_response(
    rule: &ReceiverRule,
    tx: &AgentParams,
    p_avg: f64,
    noise: &NoiseModel,
) -> Result<(SignalDesign, f64)> {
    if !matches!(noise, NoiseModel::Scalar { .. }) {
        return Err(Error::Unsupported("average power constraint is only defined for scalar channels".into()));
    }
    let ReceiverRule::Threshold { direction, .. } = rule else {
        return Ok((SignalDesign::zeros(1), 0.0));
    };
    if direction.len() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: direction.len() });
    }
    let a = direction[0];
    let (d0, d1) = (tx.delta0(), tx.delta1());
    let (g0, g1) = (-f64::from(sgn(a * d0)), f64::from(sgn(a * d1)));
    match (d0 == 0.0, d1 == 0.0) {
        (true, true) => return Ok((SignalDesign::zeros(1), 0.0)),
        (true, false) => {
            return Ok((SignalDesign::scalar(0.0, g1 * (p_avg / tx.prior1).sqrt()), 0.0));
        }
        (false, true) => {
            let x = (p_avg / tx.prior0).sqrt();
            return Ok((SignalDesign::scalar(g0 * x, 0.0), x));
        }
        (false, false) => {}
    }
    let pair = |x: f64| {
        let rest = ((p_avg - tx.prior0 * x * x) / tx.prior1).max(0.0);
        SignalDesign::scalar(g0 * x, g1 * rest.sqrt())
    };
    let risk = |x: f64| {
        let (p10, p01) = detection::rule_error_probs(&pair(x), rule, noise).expect("scalar rule");
        detection::bayes_risk(tx, p10, p01)
    };
    let x_hi = (p_avg / tx.prior0).sqrt();
    let (x, _) = optimize::grid_then_golden(risk, 0.0, x_hi, NASH_GRID_POINTS, NASH_X_TOL);
    Ok((pair(x), x))
}

/// Iterated best responses from `a = 1, eta = 0`, then classification by
/// the signs of `xi0`, `xi1`. A pair whose signal gap keeps the sign of
/// `a` is a fixed point; with mixed signs this holds iff `x* < sqrt(P_avg)`.
pub fn solve_nash_avg(spec: &GameSpec) -> Result<EquilibriumReport> {
    let p_avg = require_scalar_average(spec)?;
    let dq = derived_quantities(spec)?;
    let sigma = spec.scalar_sigma().expect("scalar channel");
    if !dq.tau.is_finite_positive() {
        return nash::babbling_report(spec, &dq, "non-LRT receiver", Existence::Exists);
    }
    let (x0, x1) = (dq.xi0_sign, dq.xi1_sign);
    let label = format!("xi0{} xi1{}", nash::sign_label(x0), nash::sign_label(x1));
    if x0 == 0 && x1 == 0 {
        return nash::babbling_report(spec, &dq, &label, Existence::Exists);
    }

    let tx = &spec.transmitter;
    let tol = NASH_SIGNAL_RTOL * (p_avg / tx.prior0.min(tx.prior1)).sqrt();
    let mut rule = default_init_rule(spec)?;
    let mut history: Vec<SignalDesign> = Vec::new();
    let mut last_x = 0.0;
    let mut settled = false;
    for _ in 0..NASH_MAX_ROUNDS {
        let (s, x) = nash_avg_best_response(&rule, &spec.transmitter, p_avg, &spec.noise)?;
        rule = best_response_receiver(&s, &spec.receiver, &spec.noise)?;
        last_x = x;
        let n = history.len();
        let repeat = |k: usize| n >= k && history[n - k].max_abs_diff(&s) <= tol;
        if repeat(1) {
            settled = true;
            history.push(s);
            break;
        }
        let cycle = repeat(2);
        history.push(s);
        if cycle {
            break;
        }
    }
    let s = history.last().expect("at least one round").clone();

    if settled && rule.is_threshold() {
        let (a, b) = s.as_scalar().expect("scalar");
        return Ok(EquilibriumReport::build(
            spec,
            Concept::Nash,
            label,
            (b - a).abs() / sigma,
            dq.d_max,
            s,
            rule,
            Existence::Exists,
        )?
        .note(format!("x* = {last_x}")));
    }
    let boundary = x0 * x1 < 0 && (last_x - p_avg.sqrt()).abs() <= tol;
    let existence = if boundary { Existence::Exists } else { Existence::OnlyDegenerate };
    Ok(nash::babbling_report(spec, &dq, &label, existence)?.note(format!("x* = {last_x}")))
}
