//! Nash play: simultaneous best responses within the single-threshold
//! family of receiver rules.

use serde::Serialize;

use crate::avg_power;
use crate::detection::{self, derived_quantities, sgn, DerivedQuantities};
use crate::error::{Error, Result};
use crate::linalg;
use crate::model::{AgentParams, GameSpec, NoiseModel, PowerConstraint, ReceiverRule, SignalDesign};
use crate::report::{self, fmt_f64, Concept, EquilibriumReport, Existence};
use crate::signals;
use crate::stackelberg::{self, Perturbation, ScanEntry};

/// Rule and signal iterates closer than this are considered equal.
pub const DYNAMICS_TOL: f64 = 1e-12;
pub const MIN_DYNAMICS_ITER: usize = 4;

/// Transmitter best response to a rule under peak power: push each signal
/// to full power along `+-a/|a|`, in the direction that lowers the
/// transmitter's own risk. Zero cost differences leave that signal at 0;
/// degenerate rules get `(0, 0)`.
pub fn best_response_transmitter(
    rule: &ReceiverRule,
    tx: &AgentParams,
    power: &PowerConstraint,
) -> Result<SignalDesign> {
    let PowerConstraint::Peak { p0, p1 } = *power else {
        return Err(Error::Unsupported("peak-power best response called with an average constraint".into()));
    };
    let ReceiverRule::Threshold { direction, .. } = rule else {
        return Ok(SignalDesign::zeros(rule_dim(rule)));
    };
    let n = linalg::norm(direction);
    let unit: Vec<f64> = direction.iter().map(|v| v / n).collect();
    let c0 = f64::from(-sgn(tx.delta0())) * p0.sqrt();
    let c1 = f64::from(sgn(tx.delta1())) * p1.sqrt();
    Ok(SignalDesign::along(&unit, c0, c1))
}

fn rule_dim(rule: &ReceiverRule) -> usize {
    match rule {
        ReceiverRule::Threshold { direction, .. } => direction.len(),
        _ => 1,
    }
}

pub fn best_response_receiver(signals: &SignalDesign, rx: &AgentParams, noise: &NoiseModel) -> Result<ReceiverRule> {
    detection::optimal_receiver_rule(signals, rx, noise)
}

/// Threshold `eta = zeta (tau - 1)` of the babbling rule `0 * y >= eta`.
pub fn babbling_threshold(dq: &DerivedQuantities) -> Option<f64> {
    Some(f64::from(dq.zeta) * (dq.tau.finite()? - 1.0))
}

fn transmitter_response(spec: &GameSpec, rule: &ReceiverRule) -> Result<SignalDesign> {
    match spec.power {
        PowerConstraint::Peak { .. } => {
            let mut s = best_response_transmitter(rule, &spec.transmitter, &spec.power)?;
            if s.dim() != spec.dimension {
                s = SignalDesign::zeros(spec.dimension);
            }
            Ok(s)
        }
        PowerConstraint::Average { p_avg } => {
            Ok(avg_power::nash_avg_best_response(rule, &spec.transmitter, p_avg, &spec.noise)?.0)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DynamicsOutcome {
    Converged { step: usize },
    Oscillating { period: usize },
    Exhausted,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DynamicsTrace {
    pub init_rule: ReceiverRule,
    /// `(S_k, rule_k)` for `k = 1, 2, ...` with `S_k` the transmitter's
    /// answer to `rule_{k-1}` and `rule_k` the receiver's answer to `S_k`.
    pub iterates: Vec<(SignalDesign, ReceiverRule)>,
    pub outcome: DynamicsOutcome,
}

impl DynamicsTrace {
    /// Converged to a pair whose rule uses the observation.
    pub fn is_informative(&self) -> bool {
        matches!(self.outcome, DynamicsOutcome::Converged { .. })
            && self.iterates.last().is_some_and(|(_, r)| r.is_threshold())
    }

    pub fn csv_header() -> &'static str {
        "step,s0,s1,rule,direction,threshold"
    }

    /// One row per iterate `k = 1, 2, ...`.
    pub fn csv_rows(&self) -> Vec<String> {
        self.iterates
            .iter()
            .enumerate()
            .map(|(k, (s, r))| {
                let (dir, eta) = match r {
                    ReceiverRule::Threshold { direction, threshold } => (report::join(direction), fmt_f64(*threshold)),
                    _ => (String::new(), String::new()),
                };
                format!("{},{},{},{},{dir},{eta}", k + 1, report::join(&s.s0), report::join(&s.s1), r.label())
            })
            .collect()
    }

    /// `converged step=N`, `oscillating period=P` or `exhausted`.
    pub fn outcome_line(&self) -> String {
        match self.outcome {
            DynamicsOutcome::Converged { step } => format!("converged step={step}"),
            DynamicsOutcome::Oscillating { period } => format!("oscillating period={period}"),
            DynamicsOutcome::Exhausted => "exhausted".into(),
        }
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= DYNAMICS_TOL * a.abs().max(b.abs()).max(1.0)
}

pub(crate) fn rules_close(a: &ReceiverRule, b: &ReceiverRule) -> bool {
    match (a, b) {
        (
            ReceiverRule::Threshold { direction: da, threshold: ta },
            ReceiverRule::Threshold { direction: db, threshold: tb },
        ) => da.len() == db.len() && da.iter().zip(db).all(|(x, y)| close(*x, *y)) && close(*ta, *tb),
        _ => a == b,
    }
}

/// Alternating best responses starting from the receiver rule `init_rule`.
pub fn best_response_dynamics(spec: &GameSpec, init_rule: &ReceiverRule, max_iter: usize) -> Result<DynamicsTrace> {
    let dq = derived_quantities(spec)?;
    if !dq.tau.is_finite_positive() {
        return Err(Error::Precondition("dynamics need 0 < tau < inf".into()));
    }
    match init_rule {
        ReceiverRule::Threshold { direction, .. } if direction.len() == spec.dimension => {}
        ReceiverRule::Threshold { direction, .. } => {
            return Err(Error::DimensionMismatch { expected: spec.dimension, got: direction.len() })
        }
        _ => return Err(Error::Precondition("initial rule must be a threshold rule with a != 0".into())),
    }
    if max_iter < MIN_DYNAMICS_ITER {
        return Err(Error::Precondition(format!("max_iter must be at least {MIN_DYNAMICS_ITER}, got {max_iter}")));
    }

    let mut rules = vec![init_rule.clone()];
    let mut iterates = Vec::new();
    let mut outcome = DynamicsOutcome::Exhausted;
    for k in 1..=max_iter {
        let s = transmitter_response(spec, &rules[k - 1])?;
        let r = best_response_receiver(&s, &spec.receiver, &spec.noise)?;
        iterates.push((s, r.clone()));
        rules.push(r);
        if rules_close(&rules[k], &rules[k - 1]) {
            outcome = DynamicsOutcome::Converged { step: k };
            break;
        }
        if k >= 2 && rules_close(&rules[k], &rules[k - 2]) {
            outcome = DynamicsOutcome::Oscillating { period: 2 };
            break;
        }
    }
    Ok(DynamicsTrace { init_rule: init_rule.clone(), iterates, outcome })
}

/// Default starting rule: `a` along the signaling direction, `eta = 0`.
pub fn default_init_rule(spec: &GameSpec) -> Result<ReceiverRule> {
    ReceiverRule::threshold(signals::direction(spec)?, 0.0)
}

pub(crate) fn sign_label(s: i8) -> &'static str {
    match s {
        1 => ">0",
        -1 => "<0",
        _ => "=0",
    }
}

pub fn solve_nash(spec: &GameSpec) -> Result<EquilibriumReport> {
    if let PowerConstraint::Average { .. } = spec.power {
        return avg_power::solve_nash_avg(spec);
    }
    let dq = derived_quantities(spec)?;
    if !dq.tau.is_finite_positive() {
        return babbling_report(spec, &dq, "non-LRT receiver", Existence::Exists);
    }
    let PowerConstraint::Peak { p0, p1 } = spec.power else { unreachable!() };
    let (x0, x1) = (dq.xi0_sign, dq.xi1_sign);
    let mut label = format!("xi0{} xi1{}", sign_label(x0), sign_label(x1));
    if x0 * x1 < 0 {
        let cmp = if p0 > p1 {
            ">"
        } else if p0 < p1 {
            "<"
        } else {
            "="
        };
        label.push_str(&format!(" P0{cmp}P1"));
    }
    if x0 == 0 || x1 == 0 {
        return babbling_report(spec, &dq, &label, Existence::Exists);
    }
    let consistent =
        if p0 == p1 { x0 > 0 && x1 > 0 } else { f64::from(x1) * p1.sqrt() + f64::from(x0) * p0.sqrt() > 0.0 };
    if !consistent {
        return babbling_report(spec, &dq, &label, Existence::OnlyDegenerate);
    }
    let init = default_init_rule(spec)?;
    let sig = transmitter_response(spec, &init)?;
    let rule = best_response_receiver(&sig, &spec.receiver, &spec.noise)?;
    // Signals lie along the signaling direction, so d is the gap of the
    // two coefficients over the noise scale in that direction.
    let c0 = f64::from(-sgn(spec.transmitter.delta0())) * p0.sqrt();
    let c1 = f64::from(sgn(spec.transmitter.delta1())) * p1.sqrt();
    let d = (c1 - c0).abs() / dq.noise_scale;
    Ok(EquilibriumReport::build(spec, Concept::Nash, label, d, dq.d_max, sig, rule, Existence::Exists)?
        .note("the sign-flipped pair (-S0, -S1, -a, eta) is essentially equivalent"))
}

pub(crate) fn babbling_report(
    spec: &GameSpec,
    dq: &DerivedQuantities,
    label: &str,
    existence: Existence,
) -> Result<EquilibriumReport> {
    let mut r = EquilibriumReport::build(
        spec,
        Concept::Nash,
        label,
        0.0,
        dq.d_max,
        SignalDesign::zeros(spec.dimension),
        detection::prior_only_rule(&spec.receiver),
        existence,
    )?;
    if let Some(eta) = babbling_threshold(dq) {
        r = r.note(format!("babbling rule: a = 0, eta = zeta (tau - 1) = {eta}"));
    }
    Ok(r)
}

#[derive(Debug, Clone)]
pub struct NashScan {
    pub entries: Vec<ScanEntry>,
    /// Every valid entry inside the sign-preserving cost bounds matches the
    /// unperturbed report in signals, rule and informativeness.
    pub continuous: bool,
}

pub fn robustness_scan_nash(base: &GameSpec, grid: &[Perturbation]) -> Result<NashScan> {
    stackelberg::check_team_point(base)?;
    let reference = solve_nash(base)?;
    let entries = stackelberg::scan(base, grid, solve_nash);
    let rx = &base.receiver;
    let continuous = entries
        .iter()
        .filter(|e| {
            (e.epsilon.c10 - e.epsilon.c00).abs() < rx.delta0().abs()
                && (e.epsilon.c01 - e.epsilon.c11).abs() < rx.delta1().abs()
        })
        .filter_map(|e| e.outcome.as_ref().ok())
        .all(|r| r.signals == reference.signals && r.rule == reference.rule && r.informative == reference.informative);
    Ok(NashScan { entries, continuous })
}
