//! Stackelberg play: the transmitter commits to a separation `d`, the
//! receiver answers with its likelihood-ratio test.
//!
//! With `0 < tau < inf` the transmitter's risk along `d` has the sign of
//! `-(d^2 (k0 + k1) - 2 ln(tau) (k0 - k1))` as its derivative, which gives
//! six cases:
//!
//! | case | `ln(tau)(k0-k1)` | `k0+k1` | `d*` |
//! |------|------------------|---------|------|
//! | 1 | `< 0`  | `>= 0` | `d_max` |
//! | 2 | `< 0`  | `< 0`, `d_max^2 < b` | `d_max` |
//! | 3 | `< 0`  | `< 0`, `d_max^2 >= b` | `sqrt(b)` |
//! | 4 | `>= 0` | `< 0` | 0 |
//! | 5 | `>= 0` | `>= 0`, `d_max^2 < b` | 0 |
//! | 6 | `>= 0` | `>= 0`, `d_max^2 >= b` | endpoint comparison |
//!
//! where `b = |2 ln(tau)(k0 - k1) / (k0 + k1)|`.

use rayon::prelude::*;
use serde::Serialize;

use crate::detection::{self, derived_quantities, q_function, DerivedQuantities};
use crate::error::{Error, Result};
use crate::model::{AgentParams, GameSpec};
use crate::report::{Concept, EquilibriumReport, Existence};
use crate::signals::{self, Separation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Case6Decision {
    InformativeAtDmax,
    NonInformative,
}

/// `(k1 / (k0 tau))^sgn(ln tau) Q(|ln tau|/d_max - d_max/2) - Q(|ln tau|/d_max + d_max/2)`.
///
/// Its sign is the sign of `r^t(0) - r^t(d_max)` whenever the divided-out
/// coefficient (`k0` for `tau > 1`, `k1` for `tau < 1`) is positive; that
/// is the only requirement checked.
pub fn case6_expression(k0: f64, k1: f64, tau: f64, d_max: f64) -> Result<f64> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::Precondition(format!("tau must lie in (0, inf), got {tau}")));
    }
    if !(d_max > 0.0 && d_max.is_finite()) {
        return Err(Error::Precondition(format!("d_max must be positive, got {d_max}")));
    }
    let ln = tau.ln();
    let factor = if ln > 0.0 {
        if k0.is_nan() || k0 <= 0.0 {
            return Err(Error::Precondition(format!("need k0 > 0 when tau > 1, got {k0}")));
        }
        k1 / (k0 * tau)
    } else if ln < 0.0 {
        if k1.is_nan() || k1 <= 0.0 {
            return Err(Error::Precondition(format!("need k1 > 0 when tau < 1, got {k1}")));
        }
        k0 * tau / k1
    } else {
        1.0
    };
    let l = ln.abs() / d_max;
    let h = d_max / 2.0;
    Ok(factor * q_function(l - h) - q_function(l + h))
}

/// Decides case 6; an exact tie goes to the informative endpoint.
pub fn case6_rule(k0: f64, k1: f64, tau: f64, d_max: f64) -> Result<Case6Decision> {
    let e = case6_expression(k0, k1, tau, d_max)?;
    Ok(if e >= 0.0 { Case6Decision::InformativeAtDmax } else { Case6Decision::NonInformative })
}

/// Table cell and separation for a receiver running a likelihood-ratio test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classification {
    pub case: u8,
    pub d_star: f64,
}

pub fn classify(spec: &GameSpec, dq: &DerivedQuantities) -> Result<Classification> {
    let tau = dq.tau.finite().ok_or_else(|| Error::Precondition("classification needs 0 < tau < inf".into()))?;
    let lk = dq.log_tau_k_diff().expect("finite tau");
    let ks = dq.k_sum.expect("finite tau");
    let d_max = dq.d_max;
    let at = |case, d_star| Ok(Classification { case, d_star });

    if lk < 0.0 {
        if ks >= 0.0 {
            return at(1, d_max);
        }
        let b = dq.interior_d_squared().expect("k0 + k1 < 0");
        return if d_max * d_max < b { at(2, d_max) } else { at(3, b.sqrt()) };
    }
    if ks < 0.0 {
        return at(4, 0.0);
    }
    match dq.interior_d_squared() {
        Some(b) if d_max * d_max < b => at(5, 0.0),
        Some(_) => match case6_rule(dq.k0.unwrap(), dq.k1.unwrap(), tau, d_max)? {
            Case6Decision::InformativeAtDmax => at(6, d_max),
            Case6Decision::NonInformative => at(6, 0.0),
        },
        None => {
            // k0 + k1 = 0 and ln(tau)(k0 - k1) = 0: the risk is flat for
            // d > 0, so only a strict gain over d = 0 justifies signaling.
            let (r0, _) = detection::follower_risks(spec, dq, 0.0)?;
            let (r1, _) = detection::follower_risks(spec, dq, d_max)?;
            at(6, if r1 < r0 { d_max } else { 0.0 })
        }
    }
}

pub fn solve_stackelberg(spec: &GameSpec) -> Result<EquilibriumReport> {
    let dq = derived_quantities(spec)?;
    if !dq.tau.is_finite_positive() {
        return EquilibriumReport::build(
            spec,
            Concept::Stackelberg,
            "non-LRT receiver",
            0.0,
            dq.d_max,
            signals::at_separation(spec, &dq, Separation::Zero)?,
            detection::prior_only_rule(&spec.receiver),
            Existence::Exists,
        );
    }
    let c = classify(spec, &dq)?;
    let sep = if c.d_star == 0.0 {
        Separation::Zero
    } else if c.d_star == dq.d_max {
        Separation::Max
    } else {
        Separation::Interior(c.d_star)
    };
    let sig = signals::at_separation(spec, &dq, sep)?;
    let rule = detection::optimal_receiver_rule(&sig, &spec.receiver, &spec.noise)?;
    EquilibriumReport::build(
        spec,
        Concept::Stackelberg,
        format!("case {}", c.case),
        c.d_star,
        dq.d_max,
        sig,
        rule,
        Existence::Exists,
    )
}

/// Transmitter-side perturbation around a team point. The prior shift on
/// `H1` is `-prior0`, so priors keep summing to one.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Perturbation {
    pub prior0: f64,
    pub c00: f64,
    pub c01: f64,
    pub c10: f64,
    pub c11: f64,
}

impl Perturbation {
    /// Shift of the single cost `C_ji`.
    pub fn cost(j: usize, i: usize, eps: f64) -> Self {
        let mut p = Perturbation::default();
        match (j, i) {
            (0, 0) => p.c00 = eps,
            (0, 1) => p.c01 = eps,
            (1, 0) => p.c10 = eps,
            (1, 1) => p.c11 = eps,
            _ => panic!("cost index out of range: ({j}, {i})"),
        }
        p
    }

    pub fn norm_inf(&self) -> f64 {
        [self.prior0, self.c00, self.c01, self.c10, self.c11].iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn apply(&self, base: &AgentParams) -> Result<AgentParams> {
        AgentParams::new(
            base.prior0 + self.prior0,
            base.prior1 - self.prior0,
            [[base.c(0, 0) + self.c00, base.c(0, 1) + self.c01], [base.c(1, 0) + self.c10, base.c(1, 1) + self.c11]],
        )
    }
}

/// Zero plus `+-eps` on each of the four costs.
pub fn single_cost_grid(eps: f64) -> Vec<Perturbation> {
    let mut grid = vec![Perturbation::default()];
    for (j, i) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        grid.push(Perturbation::cost(j, i, -eps));
        grid.push(Perturbation::cost(j, i, eps));
    }
    grid
}

#[derive(Debug, Clone)]
pub struct ScanEntry {
    pub epsilon: Perturbation,
    pub outcome: Result<EquilibriumReport>,
}

#[derive(Debug, Clone)]
pub struct StackelbergScan {
    pub entries: Vec<ScanEntry>,
    /// Some two valid entries with `|eps|_inf <= delta` disagree on
    /// informativeness.
    pub discontinuity: bool,
}

pub(crate) fn check_team_point(base: &GameSpec) -> Result<()> {
    if !base.identical_agents() {
        return Err(Error::MismatchedAgents);
    }
    if !detection::receiver_tau(&base.receiver).is_finite_positive() {
        return Err(Error::Precondition("scan base needs 0 < tau < inf".into()));
    }
    Ok(())
}

pub(crate) fn scan<F>(base: &GameSpec, grid: &[Perturbation], solve: F) -> Vec<ScanEntry>
where
    F: Fn(&GameSpec) -> Result<EquilibriumReport> + Sync,
{
    grid.par_iter()
        .map(|eps| {
            let outcome = eps.apply(&base.transmitter).map_err(|e| e.within("transmitter")).and_then(|tx| {
                let mut spec = base.clone();
                spec.transmitter = tx;
                solve(&spec)
            });
            ScanEntry { epsilon: *eps, outcome }
        })
        .collect()
}

pub fn robustness_scan_stackelberg(base: &GameSpec, grid: &[Perturbation], delta: f64) -> Result<StackelbergScan> {
    check_team_point(base)?;
    let entries = scan(base, grid, solve_stackelberg);
    let mut seen = entries
        .iter()
        .filter(|e| e.epsilon.norm_inf() <= delta)
        .filter_map(|e| e.outcome.as_ref().ok().map(|r| r.informative));
    let discontinuity = match seen.next() {
        Some(first) => seen.any(|v| v != first),
        None => false,
    };
    Ok(StackelbergScan { entries, discontinuity })
}
