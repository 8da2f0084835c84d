//! One-parameter sweeps over a configured game.

use std::str::FromStr;

use rayon::prelude::*;

use crate::config::{Config, PresetConfig};
use crate::detection::{self, derived_quantities};
use crate::error::{Error, Result};
use crate::model::{AgentParams, GameSpec, NoiseModel, PowerConstraint};
use crate::report::{fmt_f64, Concept};
use crate::stackelberg::Perturbation;

/// A sweepable scalar.
///
/// `D` bypasses the solvers and walks the transmitter's risk curve along
/// the separation `d`. `Eps*` shift one transmitter coordinate of the
/// configured game, the rest overwrite a field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    D,
    Alpha,
    Pi0,
    Pi0T,
    Pi0R,
    Cost { agent: Agent, decision: usize, truth: usize },
    Eps { decision: usize, truth: usize },
    EpsPi0,
    Sigma,
    P0,
    P1,
    PAvg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Agent {
    Transmitter,
    Receiver,
}

pub const PARAM_NAMES: &str = "d, alpha, pi0, pi0_t, pi0_r, c00_t, c10_t, c01_t, c11_t, c00_r, c10_r, c01_r, c11_r, \
     eps00, eps10, eps01, eps11, eps_pi0, sigma, p0, p1, p_avg";

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let idx = |c: u8| usize::from(c - b'0');
        let b = s.as_bytes();
        let p = match s {
            "d" => SweepParam::D,
            "alpha" => SweepParam::Alpha,
            "pi0" => SweepParam::Pi0,
            "pi0_t" => SweepParam::Pi0T,
            "pi0_r" => SweepParam::Pi0R,
            "eps_pi0" => SweepParam::EpsPi0,
            "sigma" => SweepParam::Sigma,
            "p0" => SweepParam::P0,
            "p1" => SweepParam::P1,
            "p_avg" => SweepParam::PAvg,
            _ if b.len() == 5
                && b[0] == b'c'
                && b[1..3].iter().all(|c| matches!(c, b'0' | b'1'))
                && (s.ends_with("_t") || s.ends_with("_r")) =>
            {
                SweepParam::Cost {
                    agent: if s.ends_with("_t") { Agent::Transmitter } else { Agent::Receiver },
                    decision: idx(b[1]),
                    truth: idx(b[2]),
                }
            }
            _ if b.len() == 5 && s.starts_with("eps") && b[3..].iter().all(|c| matches!(c, b'0' | b'1')) => {
                SweepParam::Eps { decision: idx(b[3]), truth: idx(b[4]) }
            }
            _ => return Err(Error::Config(format!("unknown sweep parameter `{s}`; expected one of: {PARAM_NAMES}"))),
        };
        Ok(p)
    }
}

/// `steps` evenly spaced values from `min` to `max` inclusive.
pub fn linspace(min: f64, max: f64, steps: usize) -> Result<Vec<f64>> {
    if !(min.is_finite() && max.is_finite()) {
        return Err(Error::Config("sweep range must be finite".into()));
    }
    match steps {
        0 => Err(Error::Config("need at least one sweep step".into())),
        1 => Ok(vec![min]),
        n => {
            let h = (max - min) / (n - 1) as f64;
            Ok((0..n).map(|i| if i == n - 1 { max } else { min + h * i as f64 }).collect())
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    /// `None` when the swept value makes the game invalid.
    pub result: Option<SweepPoint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub d_star: f64,
    pub risk_t: f64,
    pub risk_r: f64,
    pub informative: bool,
    pub case: String,
}

impl SweepRow {
    pub fn csv_header() -> &'static str {
        "value,d_star,risk_t,risk_r,informative,case"
    }

    pub fn csv_row(&self) -> String {
        match &self.result {
            Some(p) => format!(
                "{},{},{},{},{},{}",
                fmt_f64(self.value),
                fmt_f64(p.d_star),
                fmt_f64(p.risk_t),
                fmt_f64(p.risk_r),
                p.informative,
                p.case
            ),
            None => format!("{},nan,nan,nan,false,invalid", fmt_f64(self.value)),
        }
    }
}

fn set_prior(a: &mut AgentParams, v: f64) {
    a.prior0 = v;
    a.prior1 = 1.0 - v;
}

fn preset_override(config: &Config, param: SweepParam, v: f64) -> Option<Config> {
    let mut c = config.clone();
    let preset = c.preset.as_mut()?;
    match (preset, param) {
        (PresetConfig::BiasedCost { alpha, .. }, SweepParam::Alpha) => *alpha = v,
        (PresetConfig::BiasedCost { pi0, .. } | PresetConfig::Deception { pi0 }, SweepParam::Pi0) => *pi0 = v,
        (PresetConfig::SubjectivePriors { pi0_t, .. }, SweepParam::Pi0T) => *pi0_t = v,
        (PresetConfig::SubjectivePriors { pi0_r, .. }, SweepParam::Pi0R) => *pi0_r = v,
        _ => return None,
    }
    Some(c)
}

/// The configured game with `param` set to `v`.
pub fn apply_param(config: &Config, param: SweepParam, v: f64) -> Result<GameSpec> {
    if let Some(c) = preset_override(config, param, v) {
        return c.build();
    }
    let mut spec = config.build()?;
    match param {
        SweepParam::D => {}
        SweepParam::Alpha => {
            return Err(Error::Config("`alpha` needs the biased_cost preset".into()));
        }
        SweepParam::Pi0 => {
            set_prior(&mut spec.transmitter, v);
            set_prior(&mut spec.receiver, v);
        }
        SweepParam::Pi0T => set_prior(&mut spec.transmitter, v),
        SweepParam::Pi0R => set_prior(&mut spec.receiver, v),
        SweepParam::Cost { agent, decision, truth } => {
            let a = match agent {
                Agent::Transmitter => &mut spec.transmitter,
                Agent::Receiver => &mut spec.receiver,
            };
            a.cost[decision][truth] = v;
        }
        SweepParam::Eps { decision, truth } => {
            spec.transmitter =
                Perturbation::cost(decision, truth, v).apply(&spec.transmitter).map_err(|e| e.within("transmitter"))?;
        }
        SweepParam::EpsPi0 => {
            let p = Perturbation { prior0: v, ..Default::default() };
            spec.transmitter = p.apply(&spec.transmitter).map_err(|e| e.within("transmitter"))?;
        }
        SweepParam::Sigma => match &mut spec.noise {
            NoiseModel::Scalar { sigma } => *sigma = v,
            NoiseModel::Covariance(_) => {
                return Err(Error::Config("`sigma` needs a scalar channel".into()));
            }
        },
        SweepParam::P0 | SweepParam::P1 => match &mut spec.power {
            PowerConstraint::Peak { p0, p1 } => *(if param == SweepParam::P0 { p0 } else { p1 }) = v,
            PowerConstraint::Average { .. } => {
                return Err(Error::Config("`p0`/`p1` need a peak power constraint".into()));
            }
        },
        SweepParam::PAvg => match &mut spec.power {
            PowerConstraint::Average { p_avg } => *p_avg = v,
            PowerConstraint::Peak { .. } => {
                return Err(Error::Config("`p_avg` needs an average power constraint".into()));
            }
        },
    }
    spec.validate()?;
    Ok(spec)
}

/// Runs the sweep. Values that make the game invalid produce empty rows;
/// a parameter that does not fit the configuration is an error.
pub fn sweep(config: &Config, param: SweepParam, values: &[f64], concept: Concept) -> Result<Vec<SweepRow>> {
    let base = config.build()?;
    if param == SweepParam::D {
        return risk_curve(&base, values);
    }
    // Surface structural mismatches once instead of per row.
    if let Err(e @ Error::Config(_)) = apply_param(config, param, values.first().copied().unwrap_or(0.0)) {
        return Err(e);
    }
    Ok(values
        .par_iter()
        .map(|&v| SweepRow {
            value: v,
            result: apply_param(config, param, v).and_then(|spec| crate::solve(&spec, concept)).ok().map(|r| {
                SweepPoint {
                    d_star: r.d_star,
                    risk_t: r.risk_t,
                    risk_r: r.risk_r,
                    informative: r.informative,
                    case: r.case_label,
                }
            }),
        })
        .collect())
}

/// Risks along the follower curve: the transmitter fixes `d`, the receiver
/// answers with its likelihood-ratio test.
fn risk_curve(spec: &GameSpec, values: &[f64]) -> Result<Vec<SweepRow>> {
    let dq = derived_quantities(spec)?;
    if !dq.tau.is_finite_positive() {
        return Err(Error::Precondition("the risk curve needs 0 < tau < inf".into()));
    }
    Ok(values
        .iter()
        .map(|&d| SweepRow {
            value: d,
            result: (d >= 0.0).then(|| detection::follower_risks(spec, &dq, d).ok()).flatten().map(
                |(risk_t, risk_r)| SweepPoint { d_star: d, risk_t, risk_r, informative: d > 0.0, case: "curve".into() },
            ),
        })
        .collect())
}
