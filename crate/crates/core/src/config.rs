//! JSON game configuration.
//!
//! ```json
//! {
//!   "transmitter": { "prior0": 0.25, "costs": { "c00": 0.6, "c10": 0.4, "c01": 0.4, "c11": 0.6 } },
//!   "receiver":    { "prior0": 0.25, "costs": { "c00": 0.0, "c10": 0.9, "c01": 0.4, "c11": 0.0 } },
//!   "noise": { "sigma": 0.1 },
//!   "power": { "peak": { "p0": 1.0, "p1": 1.0 } }
//! }
//! ```
//!
//! Instead of the two agents a `preset` object may be given, e.g.
//! `{"name": "biased_cost", "alpha": 0.75, "pi0": 0.5}`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::SymMatrix;
use crate::model::{AgentParams, GameSpec, NoiseModel, PowerConstraint};
use crate::presets::{self, Costs};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostsConfig {
    pub c00: f64,
    pub c10: f64,
    pub c01: f64,
    pub c11: f64,
}

impl From<CostsConfig> for Costs {
    fn from(c: CostsConfig) -> Self {
        Costs { c00: c.c00, c10: c.c10, c01: c.c01, c11: c.c11 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentConfig {
    pub prior0: f64,
    /// Defaults to `1 - prior0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prior1: Option<f64>,
    pub costs: CostsConfig,
}

impl AgentConfig {
    fn build(&self) -> Result<AgentParams> {
        let c = self.costs;
        AgentParams::new(self.prior0, self.prior1.unwrap_or(1.0 - self.prior0), [[c.c00, c.c01], [c.c10, c.c11]])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum NoiseConfig {
    Sigma(f64),
    Covariance(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PowerConfig {
    Peak { p0: f64, p1: f64 },
    Average { p_avg: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum PresetConfig {
    SubjectivePriors { pi0_t: f64, pi0_r: f64, costs: CostsConfig },
    BiasedCost { alpha: f64, pi0: f64 },
    Deception { pi0: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transmitter: Option<AgentConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub receiver: Option<AgentConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<PresetConfig>,
    pub noise: NoiseConfig,
    pub power: PowerConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn noise_model(&self) -> Result<NoiseModel> {
        let noise = match &self.noise {
            NoiseConfig::Sigma(s) => NoiseModel::scalar(*s),
            NoiseConfig::Covariance(rows) => NoiseModel::covariance(SymMatrix::from_rows(rows.clone())?),
        };
        noise.map_err(|e| e.within("noise"))
    }

    pub fn power_constraint(&self) -> PowerConstraint {
        match self.power {
            PowerConfig::Peak { p0, p1 } => PowerConstraint::Peak { p0, p1 },
            PowerConfig::Average { p_avg } => PowerConstraint::Average { p_avg },
        }
    }

    /// Builds and validates the game.
    pub fn build(&self) -> Result<GameSpec> {
        let noise = self.noise_model()?;
        let power = self.power_constraint();
        let spec = match (&self.preset, &self.transmitter, &self.receiver) {
            (Some(p), None, None) => match *p {
                PresetConfig::SubjectivePriors { pi0_t, pi0_r, costs } => {
                    presets::subjective_priors(pi0_t, pi0_r, costs.into(), noise, power)
                }
                PresetConfig::BiasedCost { alpha, pi0 } => presets::biased_cost(alpha, pi0, noise, power),
                PresetConfig::Deception { pi0 } => presets::deception(pi0, noise, power),
            },
            (Some(_), _, _) => {
                return Err(Error::Config("`preset` cannot be combined with `transmitter`/`receiver`".into()))
            }
            (None, Some(t), Some(r)) => GameSpec::new(
                t.build().map_err(|e| e.within("transmitter"))?,
                r.build().map_err(|e| e.within("receiver"))?,
                noise,
                power,
            ),
            (None, _, _) => return Err(Error::Config("need both `transmitter` and `receiver`, or a `preset`".into())),
        }?;
        if let Some(n) = self.dimension {
            if n != spec.dimension {
                return Err(Error::param(
                    "dimension",
                    format!("noise model has dimension {}, config says {n}", spec.dimension),
                ));
            }
        }
        Ok(spec)
    }
}
