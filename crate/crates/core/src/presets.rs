//! Ready-made game specs for the standard motivating setups.

use crate::error::Result;
use crate::model::{AgentParams, GameSpec, NoiseModel, PowerConstraint};

/// Decision costs `C_ji` for decision `j` under hypothesis `i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Costs {
    pub c00: f64,
    pub c10: f64,
    pub c01: f64,
    pub c11: f64,
}

impl Costs {
    /// `0` for a correct decision, `1` for an error.
    pub const UNIFORM: Costs = Costs { c00: 0.0, c10: 1.0, c01: 1.0, c11: 0.0 };

    pub fn agent(&self, prior0: f64) -> Result<AgentParams> {
        AgentParams::from_costs(prior0, self.c00, self.c10, self.c01, self.c11)
    }
}

/// Shared costs, different priors on `H0`.
pub fn subjective_priors(
    pi0_t: f64,
    pi0_r: f64,
    costs: Costs,
    noise: NoiseModel,
    power: PowerConstraint,
) -> Result<GameSpec> {
    GameSpec::new(
        costs.agent(pi0_t).map_err(|e| e.within("transmitter"))?,
        costs.agent(pi0_r).map_err(|e| e.within("receiver"))?,
        noise,
        power,
    )
}

/// Shared priors; the transmitter's objective agrees with the receiver's
/// error probability with probability `alpha`:
/// `C^t_01 = C^t_10 = alpha`, `C^t_00 = C^t_11 = 1 - alpha`.
pub fn biased_cost(alpha: f64, pi0: f64, noise: NoiseModel, power: PowerConstraint) -> Result<GameSpec> {
    let tx = Costs { c00: 1.0 - alpha, c10: alpha, c01: alpha, c11: 1.0 - alpha };
    GameSpec::new(
        tx.agent(pi0).map_err(|e| e.within("transmitter"))?,
        Costs::UNIFORM.agent(pi0).map_err(|e| e.within("receiver"))?,
        noise,
        power,
    )
}

/// The transmitter is penalized whenever the receiver decodes correctly.
pub fn deception(pi0: f64, noise: NoiseModel, power: PowerConstraint) -> Result<GameSpec> {
    let tx = Costs { c00: 1.0, c10: 0.0, c01: 0.0, c11: 1.0 };
    GameSpec::new(
        tx.agent(pi0).map_err(|e| e.within("transmitter"))?,
        Costs::UNIFORM.agent(pi0).map_err(|e| e.within("receiver"))?,
        noise,
        power,
    )
}
