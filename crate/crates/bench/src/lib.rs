//! Fixed game instances shared by the benchmarks.

use sigeq::{AgentParams, GameSpec, NoiseModel, PowerConstraint, SymMatrix};

/// Stackelberg interior optimum at `d* ~ 0.4704`.
pub fn interior_optimum() -> GameSpec {
    GameSpec::new(
        AgentParams::from_costs(0.25, 0.6, 0.4, 0.4, 0.6).unwrap(),
        AgentParams::from_costs(0.25, 0.0, 0.9, 0.4, 0.0).unwrap(),
        NoiseModel::Scalar { sigma: 0.1 },
        PowerConstraint::Peak { p0: 1.0, p1: 1.0 },
    )
    .unwrap()
}

/// Opposed interests on both hypotheses under an average power budget.
pub fn average_power_mixed() -> GameSpec {
    GameSpec::new(
        AgentParams::from_costs(0.5, 0.2, 0.0, 5.0, 0.0).unwrap(),
        AgentParams::from_costs(0.5, 0.0, 1.0, 1.0, 0.0).unwrap(),
        NoiseModel::Scalar { sigma: 1.0 },
        PowerConstraint::Average { p_avg: 1.0 },
    )
    .unwrap()
}

/// An `n`-dimensional channel with a correlated covariance.
pub fn vector_channel(n: usize) -> GameSpec {
    let rows = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 2.0 } else { 0.5f64.powi((i as i32 - j as i32).abs()) }).collect())
        .collect();
    GameSpec::new(
        AgentParams::from_costs(0.4, 0.0, 1.0, 2.0, 0.0).unwrap(),
        AgentParams::from_costs(0.3, 0.0, 1.0, 1.0, 0.0).unwrap(),
        NoiseModel::Covariance(SymMatrix::from_rows(rows).unwrap()),
        PowerConstraint::Peak { p0: 1.0, p1: 2.0 },
    )
    .unwrap()
}
