//! Equilibria of the binary signaling game over a Gaussian channel.
//!
//! A transmitter encodes one of two hypotheses as a signal level, the
//! receiver observes it through additive Gaussian noise and decides which
//! hypothesis holds. The two agents may disagree on priors and decision
//! costs, so the interaction is solved as a team problem, a Stackelberg
//! game (transmitter commits first) or a Nash game (simultaneous best
//! responses).
//!
//! ```
//! use sigeq::{AgentParams, GameSpec, NoiseModel, PowerConstraint, solve_stackelberg};
//!
//! let spec = GameSpec::new(
//!     AgentParams::from_costs(0.25, 0.6, 0.4, 0.4, 0.6)?,
//!     AgentParams::from_costs(0.25, 0.0, 0.9, 0.4, 0.0)?,
//!     NoiseModel::scalar(0.1)?,
//!     PowerConstraint::Peak { p0: 1.0, p1: 1.0 },
//! )?;
//! let report = solve_stackelberg(&spec)?;
//! assert_eq!(report.case_label, "case 3");
//! assert!((report.d_star - 0.4704).abs() < 5e-4);
//! # Ok::<(), sigeq::Error>(())
//! ```

pub mod avg_power;
pub mod config;
pub mod detection;
pub mod error;
pub mod linalg;
pub mod model;
pub mod nash;
pub mod optimize;
pub mod oracle;
pub mod presets;
pub mod report;
mod signals;
pub mod stackelberg;
pub mod sweep;
pub mod team;
pub mod vector;

pub use detection::{
    bayes_risk, conditional_error_probs, derived_quantities, optimal_receiver_rule, q_function, receiver_case,
    rule_error_probs, DerivedQuantities, ReceiverCase, Tau,
};
pub use error::{Error, Result};
pub use linalg::SymMatrix;
pub use model::{AgentParams, GameSpec, NoiseModel, PowerConstraint, ReceiverRule, SignalDesign};
pub use nash::{best_response_dynamics, solve_nash, DynamicsOutcome, DynamicsTrace};
pub use report::{Concept, EquilibriumReport, Existence};
pub use stackelberg::{case6_rule, solve_stackelberg, Case6Decision};
pub use team::solve_team;
pub use vector::{mahalanobis_d, min_eigenpair, EigenPair};

/// Solves `spec` under the given equilibrium concept, dispatching on the
/// channel and power model.
pub fn solve(spec: &GameSpec, concept: Concept) -> Result<EquilibriumReport> {
    match concept {
        Concept::Team => solve_team(spec),
        Concept::Stackelberg => solve_stackelberg(spec),
        Concept::Nash => solve_nash(spec),
    }
}
