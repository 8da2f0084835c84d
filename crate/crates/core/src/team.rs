//! The team problem: both agents share priors and costs.

use crate::detection::{self, derived_quantities};
use crate::error::{Error, Result};
use crate::model::GameSpec;
use crate::report::{Concept, EquilibriumReport, Existence};
use crate::signals::{self, Separation};

/// Maximum separation whenever the receiver runs a likelihood-ratio test,
/// otherwise the receiver ignores the channel.
pub fn solve_team(spec: &GameSpec) -> Result<EquilibriumReport> {
    if !spec.identical_agents() {
        return Err(Error::MismatchedAgents);
    }
    let dq = derived_quantities(spec)?;
    if !dq.tau.is_finite_positive() {
        let signals = signals::at_separation(spec, &dq, Separation::Zero)?;
        let rule = detection::prior_only_rule(&spec.receiver);
        return EquilibriumReport::build(
            spec,
            Concept::Team,
            "non-LRT receiver",
            0.0,
            dq.d_max,
            signals,
            rule,
            Existence::Exists,
        );
    }
    let signals = signals::at_separation(spec, &dq, Separation::Max)?;
    let rule = detection::optimal_receiver_rule(&signals, &spec.receiver, &spec.noise)?;
    Ok(EquilibriumReport::build(
        spec,
        Concept::Team,
        "maximum separation",
        dq.d_max,
        dq.d_max,
        signals,
        rule,
        Existence::Exists,
    )?
    .note("the sign-flipped signal pair with the mirrored rule is essentially equivalent"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AgentParams, NoiseModel, PowerConstraint, ReceiverRule};

    fn spec(a: AgentParams, sigma: f64, p0: f64, p1: f64) -> GameSpec {
        GameSpec::new(a, a, NoiseModel::Scalar { sigma }, PowerConstraint::Peak { p0, p1 }).unwrap()
    }

    #[test]
    fn symmetric_team() {
        let a = AgentParams::from_costs(0.5, 0.0, 1.0, 1.0, 0.0).unwrap();
        let r = solve_team(&spec(a, 1.0, 1.0, 1.0)).unwrap();
        assert!(r.informative);
        assert_eq!(r.d_star, 2.0);
        assert_eq!(r.signals.as_scalar(), Some((-1.0, 1.0)));
        assert!((r.risk_t - 0.15865525393145707).abs() < 1e-12);
        assert_eq!(r.risk_t, r.risk_r);
    }

    #[test]
    fn unequal_power() {
        let a = AgentParams::from_costs(0.5, 0.0, 1.0, 1.0, 0.0).unwrap();
        let r = solve_team(&spec(a, 0.5, 4.0, 1.0)).unwrap();
        assert_eq!(r.d_star, 6.0);
    }

    #[test]
    fn infinite_tau_is_non_informative() {
        let a = AgentParams::from_costs(0.5, 0.0, 1.0, 1.0, 1.0).unwrap();
        let r = solve_team(&spec(a, 1.0, 1.0, 1.0)).unwrap();
        assert!(!r.informative);
        assert_eq!(r.rule, ReceiverRule::AlwaysH0);
        assert_eq!(r.signals.as_scalar(), Some((0.0, 0.0)));
    }

    #[test]
    fn mismatched_agents_rejected() {
        let a = AgentParams::from_costs(0.5, 0.0, 1.0, 1.0, 0.0).unwrap();
        let b = AgentParams::from_costs(0.4, 0.0, 1.0, 1.0, 0.0).unwrap();
        let s =
            GameSpec::new(a, b, NoiseModel::Scalar { sigma: 1.0 }, PowerConstraint::Peak { p0: 1.0, p1: 1.0 }).unwrap();
        assert_eq!(solve_team(&s).unwrap_err(), Error::MismatchedAgents);
    }
}
