#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sigeq::detection::receiver_tau;
use sigeq::{AgentParams, GameSpec, NoiseModel, PowerConstraint};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn agent(r: &mut ChaCha8Rng) -> AgentParams {
    let p0 = r.random_range(0.05..0.95);
    let mut c = || r.random_range(0.0..1.0);
    AgentParams::from_costs(p0, c(), c(), c(), c()).unwrap()
}

/// A receiver running a genuine likelihood-ratio test.
pub fn lrt_agent(r: &mut ChaCha8Rng) -> AgentParams {
    loop {
        let a = agent(r);
        if receiver_tau(&a).is_finite_positive() {
            return a;
        }
    }
}

pub fn peak(r: &mut ChaCha8Rng) -> PowerConstraint {
    PowerConstraint::Peak { p0: r.random_range(0.1..4.0), p1: r.random_range(0.1..4.0) }
}

pub fn scalar_spec(r: &mut ChaCha8Rng) -> GameSpec {
    let tx = agent(r);
    let rx = lrt_agent(r);
    let sigma = r.random_range(0.2..2.0);
    let power = peak(r);
    GameSpec::new(tx, rx, NoiseModel::Scalar { sigma }, power).unwrap()
}

pub fn team_spec(r: &mut ChaCha8Rng) -> GameSpec {
    let a = lrt_agent(r);
    let sigma = r.random_range(0.2..2.0);
    let power = peak(r);
    GameSpec::new(a, a, NoiseModel::Scalar { sigma }, power).unwrap()
}
