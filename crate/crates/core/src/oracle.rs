//! Independent checks: Monte Carlo simulation of the channel and a
//! brute-force search over the transmitter's separation.
//!
//! Sampling is reproducible bit for bit. Each hypothesis `h` draws its
//! samples in chunks of [`CHUNK`]; chunk `c` uses
//! `ChaCha8Rng::seed_from_u64(seed)` on stream `(h << 32) | c`. Standard
//! normals come from Box-Muller on 53-bit uniforms, both outputs used in
//! order; vector noise is `L z` with `L` the Cholesky factor of the
//! covariance. Error tallies are integers, so the thread count does not
//! affect the result.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::detection::{self, derived_quantities};
use crate::error::{Error, Result};
use crate::linalg::Cholesky;
use crate::model::{AgentParams, GameSpec, NoiseModel, ReceiverRule, SignalDesign};
use crate::report::{fmt_f64, EquilibriumReport};

pub const CHUNK: u64 = 1 << 16;
pub const MIN_SAMPLES: u64 = 10_000;
pub const THREADS_ENV: &str = "SIGEQ_THREADS";
/// Verification tolerance in standard errors.
pub const Z_LIMIT: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub p10_hat: f64,
    pub p01_hat: f64,
    pub risk_t_hat: f64,
    pub risk_r_hat: f64,
    pub se_p10: f64,
    pub se_p01: f64,
    pub se_risk_t: f64,
    pub se_risk_r: f64,
    pub n_samples: u64,
    pub seed: u64,
}

/// Worker count from `SIGEQ_THREADS`, if set to a positive integer.
pub fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&n| n > 0)
}

struct Normals {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl Normals {
    fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Normals { rng, spare: None }
    }

    fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    fn next(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * libm::log(u1)).sqrt();
        let t = 2.0 * std::f64::consts::PI * u2;
        self.spare = Some(r * libm::sin(t));
        r * libm::cos(t)
    }
}

enum Shaper {
    Scalar(f64),
    Chol(Cholesky),
}

/// Number of samples under `H_h` for which the rule errs.
fn count_errors(signal: &[f64], rule: &ReceiverRule, shaper: &Shaper, h: u64, n: u64, seed: u64) -> u64 {
    let chunks = n.div_ceil(CHUNK);
    let want_h1 = h == 1;
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let len = CHUNK.min(n - c * CHUNK);
            let mut g = Normals::new(seed, (h << 32) | c);
            let dim = signal.len();
            let mut z = vec![0.0; dim];
            let mut y = vec![0.0; dim];
            let mut errors = 0u64;
            for _ in 0..len {
                for v in z.iter_mut() {
                    *v = g.next();
                }
                match shaper {
                    Shaper::Scalar(s) => y[0] = signal[0] + s * z[0],
                    Shaper::Chol(l) => {
                        let noise = l.lower_mul(&z);
                        for i in 0..dim {
                            y[i] = signal[i] + noise[i];
                        }
                    }
                }
                if rule.decide(&y) != want_h1 {
                    errors += 1;
                }
            }
            errors
        })
        .sum()
}

fn risk_se(agent: &AgentParams, se10: f64, se01: f64) -> f64 {
    (agent.prior0 * agent.delta0().abs() * se10).hypot(agent.prior1 * agent.delta1().abs() * se01)
}

/// Simulates `Y = S_i + N` with `n / 2` samples under `H0` and the rest
/// under `H1`, using `SIGEQ_THREADS` workers when set.
pub fn mc_estimate(
    signals: &SignalDesign,
    rule: &ReceiverRule,
    noise: &NoiseModel,
    agents: (&AgentParams, &AgentParams),
    n: u64,
    seed: u64,
) -> Result<McEstimate> {
    mc_estimate_with_threads(signals, rule, noise, agents, n, seed, threads_from_env())
}

pub fn mc_estimate_with_threads(
    signals: &SignalDesign,
    rule: &ReceiverRule,
    noise: &NoiseModel,
    agents: (&AgentParams, &AgentParams),
    n: u64,
    seed: u64,
    threads: Option<usize>,
) -> Result<McEstimate> {
    if n < MIN_SAMPLES {
        return Err(Error::Precondition(format!("need at least {MIN_SAMPLES} samples, got {n}")));
    }
    // Dimension checks and the exact answer for observation-free rules.
    let exact = detection::rule_error_probs(signals, rule, noise)?;
    let (tx, rx) = agents;
    let n0 = n / 2;
    let n1 = n - n0;
    let (p10, p01, se10, se01) = if rule.is_threshold() {
        let shaper = match noise {
            NoiseModel::Scalar { sigma } => Shaper::Scalar(*sigma),
            NoiseModel::Covariance(m) => Shaper::Chol(m.cholesky()?),
        };
        let run = || {
            (
                count_errors(&signals.s0, rule, &shaper, 0, n0, seed),
                count_errors(&signals.s1, rule, &shaper, 1, n1, seed),
            )
        };
        let (e0, e1) = match threads {
            Some(t) => rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::Precondition(format!("thread pool: {e}")))?
                .install(run),
            None => run(),
        };
        let p10 = e0 as f64 / n0 as f64;
        let p01 = e1 as f64 / n1 as f64;
        (p10, p01, (p10 * (1.0 - p10) / n0 as f64).sqrt(), (p01 * (1.0 - p01) / n1 as f64).sqrt())
    } else {
        (exact.0, exact.1, 0.0, 0.0)
    };
    Ok(McEstimate {
        p10_hat: p10,
        p01_hat: p01,
        risk_t_hat: detection::bayes_risk(tx, p10, p01),
        risk_r_hat: detection::bayes_risk(rx, p10, p01),
        se_p10: se10,
        se_p01: se01,
        se_risk_t: risk_se(tx, se10, se01),
        se_risk_r: risk_se(rx, se10, se01),
        n_samples: n,
        seed,
    })
}

/// Brute-force Stackelberg leader: the grid point `d` in `[0, d_max]`
/// with the lowest transmitter risk when the receiver answers with its
/// likelihood-ratio test. The first of equal minima wins.
pub fn grid_search_transmitter(spec: &GameSpec, grid_size: usize) -> Result<(f64, f64)> {
    if grid_size < 2 {
        return Err(Error::Precondition("grid needs at least two points".into()));
    }
    let dq = derived_quantities(spec)?;
    if !dq.tau.is_finite_positive() {
        return Err(Error::Precondition("grid search needs 0 < tau < inf".into()));
    }
    let step = dq.d_max / (grid_size - 1) as f64;
    let mut best = (0.0, detection::follower_risks(spec, &dq, 0.0)?.0);
    for i in 1..grid_size {
        let d = if i == grid_size - 1 { dq.d_max } else { step * i as f64 };
        let r = detection::follower_risks(spec, &dq, d)?.0;
        if r < best.1 {
            best = (d, r);
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verification {
    pub estimate: McEstimate,
    pub lines: Vec<String>,
    pub pass: bool,
}

impl Verification {
    pub fn render(&self) -> String {
        let mut s = self.lines.join("\n");
        s.push('\n');
        s
    }
}

/// Compares a report's analytic error probabilities and risks with a
/// simulation. `threshold_offset` shifts the simulated rule's threshold
/// only, as a sanity check that mismatches are caught.
pub fn verify_report(
    spec: &GameSpec,
    report: &EquilibriumReport,
    n: u64,
    seed: u64,
    threshold_offset: f64,
) -> Result<Verification> {
    let simulated = match &report.rule {
        ReceiverRule::Threshold { direction, threshold } => {
            ReceiverRule::Threshold { direction: direction.clone(), threshold: threshold + threshold_offset }
        }
        other => other.clone(),
    };
    let (p10, p01) = detection::rule_error_probs(&report.signals, &report.rule, &spec.noise)?;
    let est = mc_estimate(&report.signals, &simulated, &spec.noise, (&spec.transmitter, &spec.receiver), n, seed)?;
    // An empirical rate of exactly 0 or 1 has zero standard error; the
    // error implied by the analytic rate keeps rare events testable.
    let (se10, se01) = if simulated.is_threshold() {
        let n0 = (n / 2) as f64;
        let n1 = (n - n / 2) as f64;
        (est.se_p10.max((p10 * (1.0 - p10) / n0).sqrt()), est.se_p01.max((p01 * (1.0 - p01) / n1).sqrt()))
    } else {
        (0.0, 0.0)
    };
    let rows = [
        ("p10", p10, est.p10_hat, se10),
        ("p01", p01, est.p01_hat, se01),
        ("risk_t", report.risk_t, est.risk_t_hat, risk_se(&spec.transmitter, se10, se01)),
        ("risk_r", report.risk_r, est.risk_r_hat, risk_se(&spec.receiver, se10, se01)),
    ];
    let mut lines = vec![format!("samples={n} seed={seed}")];
    let mut pass = true;
    for (name, analytic, empirical, se) in rows {
        let diff = (empirical - analytic).abs();
        let ok = if se > 0.0 { diff <= Z_LIMIT * se } else { diff <= 1e-12 };
        pass &= ok;
        lines.push(format!(
            "{name} analytic={} empirical={} std_err={} {}",
            fmt_f64(analytic),
            fmt_f64(empirical),
            fmt_f64(se),
            if ok { "ok" } else { "MISMATCH" }
        ));
    }
    lines.push(if pass { "PASS".into() } else { "FAIL".into() });
    Ok(Verification { estimate: est, lines, pass })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn agent() -> AgentParams {
        AgentParams::from_costs(0.5, 0.0, 1.0, 1.0, 0.0).unwrap()
    }

    #[test]
    fn always_h0_is_exact() {
        let a = AgentParams::from_costs(0.3, 0.1, 0.5, 0.8, 0.2).unwrap();
        let e = mc_estimate(
            &SignalDesign::scalar(0.0, 0.0),
            &ReceiverRule::AlwaysH0,
            &NoiseModel::Scalar { sigma: 1.0 },
            (&a, &a),
            10_000,
            7,
        )
        .unwrap();
        assert_eq!((e.p10_hat, e.p01_hat, e.se_p10), (0.0, 1.0, 0.0));
        assert_eq!(e.risk_t_hat, detection::bayes_risk(&a, 0.0, 1.0));
    }

    #[test]
    fn threads_do_not_change_tallies() {
        let a = agent();
        let sig = SignalDesign::scalar(-1.0, 1.0);
        let rule = ReceiverRule::scalar(2.0, 0.0).unwrap();
        let noise = NoiseModel::Scalar { sigma: 1.0 };
        let one = mc_estimate_with_threads(&sig, &rule, &noise, (&a, &a), 300_001, 3, Some(1)).unwrap();
        let four = mc_estimate_with_threads(&sig, &rule, &noise, (&a, &a), 300_001, 3, Some(4)).unwrap();
        assert_eq!(one, four);
        let q1 = detection::q_function(1.0);
        assert!((one.p10_hat - q1).abs() <= 4.0 * one.se_p10);
    }

    #[test]
    fn too_few_samples() {
        let a = agent();
        let e = mc_estimate(
            &SignalDesign::scalar(-1.0, 1.0),
            &ReceiverRule::AlwaysH1,
            &NoiseModel::Scalar { sigma: 1.0 },
            (&a, &a),
            9_999,
            0,
        );
        assert!(matches!(e, Err(Error::Precondition(_))));
    }
}
