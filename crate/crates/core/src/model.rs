//! Game description types: agents, channel, power budget and strategies.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, SymMatrix};

const PRIOR_SUM_TOL: f64 = 1e-12;
/// Slack allowed on power constraints when checking feasibility.
pub const POWER_SLACK: f64 = 1e-12;

/// One agent's subjective priors and decision costs.
///
/// `cost[j][i]` is the cost of deciding `H_j` when `H_i` is true.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AgentParams {
    pub prior0: f64,
    pub prior1: f64,
    pub cost: [[f64; 2]; 2],
}

impl AgentParams {
    pub fn new(prior0: f64, prior1: f64, cost: [[f64; 2]; 2]) -> Result<Self> {
        let p = AgentParams { prior0, prior1, cost };
        p.validate()?;
        Ok(p)
    }

    /// Builds an agent from `prior0` and the four costs named by
    /// (decision, truth): `c00, c10, c01, c11`.
    pub fn from_costs(prior0: f64, c00: f64, c10: f64, c01: f64, c11: f64) -> Result<Self> {
        Self::new(prior0, 1.0 - prior0, [[c00, c01], [c10, c11]])
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("prior0", self.prior0), ("prior1", self.prior1)] {
            if !p.is_finite() || p <= 0.0 || p >= 1.0 {
                return Err(Error::param(name, format!("prior must lie in (0, 1), got {p}")));
            }
        }
        if (self.prior0 + self.prior1 - 1.0).abs() > PRIOR_SUM_TOL {
            return Err(Error::param(
                "prior1",
                format!("priors must sum to one, got {} + {}", self.prior0, self.prior1),
            ));
        }
        for j in 0..2 {
            for i in 0..2 {
                let c = self.cost[j][i];
                if !c.is_finite() || c < 0.0 {
                    return Err(Error::param(
                        format!("costs.c{j}{i}"),
                        format!("cost must be finite and nonnegative, got {c}"),
                    ));
                }
            }
        }
        Ok(())
    }

    #[inline]
    pub fn c(&self, decision: usize, truth: usize) -> f64 {
        self.cost[decision][truth]
    }

    #[inline]
    pub fn prior(&self, i: usize) -> f64 {
        if i == 0 {
            self.prior0
        } else {
            self.prior1
        }
    }

    /// `C_10 - C_00`: penalty for a false alarm over a correct rejection.
    #[inline]
    pub fn delta0(&self) -> f64 {
        self.c(1, 0) - self.c(0, 0)
    }

    /// `C_01 - C_11`: penalty for a miss over a detection.
    #[inline]
    pub fn delta1(&self) -> f64 {
        self.c(0, 1) - self.c(1, 1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum NoiseModel {
    /// Scalar Gaussian noise with standard deviation `sigma`.
    Scalar { sigma: f64 },
    /// Zero-mean Gaussian noise vector with the given covariance.
    Covariance(SymMatrix),
}

impl NoiseModel {
    pub fn scalar(sigma: f64) -> Result<Self> {
        let m = NoiseModel::Scalar { sigma };
        m.validate()?;
        Ok(m)
    }

    pub fn covariance(sigma: SymMatrix) -> Result<Self> {
        let m = NoiseModel::Covariance(sigma);
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            NoiseModel::Scalar { sigma } => {
                if !sigma.is_finite() || *sigma <= 0.0 {
                    return Err(Error::param("sigma", format!("must be positive, got {sigma}")));
                }
            }
            NoiseModel::Covariance(m) => {
                m.cholesky()?;
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match self {
            NoiseModel::Scalar { .. } => 1,
            NoiseModel::Covariance(m) => m.dim(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum PowerConstraint {
    /// `|S0|^2 <= p0` and `|S1|^2 <= p1`.
    Peak { p0: f64, p1: f64 },
    /// `prior0 |S0|^2 + prior1 |S1|^2 <= p_avg`, with the transmitter's priors.
    Average { p_avg: f64 },
}

impl PowerConstraint {
    pub fn validate(&self) -> Result<()> {
        let limits: &[(&str, f64)] = match self {
            PowerConstraint::Peak { p0, p1 } => &[("p0", *p0), ("p1", *p1)],
            PowerConstraint::Average { p_avg } => &[("p_avg", *p_avg)],
        };
        for &(name, v) in limits {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::param(name, format!("power limit must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// A full game instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GameSpec {
    pub transmitter: AgentParams,
    pub receiver: AgentParams,
    pub noise: NoiseModel,
    pub power: PowerConstraint,
    pub dimension: usize,
}

impl GameSpec {
    pub fn new(
        transmitter: AgentParams,
        receiver: AgentParams,
        noise: NoiseModel,
        power: PowerConstraint,
    ) -> Result<Self> {
        let dimension = noise.dim();
        let spec = GameSpec { transmitter, receiver, noise, power, dimension };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        self.transmitter.validate().map_err(|e| e.within("transmitter"))?;
        self.receiver.validate().map_err(|e| e.within("receiver"))?;
        self.noise.validate().map_err(|e| e.within("noise"))?;
        self.power.validate().map_err(|e| e.within("power"))?;
        if self.dimension == 0 {
            return Err(Error::param("dimension", "must be positive"));
        }
        if self.dimension != self.noise.dim() {
            return Err(Error::param(
                "dimension",
                format!("noise model has dimension {}, spec says {}", self.noise.dim(), self.dimension),
            ));
        }
        Ok(())
    }

    /// Scalar noise standard deviation, if this is a scalar channel.
    pub fn scalar_sigma(&self) -> Option<f64> {
        match self.noise {
            NoiseModel::Scalar { sigma } => Some(sigma),
            NoiseModel::Covariance(_) => None,
        }
    }

    pub fn identical_agents(&self) -> bool {
        self.transmitter == self.receiver
    }
}

/// The transmitter's pair of signal points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignalDesign {
    pub s0: Vec<f64>,
    pub s1: Vec<f64>,
}

impl SignalDesign {
    pub fn scalar(s0: f64, s1: f64) -> Self {
        SignalDesign { s0: vec![s0], s1: vec![s1] }
    }

    /// Both signals at the origin of an `n`-dimensional space.
    pub fn zeros(n: usize) -> Self {
        SignalDesign { s0: vec![0.0; n], s1: vec![0.0; n] }
    }

    /// Signals `c0 * dir` and `c1 * dir`.
    pub fn along(dir: &[f64], c0: f64, c1: f64) -> Self {
        SignalDesign { s0: dir.iter().map(|v| c0 * v).collect(), s1: dir.iter().map(|v| c1 * v).collect() }
    }

    pub fn dim(&self) -> usize {
        self.s0.len()
    }

    pub fn as_scalar(&self) -> Option<(f64, f64)> {
        match (self.s0.as_slice(), self.s1.as_slice()) {
            ([a], [b]) => Some((*a, *b)),
            _ => None,
        }
    }

    pub fn difference(&self) -> Vec<f64> {
        self.s1.iter().zip(&self.s0).map(|(a, b)| a - b).collect()
    }

    pub fn is_degenerate(&self) -> bool {
        self.s0 == self.s1
    }

    /// The sign-flipped twin `(-S0, -S1)`.
    pub fn flipped(&self) -> Self {
        SignalDesign { s0: self.s0.iter().map(|v| -v).collect(), s1: self.s1.iter().map(|v| -v).collect() }
    }

    pub fn powers(&self) -> (f64, f64) {
        (linalg::dot(&self.s0, &self.s0), linalg::dot(&self.s1, &self.s1))
    }

    pub fn is_feasible(&self, power: &PowerConstraint, tx: &AgentParams) -> bool {
        let (e0, e1) = self.powers();
        match *power {
            PowerConstraint::Peak { p0, p1 } => e0 <= p0 + POWER_SLACK && e1 <= p1 + POWER_SLACK,
            PowerConstraint::Average { p_avg } => tx.prior0 * e0 + tx.prior1 * e1 <= p_avg + POWER_SLACK,
        }
    }

    pub fn max_abs_diff(&self, other: &SignalDesign) -> f64 {
        self.s0
            .iter()
            .zip(&other.s0)
            .chain(self.s1.iter().zip(&other.s1))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// The receiver's decision rule: decide `H1` when `a^T y >= eta`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ReceiverRule {
    Threshold {
        direction: Vec<f64>,
        threshold: f64,
    },
    AlwaysH0,
    AlwaysH1,
    /// Both decisions are equally good; evaluated as `AlwaysH0`.
    Indifferent,
}

impl ReceiverRule {
    pub fn threshold(direction: Vec<f64>, threshold: f64) -> Result<Self> {
        if direction.iter().all(|v| *v == 0.0) {
            return Err(Error::Precondition("threshold rule needs a nonzero direction".into()));
        }
        if direction.iter().any(|v| !v.is_finite()) || !threshold.is_finite() {
            return Err(Error::Precondition("threshold rule must be finite".into()));
        }
        Ok(ReceiverRule::Threshold { direction, threshold })
    }

    pub fn scalar(a: f64, eta: f64) -> Result<Self> {
        Self::threshold(vec![a], eta)
    }

    pub fn is_threshold(&self) -> bool {
        matches!(self, ReceiverRule::Threshold { .. })
    }

    /// `true` means the receiver decides `H1` for observation `y`.
    pub fn decide(&self, y: &[f64]) -> bool {
        match self {
            ReceiverRule::Threshold { direction, threshold } => linalg::dot(direction, y) >= *threshold,
            ReceiverRule::AlwaysH1 => true,
            ReceiverRule::AlwaysH0 | ReceiverRule::Indifferent => false,
        }
    }

    /// Rule for the sign-flipped signal twin: `(-a, eta)`.
    pub fn flipped(&self) -> Self {
        match self {
            ReceiverRule::Threshold { direction, threshold } => {
                ReceiverRule::Threshold { direction: direction.iter().map(|v| -v).collect(), threshold: *threshold }
            }
            other => other.clone(),
        }
    }

    /// `(a / |a|, eta / |a|)`; two rules with equal normal forms make
    /// identical decisions.
    pub fn normalized(&self) -> Option<(Vec<f64>, f64)> {
        match self {
            ReceiverRule::Threshold { direction, threshold } => {
                let n = linalg::norm(direction);
                Some((direction.iter().map(|v| v / n).collect(), threshold / n))
            }
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            ReceiverRule::Threshold { .. } => "threshold",
            ReceiverRule::AlwaysH0 => "always-H0",
            ReceiverRule::AlwaysH1 => "always-H1",
            ReceiverRule::Indifferent => "indifferent",
        }
    }
}
