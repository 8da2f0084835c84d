//! Canonical signal pairs that realize a target separation.

use crate::avg_power;
use crate::detection::DerivedQuantities;
use crate::error::Result;
use crate::model::{GameSpec, NoiseModel, PowerConstraint, SignalDesign};
use crate::vector;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Separation {
    Zero,
    Max,
    Interior(f64),
}

/// Unit signaling direction: `[1]` for scalar channels, the least noisy
/// eigenvector otherwise.
pub(crate) fn direction(spec: &GameSpec) -> Result<Vec<f64>> {
    match &spec.noise {
        NoiseModel::Scalar { .. } => Ok(vec![1.0]),
        NoiseModel::Covariance(m) => Ok(vector::min_eigenpair(m)?.nu_min),
    }
}

/// Signals at the requested separation. With `zeta = +1` the pair points
/// from `S0 < 0` to `S1 > 0` along the direction; `zeta = -1` mirrors it.
pub(crate) fn at_separation(spec: &GameSpec, dq: &DerivedQuantities, sep: Separation) -> Result<SignalDesign> {
    let dir = direction(spec)?;
    if sep == Separation::Zero {
        return Ok(SignalDesign::zeros(spec.dimension));
    }
    let z = if dq.zeta < 0 { -1.0 } else { 1.0 };
    let (c0, c1) = match spec.power {
        PowerConstraint::Peak { p0, p1 } => {
            let (r0, r1) = (p0.sqrt(), p1.sqrt());
            match sep {
                Separation::Max => (-r0, r1),
                Separation::Interior(d) => {
                    // Shift the pair off the S0 = -sqrt(P0) end only as far
                    // as needed to keep S1 inside its own power limit.
                    let gap = d * dq.noise_scale;
                    let t = (r0 - r1 - gap).max(0.0);
                    (-r0 + t, -r0 + t + gap)
                }
                Separation::Zero => unreachable!(),
            }
        }
        PowerConstraint::Average { p_avg } => {
            let tx = &spec.transmitter;
            let (s0, s1) = avg_power::max_separation_pair(tx.prior0, tx.prior1, p_avg);
            match sep {
                Separation::Max => (s0, s1),
                Separation::Interior(d) => {
                    let f = d / dq.d_max;
                    (s0 * f, s1 * f)
                }
                Separation::Zero => unreachable!(),
            }
        }
    };
    Ok(SignalDesign::along(&dir, z * c0, z * c1))
}
