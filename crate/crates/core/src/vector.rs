//! Multi-dimensional channels `Y = S_i + N`, `N ~ N(0, Sigma)`.
//!
//! The scalar solvers already work on any [`NoiseModel`]; this module adds
//! the eigen-analysis that picks the signaling direction, the Mahalanobis
//! separation, and entry points that insist on a covariance model.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, SymMatrix};
use crate::model::{GameSpec, NoiseModel, PowerConstraint, SignalDesign};
use crate::report::EquilibriumReport;

/// Eigenvalues closer than this (relative to `|Sigma|`) are treated as one.
const DEGENERACY_TOL: f64 = 1e-10;
const SIGN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenPair {
    pub lambda_min: f64,
    /// Unit eigenvector, first non-negligible component positive.
    pub nu_min: Vec<f64>,
}

/// Smallest eigenvalue of `sigma` and a canonical unit eigenvector.
///
/// When the smallest eigenvalue is repeated, the vector is the projection
/// of the first coordinate axis with a non-negligible component in the
/// eigenspace, so the answer does not depend on the rotation order.
pub fn min_eigenpair(sigma: &SymMatrix) -> Result<EigenPair> {
    let n = sigma.dim();
    let (vals, vecs) = sigma.jacobi_eigen();
    let col = |j: usize| -> Vec<f64> { (0..n).map(|i| vecs[i * n + j]).collect() };

    let lambda_min = vals.iter().copied().fold(f64::INFINITY, f64::min);
    if lambda_min.is_nan() || lambda_min <= 0.0 {
        return Err(Error::param("covariance", "matrix is not positive definite"));
    }
    let tol = DEGENERACY_TOL * sigma.norm();
    let basis: Vec<Vec<f64>> = (0..n).filter(|&j| vals[j] - lambda_min <= tol).map(col).collect();

    let nu = if basis.len() == 1 {
        basis[0].clone()
    } else {
        (0..n)
            .find_map(|k| {
                let mut p = vec![0.0; n];
                for u in &basis {
                    for (pi, ui) in p.iter_mut().zip(u) {
                        *pi += u[k] * ui;
                    }
                }
                let len = linalg::norm(&p);
                (len > 1e-6).then(|| p.iter().map(|v| v / len).collect::<Vec<_>>())
            })
            .expect("eigenspace is nonempty")
    };
    Ok(EigenPair { lambda_min, nu_min: canonical_sign(nu) })
}

fn canonical_sign(mut v: Vec<f64>) -> Vec<f64> {
    if let Some(first) = v.iter().find(|x| x.abs() > SIGN_TOL) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
    v
}

/// `sqrt((S1 - S0)^T Sigma^{-1} (S1 - S0))`, via a Cholesky solve.
pub fn mahalanobis_d(signals: &SignalDesign, sigma: &SymMatrix) -> Result<f64> {
    for len in [signals.s0.len(), signals.s1.len()] {
        if len != sigma.dim() {
            return Err(Error::DimensionMismatch { expected: sigma.dim(), got: len });
        }
    }
    let diff = signals.difference();
    let w = sigma.cholesky()?.solve(&diff);
    Ok(linalg::dot(&diff, &w).max(0.0).sqrt())
}

fn require_vector_peak(spec: &GameSpec) -> Result<()> {
    match (&spec.noise, spec.power) {
        (NoiseModel::Covariance(_), PowerConstraint::Peak { .. }) => Ok(()),
        (NoiseModel::Scalar { .. }, _) => {
            Err(Error::Unsupported("vector solvers need a covariance noise model".into()))
        }
        (_, PowerConstraint::Average { .. }) => {
            Err(Error::Unsupported("average power constraint is only defined for scalar channels".into()))
        }
    }
}

pub fn solve_team_vec(spec: &GameSpec) -> Result<EquilibriumReport> {
    require_vector_peak(spec)?;
    crate::team::solve_team(spec)
}

pub fn solve_stackelberg_vec(spec: &GameSpec) -> Result<EquilibriumReport> {
    require_vector_peak(spec)?;
    crate::stackelberg::solve_stackelberg(spec)
}

pub fn solve_nash_vec(spec: &GameSpec) -> Result<EquilibriumReport> {
    require_vector_peak(spec)?;
    crate::nash::solve_nash(spec)
}

/// Embeds a scalar spec as a one-dimensional covariance model.
pub fn embed_scalar(spec: &GameSpec) -> Result<GameSpec> {
    let sigma = spec.scalar_sigma().ok_or_else(|| Error::Precondition("spec is already a vector spec".into()))?;
    GameSpec::new(
        spec.transmitter,
        spec.receiver,
        NoiseModel::covariance(SymMatrix::diagonal(&[sigma * sigma])?)?,
        spec.power,
    )
}
