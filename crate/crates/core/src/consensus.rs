//! Server-side aggregation of client points.
//!
//! Two methods: the closed-form tangent-space mean (lift the received
//! points into the anchor's tangent space, average, map back) and the
//! Karcher mean computed by Riemannian gradient descent.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifold::{exp_map, log_map, ManifoldPoint, TangentVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConsensusMethod {
    TangentSpace,
    Karcher,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ConsensusConfig {
    pub method: ConsensusMethod,
    /// Moving-average weight; 1 recovers the plain tangent-space mean.
    pub beta: f64,
    pub karcher_tol: f64,
    pub karcher_max_iters: usize,
    pub karcher_step: f64,
}

impl Default for ConsensusConfig {
    fn default() -> Self {
        ConsensusConfig {
            method: ConsensusMethod::TangentSpace,
            beta: 1.0,
            karcher_tol: crate::tol::KARCHER_GRAD,
            karcher_max_iters: 200,
            karcher_step: 1.0,
        }
    }
}

impl ConsensusConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "beta must be in (0, 1], got {}",
                self.beta
            )));
        }
        if self.karcher_tol <= 0.0 {
            return Err(Error::InvalidConfig("karcher_tol must be positive".into()));
        }
        if self.karcher_max_iters == 0 || self.karcher_step <= 0.0 {
            return Err(Error::InvalidConfig(
                "karcher_max_iters and karcher_step must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Result of a Karcher mean computation.
#[derive(Debug, Clone)]
pub struct KarcherOutcome {
    pub point: ManifoldPoint,
    pub iterations: usize,
    pub converged: bool,
}

/// Mean of the logs of `points` at `anchor`, scaled by `beta`, mapped back
/// through the exponential. Summation runs in client index order so results
/// are bitwise deterministic.
pub fn tangent_space_mean(
    anchor: &ManifoldPoint,
    points: &[ManifoldPoint],
    beta: f64,
) -> Result<ManifoldPoint> {
    if points.is_empty() {
        return Err(Error::EmptyPointList);
    }
    let mut acc = TangentVector::zero(anchor.clone());
    for p in points {
        acc = acc.add(&log_map(anchor, p)?)?;
    }
    let step = acc.scale(beta / points.len() as f64);
    exp_map(anchor, &step)
}

/// Mean log direction at `x`; the Riemannian gradient of
/// h(x) = 1/k sum d^2(x, x_i) is -2 times this.
fn mean_log(x: &ManifoldPoint, points: &[ManifoldPoint]) -> Result<TangentVector> {
    let mut acc = TangentVector::zero(x.clone());
    for p in points {
        acc = acc.add(&log_map(x, p)?)?;
    }
    Ok(acc.scale(1.0 / points.len() as f64))
}

/// Mean squared distance h(x) = 1/k sum d^2(x, x_i).
pub fn mean_squared_distance(x: &ManifoldPoint, points: &[ManifoldPoint]) -> Result<f64> {
    let mut acc = 0.0;
    for p in points {
        let d = crate::manifold::distance(x, p)?;
        acc += d * d;
    }
    Ok(acc / points.len() as f64)
}

/// Karcher mean by Riemannian gradient descent from `init`, stopping when
/// the gradient norm falls below `cfg.karcher_tol`. Non-convergence is
/// reported through the `converged` flag, not as an error.
pub fn karcher_mean(
    points: &[ManifoldPoint],
    init: &ManifoldPoint,
    cfg: &ConsensusConfig,
) -> Result<KarcherOutcome> {
    if points.is_empty() {
        return Err(Error::EmptyPointList);
    }
    cfg.validate()?;
    let mut x = init.clone();
    for iter in 1..=cfg.karcher_max_iters {
        let direction = mean_log(&x, points)?;
        // grad h = -2 * mean_log
        let grad_norm = 2.0 * direction.norm();
        if grad_norm <= cfg.karcher_tol {
            return Ok(KarcherOutcome {
                point: x,
                iterations: iter,
                converged: true,
            });
        }
        x = exp_map(&x, &direction.scale(cfg.karcher_step))?;
    }
    Ok(KarcherOutcome {
        point: x,
        iterations: cfg.karcher_max_iters,
        converged: false,
    })
}
