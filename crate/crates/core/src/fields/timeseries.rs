use crate::{Error, Result};

/// Forward and backward difference quotients of a stored time series,
/// evaluated at a finite step `dt` (never at the dt -> 0 limit).
#[derive(Debug, Clone)]
pub struct TwoSidedDerivative {
    /// Sample times covered by both quotients: indices `k .. len - k`.
    pub times: Vec<f64>,
    /// `(f(t + dt) - f(t)) / dt`
    pub forward: Vec<f64>,
    /// `(f(t) - f(t - dt)) / dt`
    pub backward: Vec<f64>,
    pub dt: f64,
}

/// Resolve a coarse step into a stride of the base step, rejecting
/// misaligned requests.
pub fn stride_for(delta: f64, dt: f64) -> Result<usize> {
    let ratio = dt / delta;
    let k = ratio.round();
    if k < 1.0 || (ratio - k).abs() > 1e-9 * ratio.max(1.0) {
        return Err(Error::StepAlignment { dt, delta });
    }
    Ok(k as usize)
}

/// Two-sided derivatives of samples taken at base step `delta`, evaluated at
/// the coarser step `dt = k * delta`.
pub fn two_sided_derivative(samples: &[f64], delta: f64, dt: f64) -> Result<TwoSidedDerivative> {
    let k = stride_for(delta, dt)?;
    if samples.len() < 2 * k + 1 {
        return Err(Error::StepAlignment { dt, delta });
    }
    let n = samples.len();
    let mut times = Vec::with_capacity(n - 2 * k);
    let mut forward = Vec::with_capacity(n - 2 * k);
    let mut backward = Vec::with_capacity(n - 2 * k);
    for i in k..n - k {
        times.push(i as f64 * delta);
        forward.push((samples[i + k] - samples[i]) / dt);
        backward.push((samples[i] - samples[i - k]) / dt);
    }
    Ok(TwoSidedDerivative { times, forward, backward, dt })
}
