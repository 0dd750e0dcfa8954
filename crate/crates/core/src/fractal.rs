//! Scale-law analysis of stored paths: resolution-dependent length, fractal
//! dimension, the velocity scale decomposition around the transition scale,
//! and the mean-square-velocity divergence.

use serde::{Deserialize, Serialize};

use crate::fields::two_sided_derivative;
use crate::geodesics::FractalPath;
use crate::{Error, PhysicalParams, Result};

/// Ordinary least squares of y on x: (slope, intercept, stderr of slope).
pub fn ols_slope(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    assert!(xs.len() == ys.len() && xs.len() >= 2, "need paired points");
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let stderr = if xs.len() > 2 { (sse / (n - 2.0) / sxx).sqrt() } else { 0.0 };
    (slope, intercept, stderr)
}

/// Geometric resolution ladder of ratio 2 starting at `base`.
pub fn geometric_ladder(base: f64, octaves: usize) -> Vec<f64> {
    (0..octaves).map(|k| base * (1u64 << k) as f64).collect()
}

/// Total length of a path resampled at resolution dt.
pub fn path_length(path: &FractalPath, dt: f64) -> Result<f64> {
    Ok(path.increments(dt)?.iter().map(|d| d.abs()).sum())
}

/// Ensemble-mean lengths and mean spatial increments over a resolution
/// ladder.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScaleScan {
    pub dts: Vec<f64>,
    /// Ensemble-mean path length at each resolution.
    pub lengths: Vec<f64>,
    /// Ensemble-mean |increment| at each resolution: the spatial resolution
    /// epsilon that the dimension fit runs against.
    pub mean_increments: Vec<f64>,
    /// Standard error of the mean length per resolution.
    pub stderrs: Vec<f64>,
}

pub fn scan_path_lengths(paths: &[FractalPath], ladder: &[f64]) -> Result<ScaleScan> {
    if paths.is_empty() {
        return Err(Error::EmptySelection);
    }
    if ladder.len() < 5 {
        return Err(Error::ScaleLadder(format!(
            "need at least 5 resolutions, got {}",
            ladder.len()
        )));
    }
    if ladder.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::ScaleLadder("ladder must be strictly increasing".into()));
    }
    let mut lengths = Vec::new();
    let mut mean_increments = Vec::new();
    let mut stderrs = Vec::new();
    for &dt in ladder {
        let mut per_path = Vec::with_capacity(paths.len());
        let mut inc_sum = 0.0f64;
        let mut inc_count = 0usize;
        for path in paths {
            let incs = path.increments(dt)?;
            per_path.push(incs.iter().map(|d| d.abs()).sum::<f64>());
            inc_sum += incs.iter().map(|d| d.abs()).sum::<f64>();
            inc_count += incs.len();
        }
        let n = per_path.len() as f64;
        let mean = per_path.iter().sum::<f64>() / n;
        let var = per_path.iter().map(|l| (l - mean) * (l - mean)).sum::<f64>() / n.max(2.0);
        lengths.push(mean);
        mean_increments.push(inc_sum / inc_count as f64);
        stderrs.push((var / n).sqrt());
    }
    Ok(ScaleScan { dts: ladder.to_vec(), lengths, mean_increments, stderrs })
}

/// Fractal dimension fit, D_F = 1 - slope of log length against the log
/// spatial resolution. A Brownian ensemble gives 2, a straight line 1.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FractalFit {
    pub slope: f64,
    pub intercept: f64,
    pub d_f: f64,
    pub stderr: f64,
}

pub fn fit_fractal_dimension(scan: &ScaleScan) -> Result<FractalFit> {
    if scan.dts.len() < 5 {
        return Err(Error::ScaleLadder(format!(
            "need at least 5 fit points, got {}",
            scan.dts.len()
        )));
    }
    let xs: Vec<f64> = scan.mean_increments.iter().map(|e| e.ln()).collect();
    let ys: Vec<f64> = scan.lengths.iter().map(|l| l.ln()).collect();
    let (slope, intercept, stderr) = ols_slope(&xs, &ys);
    Ok(FractalFit { slope, intercept, d_f: 1.0 - slope, stderr })
}

/// De Broglie transition scale tau = hbar / (m v^2), with an explicit flag
/// for the drift-free (infinite tau) case.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TransitionScale {
    pub tau: f64,
    pub infinite: bool,
}

pub fn transition_scale(params: &PhysicalParams, v: f64) -> TransitionScale {
    if v == 0.0 {
        TransitionScale { tau: f64::INFINITY, infinite: true }
    } else {
        TransitionScale { tau: params.hbar() / (params.m * v * v), infinite: false }
    }
}

/// Scale decomposition of the velocity into a classical part v and a
/// resolution-dependent fluctuation amplitude w(dt).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VelocityDecomposition {
    /// Classical velocity: ensemble mean of the forward derivative at the
    /// coarsest resolution.
    pub v: f64,
    /// (dt, rms(f'+ - v)) per ladder entry.
    pub w: Vec<(f64, f64)>,
    pub tau: f64,
}

pub fn velocity_scale_decomposition(
    paths: &[FractalPath],
    tau: f64,
    ladder: &[f64],
) -> Result<VelocityDecomposition> {
    if paths.is_empty() {
        return Err(Error::EmptySelection);
    }
    if ladder.len() < 2 || ladder.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::ScaleLadder("need an increasing ladder".into()));
    }
    if tau.is_finite() && (ladder[0] >= tau || *ladder.last().unwrap() <= tau) {
        return Err(Error::ScaleLadder(format!(
            "ladder [{}, {}] does not span the transition scale {tau}",
            ladder[0],
            ladder.last().unwrap()
        )));
    }
    let coarsest = *ladder.last().unwrap();
    let mut v_sum = 0.0f64;
    let mut v_count = 0usize;
    for path in paths {
        let d = two_sided_derivative(&path.positions, path.delta, coarsest)?;
        v_sum += d.forward.iter().sum::<f64>();
        v_count += d.forward.len();
    }
    let v = v_sum / v_count as f64;
    let mut w = Vec::with_capacity(ladder.len());
    for &dt in ladder {
        let mut sq = 0.0f64;
        let mut count = 0usize;
        for path in paths {
            let d = two_sided_derivative(&path.positions, path.delta, dt)?;
            sq += d.forward.iter().map(|f| (f - v) * (f - v)).sum::<f64>();
            count += d.forward.len();
        }
        w.push((dt, (sq / count as f64).sqrt()));
    }
    Ok(VelocityDecomposition { v, w, tau })
}

/// Ensemble mean of (dX/dt)^2 at finite resolution; 2D/dt + v^2 in
/// expectation for constant-drift paths.
pub fn mean_square_velocity(paths: &[FractalPath], dt: f64) -> Result<f64> {
    if paths.is_empty() {
        return Err(Error::EmptySelection);
    }
    let mut sum = 0.0f64;
    let mut count = 0usize;
    for path in paths {
        for inc in path.increments(dt)? {
            let q = inc / dt;
            sum += q * q;
            count += 1;
        }
    }
    Ok(sum / count as f64)
}
