use serde::{Deserialize, Serialize};

use super::noise::NoiseSpec;
use crate::fields::stride_for;
use crate::{Error, PhysicalParams, Result};

/// Deterministic drift component of a generated path.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DriftSpec {
    Zero,
    /// Constant velocity v.
    Constant { v: f64 },
    /// Linear restoring drift, v(x) = -k x.
    Linear { k: f64 },
}

impl DriftSpec {
    fn at(&self, x: f64) -> f64 {
        match self {
            DriftSpec::Zero => 0.0,
            DriftSpec::Constant { v } => *v,
            DriftSpec::Linear { k } => -k * x,
        }
    }
}

/// One 1-D walker trajectory stored at the base step `delta` over [0, T],
/// resamplable at any coarser step dt = k delta.
#[derive(Debug, Clone)]
pub struct FractalPath {
    pub positions: Vec<f64>,
    pub delta: f64,
    pub params: PhysicalParams,
}

impl FractalPath {
    pub fn total_time(&self) -> f64 {
        (self.positions.len() - 1) as f64 * self.delta
    }

    /// Positions subsampled at dt = k delta.
    pub fn resample(&self, dt: f64) -> Result<Vec<f64>> {
        let stride = stride_for(self.delta, dt)?;
        if stride >= self.positions.len() {
            return Err(Error::ScaleLadder(format!(
                "resolution {dt} exceeds the path duration {}",
                self.total_time()
            )));
        }
        Ok(self.positions.iter().step_by(stride).copied().collect())
    }

    /// Increments of the path resampled at dt.
    pub fn increments(&self, dt: f64) -> Result<Vec<f64>> {
        let r = self.resample(dt)?;
        Ok(r.windows(2).map(|w| w[1] - w[0]).collect())
    }
}

/// Forward Euler-Maruyama path with the given drift law, base step delta and
/// duration t_total, driven by stream `walker` of the noise spec.
pub fn generate_fractal_path(
    drift: DriftSpec,
    params: &PhysicalParams,
    delta: f64,
    t_total: f64,
    spec: &NoiseSpec,
    walker: u64,
) -> Result<FractalPath> {
    if !(delta > 0.0) || !(t_total >= delta) {
        return Err(Error::Config("need 0 < delta <= T".into()));
    }
    let steps = (t_total / delta).round() as usize;
    let scale = (2.0 * params.d * delta).sqrt();
    let mut rng = spec.stream(walker);
    let mut x = 0.0f64;
    let mut positions = Vec::with_capacity(steps + 1);
    positions.push(x);
    for step in 0..steps {
        x += drift.at(x) * delta + spec.law.draw(&mut rng) * scale;
        if !x.is_finite() {
            return Err(Error::WalkerDiverged { index: walker as usize, t: step as f64 * delta });
        }
        positions.push(x);
    }
    Ok(FractalPath { positions, delta, params: *params })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geodesics::noise::NoiseLaw;

    fn desk() -> PhysicalParams {
        PhysicalParams::desk()
    }

    #[test]
    fn brownian_increment_variance() {
        let spec = NoiseSpec::new(NoiseLaw::Gaussian, 21);
        let delta = 1e-4;
        let mut sum2 = 0.0;
        let mut count = 0usize;
        for w in 0..20 {
            let path =
                generate_fractal_path(DriftSpec::Zero, &desk(), delta, 1.0, &spec, w).unwrap();
            for inc in path.increments(delta).unwrap() {
                sum2 += inc * inc;
                count += 1;
            }
        }
        let var = sum2 / count as f64;
        let expect = 2.0 * 0.5 * delta;
        assert!((var / expect - 1.0).abs() < 0.02, "variance {var} vs {expect}");
    }

    #[test]
    fn coarse_resample_variance_scales() {
        let spec = NoiseSpec::new(NoiseLaw::Uniform, 8);
        let delta = 1e-4;
        let mut sum2 = 0.0;
        let mut count = 0usize;
        for w in 0..20 {
            let path =
                generate_fractal_path(DriftSpec::Zero, &desk(), delta, 1.0, &spec, w).unwrap();
            for inc in path.increments(10.0 * delta).unwrap() {
                sum2 += inc * inc;
                count += 1;
            }
        }
        let var = sum2 / count as f64;
        let expect = 2.0 * 0.5 * 10.0 * delta;
        assert!((var / expect - 1.0).abs() < 0.05, "variance {var} vs {expect}");
    }

    #[test]
    fn deterministic_limit_is_straight() {
        let params = PhysicalParams { m: 1.0, d: 1e-6, c: 1.0 };
        let spec = NoiseSpec::new(NoiseLaw::Gaussian, 2);
        let path =
            generate_fractal_path(DriftSpec::Constant { v: 1.0 }, &params, 1e-3, 1.0, &spec, 0)
                .unwrap();
        let end = *path.positions.last().unwrap();
        assert!((end - 1.0).abs() < 0.02, "endpoint {end}");
    }

    #[test]
    fn resample_rejects_bad_scales() {
        let spec = NoiseSpec::new(NoiseLaw::Gaussian, 2);
        let path =
            generate_fractal_path(DriftSpec::Zero, &desk(), 1e-3, 0.1, &spec, 0).unwrap();
        assert!(path.resample(1e-3).is_ok());
        assert!(path.resample(1.5e-3).is_err()); // not a multiple of delta
        assert!(path.resample(0.2).is_err()); // longer than the path
    }

    #[test]
    fn paths_are_reproducible_per_stream() {
        let spec = NoiseSpec::new(NoiseLaw::Rademacher, 31);
        let a = generate_fractal_path(DriftSpec::Zero, &desk(), 1e-3, 0.5, &spec, 3).unwrap();
        let b = generate_fractal_path(DriftSpec::Zero, &desk(), 1e-3, 0.5, &spec, 3).unwrap();
        let c = generate_fractal_path(DriftSpec::Zero, &desk(), 1e-3, 0.5, &spec, 4).unwrap();
        assert_eq!(a.positions, b.positions);
        assert_ne!(a.positions, c.positions);
    }
}
