use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::str::FromStr;

use crate::{Error, Result};

/// Elementary noise law, normalized to mean 0 and variance 1 so the scaled
/// increment dxi = a sqrt(2 D dt) has variance 2 D dt for every law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseLaw {
    Gaussian,
    /// Uniform on [-sqrt(3), sqrt(3)].
    Uniform,
    /// +1 or -1, equiprobable.
    Rademacher,
}

impl NoiseLaw {
    pub const ALL: [NoiseLaw; 3] = [NoiseLaw::Gaussian, NoiseLaw::Uniform, NoiseLaw::Rademacher];

    pub fn name(&self) -> &'static str {
        match self {
            NoiseLaw::Gaussian => "gaussian",
            NoiseLaw::Uniform => "uniform",
            NoiseLaw::Rademacher => "rademacher",
        }
    }

    /// One normalized amplitude draw.
    pub fn draw(&self, rng: &mut impl Rng) -> f64 {
        match self {
            NoiseLaw::Gaussian => rng.sample::<f64, _>(rand_distr::StandardNormal),
            NoiseLaw::Uniform => rng.gen_range(-SQRT_3..SQRT_3),
            NoiseLaw::Rademacher => {
                if rng.gen::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }
}

const SQRT_3: f64 = 1.732_050_807_568_877_2;

impl FromStr for NoiseLaw {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(NoiseLaw::Gaussian),
            "uniform" => Ok(NoiseLaw::Uniform),
            "rademacher" => Ok(NoiseLaw::Rademacher),
            other => Err(Error::Config(format!(
                "unknown noise law '{other}' (expected gaussian, uniform or rademacher)"
            ))),
        }
    }
}

/// Noise law plus master seed; every walker derives its own stream from it.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub law: NoiseLaw,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(law: NoiseLaw, seed: u64) -> Self {
        Self { law, seed }
    }

    /// Independent generator for one walker: same master seed, per-walker
    /// stream. Byte-identical results no matter how work is scheduled.
    pub fn stream(&self, walker: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(walker);
        rng
    }
}

/// A batch of scaled increments, dxi = a sqrt(2 D dt).
pub fn sample_noise(spec: &NoiseSpec, count: usize, dt: f64, d: f64) -> Vec<f64> {
    let scale = (2.0 * d * dt).sqrt();
    let mut rng = spec.stream(0);
    (0..count).map(|_| spec.law.draw(&mut rng) * scale).collect()
}
