use serde::{Deserialize, Serialize};

/// Physical constants of a run.
///
/// The stochastic fluctuation amplitude `d` fixes the effective Planck
/// constant through `hbar = 2 m d`, and together with the velocity constant
/// `c` it defines the length scale `lambda = 2 d / c = hbar / (m c)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Particle mass.
    pub m: f64,
    /// Fractal fluctuation parameter, `<d_xi^2> = 2 d dt` (length^2 / time).
    pub d: f64,
    /// Velocity constant used only for the length-scale identity.
    pub c: f64,
}

impl PhysicalParams {
    pub fn new(m: f64, d: f64, c: f64) -> crate::Result<Self> {
        if !(m > 0.0) || !(d > 0.0) || !(c > 0.0) {
            return Err(crate::Error::Config(format!(
                "physical parameters must be positive: m={m}, d={d}, c={c}"
            )));
        }
        Ok(Self { m, d, c })
    }

    /// Construct from a target `hbar` instead of `d`.
    pub fn from_hbar(m: f64, hbar: f64, c: f64) -> crate::Result<Self> {
        Self::new(m, hbar / (2.0 * m), c)
    }

    /// Effective Planck constant, `hbar = 2 m d` (exact arithmetic identity).
    pub fn hbar(&self) -> f64 {
        2.0 * self.m * self.d
    }

    /// Length scale `lambda = 2 d / c`.
    pub fn lambda(&self) -> f64 {
        2.0 * self.d / self.c
    }

    /// Convenience defaults for desk-scale runs: m = 1, hbar = 1 (d = 1/2), c = 1.
    pub fn desk() -> Self {
        Self { m: 1.0, d: 0.5, c: 1.0 }
    }
}
