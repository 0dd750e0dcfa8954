use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

use crate::fields::{BoundaryCondition, ComplexField, Grid};
use crate::{Error, PhysicalParams, Result};

/// Analytic reference states with known energies and time dependence.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AnalyticState {
    /// `C exp(i k . r)` on a periodic grid; `k` must be a grid harmonic.
    PlaneWave { k: [f64; 2] },
    /// Gaussian packet `exp(-(r - x0)^2 / 4 sigma0^2 + i k0 . r)`.
    GaussianPacket { x0: [f64; 2], sigma0: [f64; 2], k0: [f64; 2] },
    /// 1-D harmonic-oscillator eigenstate of quantum number `n`.
    ShoEigenstate { n: usize, omega: f64 },
}

impl AnalyticState {
    pub fn plane_wave_1d(k: f64) -> Self {
        AnalyticState::PlaneWave { k: [k, 0.0] }
    }

    pub fn gaussian_1d(x0: f64, sigma0: f64, k0: f64) -> Self {
        AnalyticState::GaussianPacket { x0: [x0, 0.0], sigma0: [sigma0, 1.0], k0: [k0, 0.0] }
    }

    /// Energy of the state (plane wave / SHO exact; packet expectation).
    pub fn energy(&self, params: &PhysicalParams) -> f64 {
        let hbar = params.hbar();
        match self {
            AnalyticState::PlaneWave { k } => {
                let k2 = k[0] * k[0] + k[1] * k[1];
                hbar * hbar * k2 / (2.0 * params.m)
            }
            AnalyticState::ShoEigenstate { n, omega } => (*n as f64 + 0.5) * hbar * omega,
            AnalyticState::GaussianPacket { sigma0, k0, .. } => {
                let mut e = 0.0;
                for axis in 0..2 {
                    e += hbar * hbar / (8.0 * params.m * sigma0[axis] * sigma0[axis])
                        + hbar * hbar * k0[axis] * k0[axis] / (2.0 * params.m);
                }
                e
            }
        }
    }

    /// Angular frequency `E / hbar` (for a plane wave this is `hbar k^2 / 2m`).
    pub fn omega(&self, params: &PhysicalParams) -> f64 {
        self.energy(params) / params.hbar()
    }

    /// Sample the state at `t = 0`, normalized on the grid.
    pub fn sample(&self, grid: &Arc<Grid>, params: &PhysicalParams) -> Result<ComplexField> {
        let mut field = match self {
            AnalyticState::PlaneWave { k } => {
                if grid.bc() != BoundaryCondition::Periodic {
                    return Err(Error::Config("plane waves need a periodic grid".into()));
                }
                for axis in 0..grid.dims() {
                    let cycles = k[axis] * grid.period(axis) / (2.0 * std::f64::consts::PI);
                    if (cycles - cycles.round()).abs() > 1e-9 {
                        return Err(Error::Config(format!(
                            "k = {} is not a harmonic of the periodic grid (axis {axis})",
                            k[axis]
                        )));
                    }
                }
                let k = *k;
                ComplexField::from_fn(grid, 0.0, move |p| {
                    let phase = k[0] * p[0] + k[1] * p[1];
                    Complex64::from_polar(1.0, phase)
                })
            }
            AnalyticState::GaussianPacket { x0, sigma0, k0 } => {
                let (x0, s, k0) = (*x0, *sigma0, *k0);
                let dims = grid.dims();
                ComplexField::from_fn(grid, 0.0, move |p| {
                    let mut arg = 0.0;
                    let mut phase = 0.0;
                    for axis in 0..dims {
                        let d = p[axis] - x0[axis];
                        arg += d * d / (4.0 * s[axis] * s[axis]);
                        phase += k0[axis] * p[axis];
                    }
                    Complex64::from_polar((-arg).exp(), phase)
                })
            }
            AnalyticState::ShoEigenstate { n, omega } => {
                if grid.dims() != 1 {
                    return Err(Error::Config("SHO eigenstates are 1-D here".into()));
                }
                let values = sho_eigenfunction(grid, params, *n, *omega);
                ComplexField::new(grid.clone(), values, 0.0)?
            }
        };
        field.normalize()?;
        Ok(field)
    }
}

/// Normalized-oscillator eigenfunction via the stable three-term recurrence
/// on Hermite functions (not raw Hermite polynomials).
fn sho_eigenfunction(grid: &Arc<Grid>, params: &PhysicalParams, n: usize, omega: f64) -> Vec<Complex64> {
    let scale = (params.m * omega / params.hbar()).sqrt();
    (0..grid.num_nodes())
        .map(|idx| {
            let xi = grid.position(idx)[0] * scale;
            let mut prev = 0.0f64;
            let mut cur = (-0.5 * xi * xi).exp(); // up to normalization
            for level in 0..n {
                let next = (2.0 / (level as f64 + 1.0)).sqrt() * xi * cur
                    - (level as f64 / (level as f64 + 1.0)).sqrt() * prev;
                prev = cur;
                cur = next;
            }
            Complex64::new(cur, 0.0)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::BoundaryCondition;

    fn sho_grid() -> Arc<Grid> {
        Grid::new_1d(-10.0, 10.0, 513, BoundaryCondition::DirichletZero).unwrap()
    }

    #[test]
    fn plane_wave_dispersion_metadata() {
        let p = PhysicalParams::desk();
        let st = AnalyticState::plane_wave_1d(1.0);
        // omega = hbar k^2 / 2m = 0.5 for hbar = m = k = 1
        assert!((st.omega(&p) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn plane_wave_requires_matching_harmonic() {
        let p = PhysicalParams::desk();
        let g = Grid::new_1d(-8.0 * std::f64::consts::PI, 8.0 * std::f64::consts::PI, 512,
            BoundaryCondition::Periodic)
        .unwrap();
        assert!(AnalyticState::plane_wave_1d(1.0).sample(&g, &p).is_ok());
        assert!(AnalyticState::plane_wave_1d(1.05).sample(&g, &p).is_err());
    }

    #[test]
    fn sho_states_are_orthonormal_on_grid() {
        let p = PhysicalParams::desk();
        let g = sho_grid();
        let states: Vec<_> = (0..4)
            .map(|n| AnalyticState::ShoEigenstate { n, omega: 1.0 }.sample(&g, &p).unwrap())
            .collect();
        for a in 0..4 {
            for b in 0..4 {
                let ip = states[a].inner(&states[b]).unwrap();
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!(
                    (ip.norm() - expect).abs() < 1e-10,
                    "<{a}|{b}> = {ip}"
                );
            }
        }
    }

    #[test]
    fn sho_energies() {
        let p = PhysicalParams::desk();
        let st = AnalyticState::ShoEigenstate { n: 2, omega: 1.0 };
        assert!((st.energy(&p) - 2.5).abs() < 1e-14);
    }

    #[test]
    fn gaussian_is_normalized_and_centered() {
        let p = PhysicalParams::desk();
        let g = sho_grid();
        let psi = AnalyticState::gaussian_1d(1.0, 0.7, 2.0).sample(&g, &p).unwrap();
        assert!((psi.norm2() - 1.0).abs() < 1e-12);
        let mean_x = g.integrate(|idx| psi.values[idx].norm_sqr() * g.position(idx)[0]);
        assert!((mean_x - 1.0).abs() < 1e-10);
    }
}
