use serde::{Deserialize, Serialize};
use std::sync::Arc;

use crate::fields::{Grid, RealField};
use crate::{Error, PhysicalParams, Result};

/// External scalar potential of a scenario.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PotentialSpec {
    Free,
    /// `m omega^2 r^2 / 2`
    Harmonic { omega: f64 },
    /// Rectangular barrier across the y axis with one or two slit openings.
    ///
    /// The wall occupies `|y - wall_center| <= wall_width / 2`; slits are
    /// centered at `x = +/- separation / 2` with the given width. Either slit
    /// can be closed for control runs.
    DoubleSlitBarrier {
        height: f64,
        wall_center: f64,
        wall_width: f64,
        separation: f64,
        slit_width: f64,
        open_left: bool,
        open_right: bool,
    },
    /// Tabulated per-node values (no serde; built programmatically).
    #[serde(skip)]
    Custom(RealField),
}

impl PotentialSpec {
    /// Sample the potential on a grid.
    pub fn evaluate(&self, grid: &Arc<Grid>, params: &PhysicalParams) -> Result<RealField> {
        match self {
            PotentialSpec::Free => Ok(RealField::zeros(grid)),
            PotentialSpec::Harmonic { omega } => {
                if !(*omega > 0.0) {
                    return Err(Error::Config(format!("harmonic omega must be > 0, got {omega}")));
                }
                let k = 0.5 * params.m * omega * omega;
                Ok(RealField::from_fn(grid, |p| {
                    let mut r2 = p[0] * p[0];
                    if grid.dims() == 2 {
                        r2 += p[1] * p[1];
                    }
                    k * r2
                }))
            }
            PotentialSpec::DoubleSlitBarrier {
                height,
                wall_center,
                wall_width,
                separation,
                slit_width,
                open_left,
                open_right,
            } => {
                if grid.dims() != 2 {
                    return Err(Error::Config("double-slit barrier needs a 2-D grid".into()));
                }
                if !(*height > 0.0) || !(*wall_width > 0.0) || !(*slit_width > 0.0) {
                    return Err(Error::Config("barrier height/widths must be positive".into()));
                }
                let y_lo = wall_center - 0.5 * wall_width;
                let y_hi = wall_center + 0.5 * wall_width;
                let x_reach = 0.5 * separation + 0.5 * slit_width;
                if y_lo < grid.lower(1) || y_hi > grid.upper(1) || x_reach > grid.upper(0)
                    || -x_reach < grid.lower(0)
                {
                    return Err(Error::Config("barrier geometry does not fit inside grid".into()));
                }
                let (sep, a, h) = (*separation, *slit_width, *height);
                let (ol, or_) = (*open_left, *open_right);
                Ok(RealField::from_fn(grid, move |p| {
                    let (x, y) = (p[0], p[1]);
                    if y < y_lo || y > y_hi {
                        return 0.0;
                    }
                    let in_left = (x + 0.5 * sep).abs() <= 0.5 * a;
                    let in_right = (x - 0.5 * sep).abs() <= 0.5 * a;
                    if (ol && in_left) || (or_ && in_right) {
                        0.0
                    } else {
                        h
                    }
                }))
            }
            PotentialSpec::Custom(field) => {
                if !field.grid.same_layout(grid) {
                    return Err(Error::GridMismatch("custom potential grid".into()));
                }
                Ok(field.clone())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::BoundaryCondition;

    #[test]
    fn harmonic_is_parabolic() {
        let g = Grid::new_1d(-5.0, 5.0, 65, BoundaryCondition::DirichletZero).unwrap();
        let p = PhysicalParams::desk();
        let v = PotentialSpec::Harmonic { omega: 2.0 }.evaluate(&g, &p).unwrap();
        let x = g.coord(0, 10);
        assert!((v.values[10] - 2.0 * x * x).abs() < 1e-12);
    }

    #[test]
    fn barrier_fits_or_errors() {
        let p = PhysicalParams::desk();
        let g = Grid::new_2d([-4.0, -4.0], [4.0, 4.0], [32, 32], BoundaryCondition::DirichletZero)
            .unwrap();
        let spec = PotentialSpec::DoubleSlitBarrier {
            height: 100.0,
            wall_center: 0.0,
            wall_width: 0.5,
            separation: 12.0, // wider than the domain
            slit_width: 0.4,
            open_left: true,
            open_right: true,
        };
        assert!(spec.evaluate(&g, &p).is_err());
    }

    #[test]
    fn barrier_blocks_wall_and_opens_slits() {
        let p = PhysicalParams::desk();
        let g = Grid::new_2d([-4.0, -4.0], [4.0, 4.0], [81, 81], BoundaryCondition::DirichletZero)
            .unwrap();
        let spec = PotentialSpec::DoubleSlitBarrier {
            height: 50.0,
            wall_center: 0.0,
            wall_width: 0.4,
            separation: 2.0,
            slit_width: 0.5,
            open_left: true,
            open_right: false,
        };
        let v = spec.evaluate(&g, &p).unwrap();
        let at = |x: f64, y: f64| {
            let i = ((x - g.lower(0)) / g.spacing(0)).round() as usize;
            let j = ((y - g.lower(1)) / g.spacing(1)).round() as usize;
            v.values[g.index(i, j)]
        };
        assert_eq!(at(-1.0, 0.0), 0.0); // open left slit
        assert_eq!(at(1.0, 0.0), 50.0); // closed right slit
        assert_eq!(at(0.0, 0.0), 50.0); // wall between the slits
        assert_eq!(at(0.0, 2.0), 0.0); // free space away from the wall
    }
}
