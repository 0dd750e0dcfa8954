use serde::{Deserialize, Serialize};
use std::sync::Arc;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryCondition {
    /// Field vanishes outside the domain; one-sided differences at the edges.
    DirichletZero,
    /// Domain wraps; node n is identified with node 0.
    Periodic,
}

/// Uniform 1-D or 2-D grid.
///
/// For Dirichlet grids the nodes span `[lower, upper]` inclusive with spacing
/// `h = (upper - lower) / (n - 1)`. For periodic grids the nodes span
/// `[lower, upper)` with spacing `h = (upper - lower) / n`, so that node `n`
/// coincides with node `0` one period away.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    dims: usize,
    lower: [f64; 2],
    upper: [f64; 2],
    n: [usize; 2],
    bc: BoundaryCondition,
}

impl Grid {
    pub fn new_1d(lower: f64, upper: f64, n: usize, bc: BoundaryCondition) -> Result<Arc<Self>> {
        Self::build(1, [lower, 0.0], [upper, 1.0], [n, 1], bc)
    }

    pub fn new_2d(
        lower: [f64; 2],
        upper: [f64; 2],
        n: [usize; 2],
        bc: BoundaryCondition,
    ) -> Result<Arc<Self>> {
        Self::build(2, lower, upper, n, bc)
    }

    fn build(
        dims: usize,
        lower: [f64; 2],
        upper: [f64; 2],
        n: [usize; 2],
        bc: BoundaryCondition,
    ) -> Result<Arc<Self>> {
        for axis in 0..dims {
            if n[axis] < 8 {
                return Err(Error::InvalidGrid(format!(
                    "axis {axis}: need at least 8 points, got {}",
                    n[axis]
                )));
            }
            if !(upper[axis] > lower[axis]) {
                return Err(Error::InvalidGrid(format!(
                    "axis {axis}: upper bound {} must exceed lower bound {}",
                    upper[axis], lower[axis]
                )));
            }
        }
        Ok(Arc::new(Self { dims, lower, upper, n, bc }))
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn bc(&self) -> BoundaryCondition {
        self.bc
    }

    pub fn n(&self, axis: usize) -> usize {
        self.n[axis]
    }

    pub fn lower(&self, axis: usize) -> f64 {
        self.lower[axis]
    }

    pub fn upper(&self, axis: usize) -> f64 {
        self.upper[axis]
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        let span = self.upper[axis] - self.lower[axis];
        match self.bc {
            BoundaryCondition::DirichletZero => span / (self.n[axis] - 1) as f64,
            BoundaryCondition::Periodic => span / self.n[axis] as f64,
        }
    }

    /// Domain length seen by a periodic wrap (equals `n * h`).
    pub fn period(&self, axis: usize) -> f64 {
        self.n[axis] as f64 * self.spacing(axis)
    }

    pub fn num_nodes(&self) -> usize {
        self.n[0] * self.n[1]
    }

    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        self.lower[axis] + i as f64 * self.spacing(axis)
    }

    /// Flat index; x runs fastest.
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.n[0] + i
    }

    /// Node position for a flat index.
    pub fn position(&self, idx: usize) -> [f64; 2] {
        let i = idx % self.n[0];
        let j = idx / self.n[0];
        [self.coord(0, i), if self.dims == 2 { self.coord(1, j) } else { 0.0 }]
    }

    /// Trapezoidal quadrature weight of a node (product over axes).
    pub fn quad_weight(&self, idx: usize) -> f64 {
        let i = idx % self.n[0];
        let j = idx / self.n[0];
        let mut w = self.axis_weight(0, i);
        if self.dims == 2 {
            w *= self.axis_weight(1, j);
        }
        w
    }

    fn axis_weight(&self, axis: usize, i: usize) -> f64 {
        let h = self.spacing(axis);
        match self.bc {
            BoundaryCondition::Periodic => h,
            BoundaryCondition::DirichletZero => {
                if i == 0 || i == self.n[axis] - 1 {
                    0.5 * h
                } else {
                    h
                }
            }
        }
    }

    /// Integrate a per-node sample with trapezoidal weights.
    pub fn integrate(&self, values: impl Fn(usize) -> f64) -> f64 {
        (0..self.num_nodes()).map(|idx| values(idx) * self.quad_weight(idx)).sum()
    }

    pub fn same_layout(&self, other: &Grid) -> bool {
        self == other
    }

    /// Wavenumber of the `mode`-th periodic harmonic, `2 pi mode / (n h)`.
    pub fn harmonic(&self, axis: usize, mode: i64) -> f64 {
        2.0 * std::f64::consts::PI * mode as f64 / self.period(axis)
    }
}
