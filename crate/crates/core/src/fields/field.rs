use num_complex::Complex64;
use std::sync::Arc;

use super::Grid;
use crate::{Error, Result};

/// Complex scalar field sampled on a grid, with a time stamp.
#[derive(Debug, Clone)]
pub struct ComplexField {
    pub grid: Arc<Grid>,
    pub values: Vec<Complex64>,
    pub t: f64,
}

impl ComplexField {
    pub fn new(grid: Arc<Grid>, values: Vec<Complex64>, t: f64) -> Result<Self> {
        if values.len() != grid.num_nodes() {
            return Err(Error::GridMismatch(format!(
                "field has {} values, grid has {} nodes",
                values.len(),
                grid.num_nodes()
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::DegenerateState);
        }
        Ok(Self { grid, values, t })
    }

    pub fn from_fn(grid: &Arc<Grid>, t: f64, f: impl Fn([f64; 2]) -> Complex64) -> Self {
        let values = (0..grid.num_nodes()).map(|idx| f(grid.position(idx))).collect();
        Self { grid: grid.clone(), values, t }
    }

    pub fn zeros(grid: &Arc<Grid>, t: f64) -> Self {
        Self { grid: grid.clone(), values: vec![Complex64::new(0.0, 0.0); grid.num_nodes()], t }
    }

    /// Squared L2 norm, `int |psi|^2 dr` by trapezoidal quadrature.
    pub fn norm2(&self) -> f64 {
        self.grid.integrate(|idx| self.values[idx].norm_sqr())
    }

    /// Rescale to unit norm. Errors on an (almost) zero field.
    pub fn normalize(&mut self) -> Result<()> {
        let n2 = self.norm2();
        if !(n2 > 0.0) || !n2.is_finite() {
            return Err(Error::DegenerateState);
        }
        let s = 1.0 / n2.sqrt();
        for v in &mut self.values {
            *v *= s;
        }
        Ok(())
    }

    /// Inner product `<self|other>` (conjugate-linear in `self`).
    pub fn inner(&self, other: &ComplexField) -> Result<Complex64> {
        if !self.grid.same_layout(&other.grid) {
            return Err(Error::GridMismatch("inner product on different grids".into()));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for idx in 0..self.values.len() {
            acc += self.values[idx].conj() * other.values[idx] * self.grid.quad_weight(idx);
        }
        Ok(acc)
    }

    /// Probability density `|psi|^2` per node.
    pub fn density(&self) -> RealField {
        RealField {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v.norm_sqr()).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
            t: self.t,
        }
    }
}

/// Real scalar field on a grid.
#[derive(Debug, Clone)]
pub struct RealField {
    pub grid: Arc<Grid>,
    pub values: Vec<f64>,
}

impl RealField {
    pub fn new(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.num_nodes() {
            return Err(Error::GridMismatch(format!(
                "field has {} values, grid has {} nodes",
                values.len(),
                grid.num_nodes()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn([f64; 2]) -> f64) -> Self {
        let values = (0..grid.num_nodes()).map(|idx| f(grid.position(idx))).collect();
        Self { grid: grid.clone(), values }
    }

    pub fn zeros(grid: &Arc<Grid>) -> Self {
        Self { grid: grid.clone(), values: vec![0.0; grid.num_nodes()] }
    }

    pub fn integral(&self) -> f64 {
        self.grid.integrate(|idx| self.values[idx])
    }
}

/// Real vector field: one component field per grid dimension.
#[derive(Debug, Clone)]
pub struct RealVectorField {
    pub grid: Arc<Grid>,
    pub components: Vec<Vec<f64>>,
}

impl RealVectorField {
    pub fn zeros(grid: &Arc<Grid>) -> Self {
        Self {
            grid: grid.clone(),
            components: vec![vec![0.0; grid.num_nodes()]; grid.dims()],
        }
    }

    pub fn dims(&self) -> usize {
        self.components.len()
    }
}
