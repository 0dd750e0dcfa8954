//! Second-order finite-difference operators shared by every module.
//!
//! All residual checks in the crate must use these stencils on both sides of
//! an identity, so discretization mismatch never masquerades as a physics
//! failure.

use num_complex::Complex64;
use std::ops::{Add, Mul, Sub};

use super::{BoundaryCondition, ComplexField, Grid, RealField, RealVectorField};

pub trait FieldScalar:
    Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
}
impl FieldScalar for f64 {}
impl FieldScalar for Complex64 {}

fn line_indices(grid: &Grid, axis: usize) -> Vec<(usize, usize, usize)> {
    // (start, stride, count) per grid line along `axis`
    let (nx, ny) = (grid.n(0), grid.n(1));
    match axis {
        0 => (0..ny).map(|j| (j * nx, 1, nx)).collect(),
        1 => (0..nx).map(|i| (i, nx, ny)).collect(),
        _ => panic!("axis out of range"),
    }
}

/// Componentwise first derivative along one axis. Central differences in the
/// interior, second-order one-sided at Dirichlet boundaries, wrap-around for
/// periodic grids.
pub fn derivative_axis<T: FieldScalar>(values: &[T], grid: &Grid, axis: usize) -> Vec<T> {
    let h = grid.spacing(axis);
    let inv2h = 1.0 / (2.0 * h);
    let mut out = vec![T::default(); values.len()];
    for (start, stride, count) in line_indices(grid, axis) {
        let at = |k: usize| values[start + k * stride];
        match grid.bc() {
            BoundaryCondition::Periodic => {
                for k in 0..count {
                    let kp = (k + 1) % count;
                    let km = (k + count - 1) % count;
                    out[start + k * stride] = (at(kp) - at(km)) * inv2h;
                }
            }
            BoundaryCondition::DirichletZero => {
                out[start] = (at(1) * 4.0 - at(2) - at(0) * 3.0) * inv2h;
                for k in 1..count - 1 {
                    out[start + k * stride] = (at(k + 1) - at(k - 1)) * inv2h;
                }
                out[start + (count - 1) * stride] =
                    (at(count - 1) * 3.0 - at(count - 2) * 4.0 + at(count - 3)) * inv2h;
            }
        }
    }
    out
}

/// Second derivative along one axis (3-point stencil). Dirichlet boundaries
/// use a zero ghost node.
pub fn second_derivative_axis<T: FieldScalar>(values: &[T], grid: &Grid, axis: usize) -> Vec<T> {
    let h = grid.spacing(axis);
    let inv_h2 = 1.0 / (h * h);
    let mut out = vec![T::default(); values.len()];
    for (start, stride, count) in line_indices(grid, axis) {
        let at = |k: usize| values[start + k * stride];
        for k in 0..count {
            let (fm, fp) = match grid.bc() {
                BoundaryCondition::Periodic => {
                    (at((k + count - 1) % count), at((k + 1) % count))
                }
                BoundaryCondition::DirichletZero => {
                    let fm = if k == 0 { T::default() } else { at(k - 1) };
                    let fp = if k == count - 1 { T::default() } else { at(k + 1) };
                    (fm, fp)
                }
            };
            out[start + k * stride] = (fm + fp - at(k) * 2.0) * inv_h2;
        }
    }
    out
}

/// Gradient of a complex field: one derivative slice per grid axis.
pub fn gradient(field: &ComplexField) -> Vec<Vec<Complex64>> {
    (0..field.grid.dims())
        .map(|axis| derivative_axis(&field.values, &field.grid, axis))
        .collect()
}

pub fn gradient_axis(field: &ComplexField, axis: usize) -> Vec<Complex64> {
    derivative_axis(&field.values, &field.grid, axis)
}

pub fn gradient_real(field: &RealField) -> RealVectorField {
    RealVectorField {
        grid: field.grid.clone(),
        components: (0..field.grid.dims())
            .map(|axis| derivative_axis(&field.values, &field.grid, axis))
            .collect(),
    }
}

pub fn gradient_real_axis(field: &RealField, axis: usize) -> Vec<f64> {
    derivative_axis(&field.values, &field.grid, axis)
}

/// Laplacian: sum of the per-axis second differences.
pub fn laplacian(field: &ComplexField) -> Vec<Complex64> {
    laplacian_values(&field.values, &field.grid)
}

pub fn laplacian_real(field: &RealField) -> Vec<f64> {
    laplacian_values(&field.values, &field.grid)
}

pub fn laplacian_values<T: FieldScalar>(values: &[T], grid: &Grid) -> Vec<T> {
    let mut out = second_derivative_axis(values, grid, 0);
    if grid.dims() == 2 {
        let dyy = second_derivative_axis(values, grid, 1);
        for (o, d) in out.iter_mut().zip(dyy) {
            *o = *o + d;
        }
    }
    out
}

/// Divergence of a vector of per-axis component slices.
pub fn divergence<T: FieldScalar>(components: &[Vec<T>], grid: &Grid) -> Vec<T> {
    let mut out = derivative_axis(&components[0], grid, 0);
    for axis in 1..grid.dims() {
        let d = derivative_axis(&components[axis], grid, axis);
        for (o, v) in out.iter_mut().zip(d) {
            *o = *o + v;
        }
    }
    out
}
