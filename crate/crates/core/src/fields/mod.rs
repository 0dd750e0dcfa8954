//! Grids, fields and finite-difference operators.

mod grid;
mod field;
pub mod ops;
mod timeseries;
pub mod io;

pub use field::{ComplexField, RealField, RealVectorField};
pub use grid::{BoundaryCondition, Grid};
pub use ops::{
    divergence, gradient, gradient_axis, gradient_real, gradient_real_axis, laplacian,
    laplacian_real, laplacian_values,
};
pub use timeseries::{stride_for, two_sided_derivative, TwoSidedDerivative};

pub use num_complex::Complex64;
