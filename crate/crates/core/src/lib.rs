//! Numerical laboratory for stochastic-geodesic quantum mechanics.
//!
//! The crate is organized around a chain of representations of the same
//! dynamics:
//!
//! * [`fields`] - uniform grids, complex/real fields, finite-difference
//!   operators, two-sided derivatives of sampled paths.
//! * [`schrodinger`] - unitary Crank-Nicolson evolution, analytic reference
//!   states, quantum operators and measurement projection.
//! * [`hydro`] - the Madelung fluid form: density, phase, real/imaginary
//!   velocity fields, quantum potential, continuity/Euler residuals.
//! * [`geodesics`] - stochastic walker ensembles driven by wavefunction
//!   drifts plus normalized noise; density estimation and sub-sampling.
//! * [`fractal`] - scale-law analysis of stored paths: length divergence,
//!   fractal-dimension fits, velocity scale decomposition.
//! * [`verify`] - residual checks of the identities linking the geodesic
//!   equation, the Hamilton-Jacobi form and the Schrodinger equation.
//! * [`scenario`] - configuration, scenario runners, manifests and plot
//!   emission backing the `scalerel` command-line tool.

pub mod error;
pub mod fields;
pub mod fractal;
pub mod geodesics;
pub mod hydro;
pub mod params;
pub mod scenario;
pub mod schrodinger;
pub mod verify;

pub use error::{Error, Result};
pub use params::PhysicalParams;
