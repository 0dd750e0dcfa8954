//! Unitary time-dependent Schrodinger integration, analytic reference
//! states, quantum operators and measurement projection.

mod measure;
mod operators;
mod potential;
mod solver;
mod states;

pub use measure::{project_measurement, region_probability};
pub use operators::{
    apply_hamiltonian, apply_kinetic, apply_momentum, commutator_residual,
    eigenbasis_coefficients, expectation, uncertainty_product, Observable,
};
pub use potential::PotentialSpec;
pub use solver::{evolve, CrankNicolson};
pub use states::AnalyticState;
