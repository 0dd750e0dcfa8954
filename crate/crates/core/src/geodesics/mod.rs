//! Stochastic geodesic ensembles: pluggable normalized noise, drift fields
//! derived from the wavefunction, walker stepping, density estimation,
//! measurement as sub-sampling, and single-path generation for scale
//! analysis.

mod born;
mod ensemble;
mod noise;
mod path;

pub use born::{born_emergence_run, BornReport, BornRunConfig, LawOutcome};
pub use ensemble::{
    compare_density, density_estimate, drift_fields, select_geodesics, step_ensemble,
    DensityMetrics, WalkerEnsemble,
};
pub use noise::{sample_noise, NoiseLaw, NoiseSpec};
pub use path::{generate_fractal_path, DriftSpec, FractalPath};
