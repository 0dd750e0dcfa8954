use serde::{Deserialize, Serialize};

use super::ensemble::{
    compare_density, density_estimate, drift_fields, step_ensemble, WalkerEnsemble,
};
use super::noise::{NoiseLaw, NoiseSpec};
use crate::fields::{ComplexField, RealField};
use crate::hydro::decompose;
use crate::schrodinger::{CrankNicolson, PotentialSpec};
use crate::{PhysicalParams, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BornRunConfig {
    pub n_walkers: usize,
    pub laws: Vec<NoiseLaw>,
    pub seed: u64,
    /// Drift refresh cadence, in solver steps.
    pub refresh_every: usize,
    /// Mask threshold relative to max P; None for the decompose default.
    pub eps_rel: Option<f64>,
    /// Density smoothing bandwidth in length units, recorded in the report.
    pub smoothing: Option<f64>,
    /// L1 level above which the run is flagged under-sampled.
    pub l1_threshold: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LawOutcome {
    pub law: NoiseLaw,
    pub l1: f64,
    pub ks: f64,
}

/// Result of a Born-emergence run: walker densities against |psi|^2 per
/// noise law, and the pairwise distances between laws.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BornReport {
    pub outcomes: Vec<LawOutcome>,
    pub pairwise_l1: Vec<(String, String, f64)>,
    pub refresh_every: usize,
    pub smoothing: Option<f64>,
    pub under_sampled: bool,
    pub t_final: f64,
    pub n_walkers: usize,
}

impl BornReport {
    pub fn max_l1(&self) -> f64 {
        self.outcomes.iter().map(|o| o.l1).fold(0.0, f64::max)
    }

    pub fn max_pairwise_l1(&self) -> f64 {
        self.pairwise_l1.iter().map(|p| p.2).fold(0.0, f64::max)
    }
}

/// Co-evolve psi and one walker ensemble per noise law, walkers driven by
/// the forward drift v+ refreshed every `refresh_every` solver steps, then
/// compare the final walker densities with |psi|^2 and with each other.
pub fn born_emergence_run(
    psi0: &ComplexField,
    pot: &PotentialSpec,
    params: &PhysicalParams,
    dt: f64,
    steps: usize,
    cfg: &BornRunConfig,
) -> Result<BornReport> {
    let grid = psi0.grid.clone();
    let solver = CrankNicolson::new(&grid, pot, params, dt)?;
    let init_density = psi0.density();
    let mut ensembles: Vec<WalkerEnsemble> = cfg
        .laws
        .iter()
        .enumerate()
        .map(|(i, &law)| {
            let spec = NoiseSpec::new(law, cfg.seed.wrapping_add(i as u64));
            WalkerEnsemble::sample_from_density(&grid, &init_density, cfg.n_walkers, spec, params)
        })
        .collect::<Result<_>>()?;

    let mut psi = psi0.clone();
    let refresh = cfg.refresh_every.max(1);
    let mut drift = None;
    for step in 0..steps {
        if step % refresh == 0 {
            let hydro = decompose(&psi, params, cfg.eps_rel)?;
            drift = Some(drift_fields(&hydro)?.0);
        }
        let vplus = drift.as_ref().expect("drift initialized on step 0");
        for ens in &mut ensembles {
            step_ensemble(ens, vplus, dt)?;
        }
        solver.step(&mut psi, step)?;
    }

    let reference = psi.density();
    let estimates: Vec<RealField> = ensembles
        .iter()
        .map(|ens| density_estimate(ens, &grid, cfg.smoothing))
        .collect::<Result<_>>()?;
    let outcomes: Vec<LawOutcome> = cfg
        .laws
        .iter()
        .zip(&estimates)
        .map(|(&law, est)| {
            let m = compare_density(est, &reference)?;
            Ok(LawOutcome { law, l1: m.l1, ks: m.ks })
        })
        .collect::<Result<_>>()?;
    let mut pairwise_l1 = Vec::new();
    for a in 0..estimates.len() {
        for b in a + 1..estimates.len() {
            let m = compare_density(&estimates[a], &estimates[b])?;
            pairwise_l1.push((cfg.laws[a].name().into(), cfg.laws[b].name().into(), m.l1));
        }
    }
    let under_sampled = outcomes.iter().any(|o| o.l1 > cfg.l1_threshold);
    Ok(BornReport {
        outcomes,
        pairwise_l1,
        refresh_every: refresh,
        smoothing: cfg.smoothing,
        under_sampled,
        t_final: psi.t,
        n_walkers: cfg.n_walkers,
    })
}
