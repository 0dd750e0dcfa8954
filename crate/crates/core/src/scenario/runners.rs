use std::time::Instant;

use serde::Serialize;

use super::config::{ScenarioConfig, ScenarioKind};
use super::manifest::{OutputWriter, RunManifest};
use super::two_slit::run_double_slit;
use crate::fields::io::{write_complex_binary, write_real_csv};
use crate::fields::{BoundaryCondition, ComplexField, Grid, RealField};
use crate::fractal::{
    fit_fractal_dimension, geometric_ladder, mean_square_velocity, ols_slope, scan_path_lengths,
};
use crate::geodesics::{
    born_emergence_run, generate_fractal_path, select_geodesics, BornRunConfig, DriftSpec,
    FractalPath, NoiseLaw, NoiseSpec, WalkerEnsemble,
};
use crate::hydro::{
    continuity_residual, decompose, euler_residual, write_hydro_csv, HydroFields, ResidualReport,
};
use crate::schrodinger::{
    expectation, project_measurement, region_probability, AnalyticState, CrankNicolson,
    Observable, PotentialSpec,
};
use crate::verify::{
    compton_relation_check, geodesic_equation_residual, hamiltonian_equivalence,
    remarkable_identity_residual, strong_covariance_check, IdentityReport,
};
use crate::{Error, Result};

pub struct ScenarioOutcome {
    pub pass: bool,
    pub flags: Vec<String>,
}

/// Runs one scenario end to end and writes the manifest. A mid-run failure
/// still leaves a manifest in the output directory, flagged incomplete.
pub fn run(cfg: &ScenarioConfig) -> Result<RunManifest> {
    cfg.validate()?;
    let start = Instant::now();
    let mut writer = OutputWriter::create(&cfg.out_dir)?;
    let outcome = dispatch(cfg, &mut writer);
    let (pass, flags, incomplete) = match &outcome {
        Ok(o) => (o.pass, o.flags.clone(), false),
        Err(e) => (false, vec![format!("error: {e}")], true),
    };
    let manifest = RunManifest {
        scenario: cfg.scenario.name().into(),
        config: cfg.echo(),
        version: env!("CARGO_PKG_VERSION").into(),
        wall_seconds: start.elapsed().as_secs_f64(),
        files: writer.into_files(),
        incomplete,
        pass,
        flags,
    };
    manifest.save(&cfg.out_dir)?;
    outcome?;
    Ok(manifest)
}

fn dispatch(cfg: &ScenarioConfig, w: &mut OutputWriter) -> Result<ScenarioOutcome> {
    match cfg.scenario {
        ScenarioKind::FreePacket => run_wave(cfg, w),
        ScenarioKind::PlaneWave => run_wave(cfg, w),
        ScenarioKind::Sho => run_wave(cfg, w),
        ScenarioKind::DoubleSlit => run_double_slit(cfg, w),
        ScenarioKind::BornEmergence => run_born(cfg, w),
        ScenarioKind::MeasurementRepeat => run_measurement(cfg, w),
        ScenarioKind::FractalScan => run_fractal_scan(cfg, w),
        ScenarioKind::VerifyAll => run_verify_all(cfg, w),
    }
}

pub(crate) fn grid_1d(cfg: &ScenarioConfig, bc: BoundaryCondition) -> Result<std::sync::Arc<Grid>> {
    Grid::new_1d(cfg.lower[0], cfg.upper[0], cfg.grid_n[0], bc)
}

fn initial_state(cfg: &ScenarioConfig) -> (AnalyticState, PotentialSpec, BoundaryCondition) {
    match cfg.scenario {
        ScenarioKind::PlaneWave => (
            AnalyticState::plane_wave_1d(cfg.k0),
            PotentialSpec::Free,
            BoundaryCondition::Periodic,
        ),
        ScenarioKind::Sho | ScenarioKind::VerifyAll => (
            AnalyticState::ShoEigenstate { n: 0, omega: cfg.omega },
            PotentialSpec::Harmonic { omega: cfg.omega },
            BoundaryCondition::DirichletZero,
        ),
        _ => (
            AnalyticState::gaussian_1d(cfg.x0, cfg.sigma, cfg.k0),
            PotentialSpec::Free,
            BoundaryCondition::DirichletZero,
        ),
    }
}

/// Evolves the configured state, recording a snapshot every `cadence` steps.
fn evolve_series(cfg: &ScenarioConfig) -> Result<(Vec<ComplexField>, PotentialSpec)> {
    let (state, pot, bc) = initial_state(cfg);
    let grid = grid_1d(cfg, bc)?;
    let solver = CrankNicolson::new(&grid, &pot, &cfg.params, cfg.dt)?;
    let mut psi = state.sample(&grid, &cfg.params)?;
    let mut series = vec![psi.clone()];
    let steps = cfg.steps();
    for s in 0..steps {
        solver.step(&mut psi, s)?;
        if (s + 1) % cfg.cadence == 0 || s + 1 == steps {
            series.push(psi.clone());
        }
    }
    Ok((series, pot))
}

#[derive(Serialize)]
struct WaveReport {
    norm_drift: f64,
    energy_drift_rel: f64,
    snapshots: usize,
    residuals: Vec<ResidualReport>,
    quantum_potential_balance: Option<f64>,
}

/// Shared runner for the pure wave scenarios: free-packet, plane-wave, sho.
fn run_wave(cfg: &ScenarioConfig, w: &mut OutputWriter) -> Result<ScenarioOutcome> {
    let (series, pot_spec) = evolve_series(cfg)?;
    let grid = series[0].grid.clone();
    let first = &series[0];
    let last = series.last().unwrap();
    let norm_drift = (last.norm2() - 1.0).abs();
    let e0 = expectation(first, &Observable::Hamiltonian(&pot_spec), &cfg.params)?.re;
    let e1 = expectation(last, &Observable::Hamiltonian(&pot_spec), &cfg.params)?.re;
    let energy_drift_rel = ((e1 - e0) / e0.abs().max(1e-300)).abs();

    let pot = pot_spec.evaluate(&grid, &cfg.params)?;
    let eps = Some(1e-6);
    // residuals need a uniform cadence; drop the final snapshot if the step
    // count was not a multiple of the cadence
    let uniform: Vec<&ComplexField> = if cfg.steps() % cfg.cadence == 0 {
        series.iter().collect()
    } else {
        series[..series.len() - 1].iter().collect()
    };
    let hydro: Vec<HydroFields> =
        uniform.iter().map(|psi| decompose(psi, &cfg.params, eps)).collect::<Result<_>>()?;
    let residuals = vec![continuity_residual(&hydro)?, euler_residual(&hydro, &pot, &cfg.params)?];

    let balance = if matches!(pot_spec, PotentialSpec::Harmonic { .. }) {
        // eigenstate balance, checked on the sampled state: Q amplifies
        // both the stencil error (growing as x^4 in the log-density
        // curvature) and any evolved-state contamination, so use the
        // initial state and a tighter mask than the residuals
        let h = decompose(first, &cfg.params, Some(1e-3))?;
        let e = cfg.params.hbar() * cfg.omega / 2.0;
        let mask = h.eroded_mask();
        let worst = (0..grid.num_nodes())
            .filter(|&i| mask[i])
            .map(|i| (h.q.values[i] + pot.values[i] - e).abs())
            .fold(0.0f64, f64::max);
        Some(worst)
    } else {
        None
    };

    let mut density_csv = Vec::new();
    write_real_csv(&mut density_csv, &last.density(), "p")?;
    w.write("density_final.csv", &density_csv)?;
    let mut psi_bin = Vec::new();
    write_complex_binary(&mut psi_bin, last)?;
    w.write("psi_final.bin", &psi_bin)?;
    let mut hydro_csv = Vec::new();
    write_hydro_csv(&mut hydro_csv, hydro.last().unwrap())?;
    w.write("hydro_final.csv", &hydro_csv)?;

    let report = WaveReport {
        norm_drift,
        energy_drift_rel,
        snapshots: series.len(),
        residuals,
        quantum_potential_balance: balance,
    };
    w.write_json("wave_report.json", &report)?;

    let mut flags = Vec::new();
    if norm_drift >= 1e-8 {
        flags.push(format!("norm drift {norm_drift:.3e}"));
    }
    if energy_drift_rel >= 1e-4 {
        flags.push(format!("energy drift {energy_drift_rel:.3e}"));
    }
    if let Some(b) = report.quantum_potential_balance {
        if b >= 1e-3 {
            flags.push(format!("quantum potential balance {b:.3e}"));
        }
    }
    let pass = flags.is_empty();
    Ok(ScenarioOutcome { pass, flags })
}

fn run_born(cfg: &ScenarioConfig, w: &mut OutputWriter) -> Result<ScenarioOutcome> {
    let grid = grid_1d(cfg, BoundaryCondition::DirichletZero)?;
    let pot = PotentialSpec::Harmonic { omega: cfg.omega };
    let psi0 =
        AnalyticState::ShoEigenstate { n: 0, omega: cfg.omega }.sample(&grid, &cfg.params)?;
    let born_cfg = BornRunConfig {
        n_walkers: cfg.walkers,
        laws: NoiseLaw::ALL.to_vec(),
        seed: cfg.seed,
        refresh_every: cfg.refresh_every,
        eps_rel: Some(1e-6),
        smoothing: cfg.smoothing,
        l1_threshold: cfg.l1_threshold,
    };
    let report = born_emergence_run(&psi0, &pot, &cfg.params, cfg.dt, cfg.steps(), &born_cfg)?;
    w.write_json("born_report.json", &report)?;

    let mut flags = Vec::new();
    // too few walkers to judge the density distance: flag, don't fail
    let pass = if report.under_sampled && cfg.walkers < 10_000 {
        flags.push("under-sampled".into());
        true
    } else {
        !report.under_sampled
    };
    Ok(ScenarioOutcome { pass, flags })
}

#[derive(Serialize)]
struct MeasurementReport {
    region_probability_first: f64,
    region_probability_repeat: f64,
    walkers_selected: usize,
    ensembles_identical: bool,
}

fn run_measurement(cfg: &ScenarioConfig, w: &mut OutputWriter) -> Result<ScenarioOutcome> {
    let grid = grid_1d(cfg, BoundaryCondition::DirichletZero)?;
    let psi =
        AnalyticState::ShoEigenstate { n: 0, omega: cfg.omega }.sample(&grid, &cfg.params)?;
    let region: Vec<bool> =
        (0..grid.num_nodes()).map(|idx| grid.position(idx)[0] < 0.0).collect();

    let spec = NoiseSpec { law: cfg.noise, seed: cfg.seed };
    let ens = WalkerEnsemble::sample_from_density(
        &grid,
        &psi.density(),
        cfg.walkers,
        spec,
        &cfg.params,
    )?;
    let p_first = region_probability(&psi, &region);
    let selected = select_geodesics(&ens, &region)?;
    let collapsed = project_measurement(&psi, &region)?;
    // immediate repeat of the same measurement on the collapsed state
    let p_repeat = region_probability(&collapsed, &region);
    let reselected = select_geodesics(&selected, &region)?;
    let identical = selected.positions == reselected.positions;

    let report = MeasurementReport {
        region_probability_first: p_first,
        region_probability_repeat: p_repeat,
        walkers_selected: selected.len(),
        ensembles_identical: identical,
    };
    w.write_json("measurement_report.json", &report)?;
    let mut density_csv = Vec::new();
    write_real_csv(&mut density_csv, &collapsed.density(), "p")?;
    w.write("collapsed_density.csv", &density_csv)?;

    let pass = (p_repeat - 1.0).abs() < 1e-10 && identical;
    Ok(ScenarioOutcome { pass, flags: Vec::new() })
}

#[derive(Serialize)]
struct FractalScanReport {
    d_f: f64,
    d_f_stderr: f64,
    control_d_f: f64,
    msv_slope: f64,
    ladder: Vec<f64>,
}

fn straight_paths(cfg: &ScenarioConfig) -> Vec<FractalPath> {
    let count = (cfg.t_total / cfg.delta).round() as usize;
    (0..5)
        .map(|k| FractalPath {
            positions: (0..=count).map(|i| (1.0 + 0.1 * k as f64) * i as f64 * cfg.delta).collect(),
            delta: cfg.delta,
            params: cfg.params.clone(),
        })
        .collect()
}

fn run_fractal_scan(cfg: &ScenarioConfig, w: &mut OutputWriter) -> Result<ScenarioOutcome> {
    let spec = NoiseSpec { law: cfg.noise, seed: cfg.seed };
    let paths: Vec<FractalPath> = (0..cfg.paths as u64)
        .map(|k| {
            generate_fractal_path(DriftSpec::Zero, &cfg.params, cfg.delta, cfg.t_total, &spec, k)
        })
        .collect::<Result<_>>()?;
    let ladder = geometric_ladder(4.0 * cfg.delta, 8);
    let scan = scan_path_lengths(&paths, &ladder)?;
    let fit = fit_fractal_dimension(&scan)?;
    let control_scan = scan_path_lengths(&straight_paths(cfg), &ladder)?;
    let control = fit_fractal_dimension(&control_scan)?;

    // mean-square velocity scaling over the same ladder
    let (logs_dt, logs_msv): (Vec<f64>, Vec<f64>) = ladder
        .iter()
        .map(|&dt| Ok((dt.ln(), mean_square_velocity(&paths, dt)?.ln())))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .unzip();
    let (msv_slope, _, _) = ols_slope(&logs_dt, &logs_msv);

    let mut csv = String::from("dt,length,stderr\n");
    for k in 0..scan.dts.len() {
        csv.push_str(&format!("{},{},{}\n", scan.dts[k], scan.lengths[k], scan.stderrs[k]));
    }
    w.write("scale_scan.csv", csv.as_bytes())?;
    w.write_json("fractal_fit.json", &fit)?;
    let report = FractalScanReport {
        d_f: fit.d_f,
        d_f_stderr: fit.stderr,
        control_d_f: control.d_f,
        msv_slope,
        ladder,
    };
    w.write_json("fractal_report.json", &report)?;

    let pass = (1.9..=2.1).contains(&report.d_f)
        && (0.95..=1.05).contains(&report.control_d_f)
        && (-1.05..=-0.95).contains(&report.msv_slope);
    Ok(ScenarioOutcome { pass, flags: Vec::new() })
}

fn run_verify_all(cfg: &ScenarioConfig, w: &mut OutputWriter) -> Result<ScenarioOutcome> {
    let (series, pot_spec) = evolve_series(cfg)?;
    let grid = series[0].grid.clone();
    let h = grid.spacing(0);
    let pot = pot_spec.evaluate(&grid, &cfg.params)?;
    let last = series.last().unwrap();
    // uniform triple for the time-differenced identities
    let triple = &series[..3.min(series.len())];
    if triple.len() < 3 {
        return Err(Error::Config("t_total too short for an identity triple".into()));
    }

    let smooth = RealField::from_fn(&grid, |p| 1.0 + 0.3 * p[0].sin());
    let mut reports = vec![
        compton_relation_check(&cfg.params),
        // tolerance constants calibrated on the default grids
        remarkable_identity_residual(&smooth, 0.7, 200.0 * h * h)?,
        strong_covariance_check(last, &pot, &cfg.params, 1e-10)?,
        hamiltonian_equivalence(triple, &pot, &cfg.params, 100.0 * h * h)?,
        geodesic_equation_residual(triple, &pot, &cfg.params, Some(1e-5), 100.0 * h * h)?,
    ];
    let hydro: Vec<HydroFields> =
        triple.iter().map(|psi| decompose(psi, &cfg.params, Some(1e-5))).collect::<Result<_>>()?;
    for rep in [continuity_residual(&hydro)?, euler_residual(&hydro, &pot, &cfg.params)?] {
        let tol = 100.0 * h * h;
        reports.push(IdentityReport {
            name: rep.name.clone(),
            norm_l2: rep.norm_l2,
            norm_max: rep.norm_max,
            h: rep.h,
            dt: rep.dt,
            order: None,
            pass: rep.norm_max <= tol,
        });
    }

    w.write_json("identity_reports.json", &reports)?;
    let pass = reports.iter().all(|r| r.pass);
    Ok(ScenarioOutcome { pass, flags: Vec::new() })
}
