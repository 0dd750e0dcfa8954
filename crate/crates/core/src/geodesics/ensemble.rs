use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::sync::Arc;

use super::noise::NoiseSpec;
use crate::fields::{BoundaryCondition, Grid, RealField, RealVectorField};
use crate::hydro::HydroFields;
use crate::{Error, PhysicalParams, Result};

/// Forward and backward drift fields, v+- = V +- U, with masked nodes filled
/// from the nearest valid node so walkers in density tails see a finite drift.
pub fn drift_fields(hydro: &HydroFields) -> Result<(RealVectorField, RealVectorField)> {
    if !hydro.valid.iter().any(|&v| v) {
        return Err(Error::DecompositionDegenerate { masked_fraction: 1.0 });
    }
    let grid = &hydro.p.grid;
    let fill = nearest_valid_map(&hydro.valid, grid);
    let mut vp = RealVectorField::zeros(grid);
    let mut vm = RealVectorField::zeros(grid);
    for axis in 0..grid.dims() {
        for idx in 0..grid.num_nodes() {
            let src = fill[idx];
            let v = hydro.v.components[axis][src];
            let u = hydro.u.components[axis][src];
            vp.components[axis][idx] = v + u;
            vm.components[axis][idx] = v - u;
        }
    }
    Ok((vp, vm))
}

/// For every node, the index of the nearest valid node (itself when valid).
/// Sweeps along x within each row, then patches still-unfilled rows from the
/// nearest filled row in y.
fn nearest_valid_map(valid: &[bool], grid: &Grid) -> Vec<usize> {
    let (nx, ny) = (grid.n(0), grid.n(1));
    let mut map: Vec<Option<usize>> = vec![None; valid.len()];
    for j in 0..ny {
        let row: Vec<usize> = (0..nx).filter(|&i| valid[grid.index(i, j)]).collect();
        if row.is_empty() {
            continue;
        }
        for i in 0..nx {
            let pos = row.partition_point(|&r| r < i);
            let mut best = row[pos.min(row.len() - 1)];
            if pos > 0 && i.abs_diff(row[pos - 1]) < i.abs_diff(best) {
                best = row[pos - 1];
            }
            map[grid.index(i, j)] = Some(grid.index(best, j));
        }
    }
    // rows without any valid node borrow the nearest filled row wholesale
    let filled: Vec<usize> = (0..ny).filter(|&j| map[grid.index(0, j)].is_some()).collect();
    for j in 0..ny {
        if map[grid.index(0, j)].is_none() {
            let pos = filled.partition_point(|&r| r < j);
            let mut src = filled[pos.min(filled.len() - 1)];
            if pos > 0 && j.abs_diff(filled[pos - 1]) < j.abs_diff(src) {
                src = filled[pos - 1];
            }
            for i in 0..nx {
                map[grid.index(i, j)] = map[grid.index(i, src)];
            }
        }
    }
    map.into_iter().map(|m| m.expect("at least one valid node")).collect()
}

/// Multilinear interpolation of one drift component at an off-grid position.
pub(crate) fn interpolate(values: &[f64], grid: &Grid, pos: [f64; 2]) -> f64 {
    let mut weights = [[0.0f64; 2]; 2];
    let mut nodes = [[0usize; 2]; 2];
    for axis in 0..grid.dims() {
        let h = grid.spacing(axis);
        let n = grid.n(axis);
        let s = (pos[axis] - grid.lower(axis)) / h;
        match grid.bc() {
            BoundaryCondition::Periodic => {
                let s = s.rem_euclid(n as f64);
                let i0 = s.floor() as usize % n;
                let frac = s - s.floor();
                nodes[axis] = [i0, (i0 + 1) % n];
                weights[axis] = [1.0 - frac, frac];
            }
            BoundaryCondition::DirichletZero => {
                let s = s.clamp(0.0, (n - 1) as f64);
                let i0 = (s.floor() as usize).min(n - 2);
                let frac = s - i0 as f64;
                nodes[axis] = [i0, i0 + 1];
                weights[axis] = [1.0 - frac, frac];
            }
        }
    }
    if grid.dims() == 1 {
        weights[0][0] * values[nodes[0][0]] + weights[0][1] * values[nodes[0][1]]
    } else {
        let mut acc = 0.0;
        for (wa, ia) in weights[0].iter().zip(nodes[0]) {
            for (wb, ib) in weights[1].iter().zip(nodes[1]) {
                acc += wa * wb * values[grid.index(ia, ib)];
            }
        }
        acc
    }
}

fn apply_boundary(x: f64, lower: f64, upper: f64, bc: BoundaryCondition) -> f64 {
    match bc {
        BoundaryCondition::Periodic => lower + (x - lower).rem_euclid(upper - lower),
        BoundaryCondition::DirichletZero => {
            // reflect back into the domain, folding as often as needed
            let span = upper - lower;
            let mut s = (x - lower).rem_euclid(2.0 * span);
            if s > span {
                s = 2.0 * span - s;
            }
            lower + s
        }
    }
}

/// Ensemble of independent walkers with one RNG stream per walker.
#[derive(Debug, Clone)]
pub struct WalkerEnsemble {
    pub grid: Arc<Grid>,
    pub positions: Vec<[f64; 2]>,
    pub t: f64,
    pub params: PhysicalParams,
    pub spec: NoiseSpec,
    rngs: Vec<ChaCha8Rng>,
}

impl WalkerEnsemble {
    /// Walkers at explicit starting positions.
    pub fn from_positions(
        grid: &Arc<Grid>,
        positions: Vec<[f64; 2]>,
        spec: NoiseSpec,
        params: &PhysicalParams,
    ) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::EmptySelection);
        }
        let rngs = (0..positions.len()).map(|w| spec.stream(w as u64)).collect();
        Ok(Self { grid: grid.clone(), positions, t: 0.0, params: *params, spec, rngs })
    }

    /// Walkers sampled from a density on the grid by inverse-CDF over nodes,
    /// uniform within each node cell.
    pub fn sample_from_density(
        grid: &Arc<Grid>,
        density: &RealField,
        n: usize,
        spec: NoiseSpec,
        params: &PhysicalParams,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptySelection);
        }
        let total: f64 = (0..grid.num_nodes())
            .map(|idx| density.values[idx].max(0.0) * grid.quad_weight(idx))
            .sum();
        if !(total > 0.0) {
            return Err(Error::NonPositiveField);
        }
        let cdf: Vec<f64> = {
            let mut acc = 0.0;
            (0..grid.num_nodes())
                .map(|idx| {
                    acc += density.values[idx].max(0.0) * grid.quad_weight(idx) / total;
                    acc
                })
                .collect()
        };
        let mut rngs: Vec<ChaCha8Rng> = (0..n).map(|w| spec.stream(w as u64)).collect();
        let positions = rngs
            .iter_mut()
            .map(|rng| {
                let u: f64 = rng.gen();
                let idx = cdf.partition_point(|&c| c < u).min(grid.num_nodes() - 1);
                let mut pos = grid.position(idx);
                for axis in 0..grid.dims() {
                    let h = grid.spacing(axis);
                    let jitter: f64 = rng.gen_range(-0.5..0.5);
                    pos[axis] = apply_boundary(
                        pos[axis] + jitter * h,
                        grid.lower(axis),
                        grid.upper(axis),
                        grid.bc(),
                    );
                }
                pos
            })
            .collect();
        Ok(Self { grid: grid.clone(), positions, t: 0.0, params: *params, spec, rngs })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// One forward Euler-Maruyama step, dX = v+ dt + a sqrt(2 D dt), for every
/// walker. Deterministic for a fixed seed regardless of thread count.
pub fn step_ensemble(ens: &mut WalkerEnsemble, drift: &RealVectorField, dt: f64) -> Result<()> {
    if !ens.grid.same_layout(&drift.grid) {
        return Err(Error::GridMismatch("drift grid".into()));
    }
    if !(dt > 0.0) {
        return Err(Error::Config("walker step must be positive".into()));
    }
    let grid = ens.grid.clone();
    let params = ens.params;
    let law = ens.spec.law;
    let scale = (2.0 * params.d * dt).sqrt();
    let t = ens.t;
    let bad = ens
        .positions
        .par_iter_mut()
        .zip(ens.rngs.par_iter_mut())
        .enumerate()
        .map(|(w, (pos, rng))| {
            let mut next = *pos;
            for axis in 0..grid.dims() {
                let v = interpolate(&drift.components[axis], &grid, *pos);
                next[axis] += v * dt + law.draw(rng) * scale;
            }
            for axis in 0..grid.dims() {
                if !next[axis].is_finite() {
                    return Some(w);
                }
                next[axis] = apply_boundary(
                    next[axis],
                    grid.lower(axis),
                    grid.upper(axis),
                    grid.bc(),
                );
            }
            *pos = next;
            None
        })
        .reduce(|| None, |a, b| a.or(b));
    if let Some(index) = bad {
        return Err(Error::WalkerDiverged { index, t });
    }
    ens.t += dt;
    Ok(())
}

/// Histogram density on the grid nodes, normalized so the trapezoidal
/// integral is exactly one. Optional Gaussian smoothing with the bandwidth
/// (in length units) recorded by the caller.
pub fn density_estimate(
    ens: &WalkerEnsemble,
    grid: &Arc<Grid>,
    bandwidth: Option<f64>,
) -> Result<RealField> {
    if ens.is_empty() {
        return Err(Error::EmptySelection);
    }
    let mut counts = vec![0u64; grid.num_nodes()];
    for pos in &ens.positions {
        let mut ij = [0usize; 2];
        for axis in 0..grid.dims() {
            let h = grid.spacing(axis);
            let n = grid.n(axis);
            let s = ((pos[axis] - grid.lower(axis)) / h).round();
            ij[axis] = match grid.bc() {
                BoundaryCondition::Periodic => (s.rem_euclid(n as f64)) as usize % n,
                BoundaryCondition::DirichletZero => (s.max(0.0) as usize).min(n - 1),
            };
        }
        counts[grid.index(ij[0], ij[1])] += 1;
    }
    let n = ens.len() as f64;
    let mut values: Vec<f64> = (0..grid.num_nodes())
        .map(|idx| counts[idx] as f64 / (n * grid.quad_weight(idx)))
        .collect();
    if let Some(sigma) = bandwidth {
        for axis in 0..grid.dims() {
            values = smooth_axis(&values, grid, axis, sigma);
        }
        let total = grid.integrate(|idx| values[idx]);
        for v in &mut values {
            *v /= total;
        }
    }
    RealField::new(grid.clone(), values)
}

/// Discrete Gaussian smoothing along one axis (kernel renormalized per node,
/// so Dirichlet edges keep mass).
fn smooth_axis(values: &[f64], grid: &Grid, axis: usize, sigma: f64) -> Vec<f64> {
    let h = grid.spacing(axis);
    let radius = ((3.0 * sigma / h).ceil() as i64).max(1);
    let kernel: Vec<f64> = (-radius..=radius)
        .map(|k| (-0.5 * (k as f64 * h / sigma).powi(2)).exp())
        .collect();
    let (nx, ny) = (grid.n(0), grid.n(1));
    let count = grid.n(axis) as i64;
    let mut out = vec![0.0f64; values.len()];
    for j in 0..ny {
        for i in 0..nx {
            let idx = grid.index(i, j);
            let along = if axis == 0 { i as i64 } else { j as i64 };
            let mut acc = 0.0;
            let mut wsum = 0.0;
            for (ki, w) in kernel.iter().enumerate() {
                let k = along + ki as i64 - radius;
                let k = match grid.bc() {
                    BoundaryCondition::Periodic => k.rem_euclid(count),
                    BoundaryCondition::DirichletZero => {
                        if k < 0 || k >= count {
                            continue;
                        }
                        k
                    }
                } as usize;
                let src = if axis == 0 { grid.index(k, j) } else { grid.index(i, k) };
                acc += w * values[src];
                wsum += w;
            }
            out[idx] = acc / wsum;
        }
    }
    out
}

/// L1 and Kolmogorov-Smirnov distances between two densities on one grid.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct DensityMetrics {
    pub l1: f64,
    pub ks: f64,
}

pub fn compare_density(estimate: &RealField, reference: &RealField) -> Result<DensityMetrics> {
    let grid = &estimate.grid;
    if !grid.same_layout(&reference.grid) {
        return Err(Error::GridMismatch("density comparison".into()));
    }
    let l1 = grid.integrate(|idx| (estimate.values[idx] - reference.values[idx]).abs());
    let (mut ca, mut cb, mut ks) = (0.0f64, 0.0f64, 0.0f64);
    for idx in 0..grid.num_nodes() {
        let w = grid.quad_weight(idx);
        ca += estimate.values[idx] * w;
        cb += reference.values[idx] * w;
        ks = ks.max((ca - cb).abs());
    }
    Ok(DensityMetrics { l1, ks })
}

/// Geodesic sub-sampling: keep only the walkers whose nearest grid node lies
/// in the region. The surviving walkers keep their RNG streams, so repeating
/// the selection is the identity.
pub fn select_geodesics(ens: &WalkerEnsemble, region: &[bool]) -> Result<WalkerEnsemble> {
    if region.len() != ens.grid.num_nodes() {
        return Err(Error::GridMismatch("selection region".into()));
    }
    let grid = &ens.grid;
    let mut positions = Vec::new();
    let mut rngs = Vec::new();
    for (pos, rng) in ens.positions.iter().zip(&ens.rngs) {
        let mut ij = [0usize; 2];
        for axis in 0..grid.dims() {
            let h = grid.spacing(axis);
            let s = ((pos[axis] - grid.lower(axis)) / h).round();
            ij[axis] = (s.max(0.0) as usize).min(grid.n(axis) - 1);
        }
        if region[grid.index(ij[0], ij[1])] {
            positions.push(*pos);
            rngs.push(rng.clone());
        }
    }
    if positions.is_empty() {
        return Err(Error::MeasurementImpossible);
    }
    Ok(WalkerEnsemble {
        grid: ens.grid.clone(),
        positions,
        t: ens.t,
        params: ens.params,
        spec: ens.spec,
        rngs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geodesics::noise::NoiseLaw;
    use crate::hydro::decompose;
    use crate::schrodinger::AnalyticState;

    fn desk() -> PhysicalParams {
        PhysicalParams::desk()
    }

    fn sho_grid(n: usize) -> Arc<Grid> {
        Grid::new_1d(-10.0, 10.0, n, BoundaryCondition::DirichletZero).unwrap()
    }

    #[test]
    fn drift_fields_sho_ground_state() {
        // V = 0, U = -x, so v+ = -x and v- = +x
        let p = desk();
        let g = sho_grid(1025);
        let h = g.spacing(0);
        let psi = AnalyticState::ShoEigenstate { n: 0, omega: 1.0 }.sample(&g, &p).unwrap();
        let hydro = decompose(&psi, &p, Some(1e-6)).unwrap();
        let (vp, vm) = drift_fields(&hydro).unwrap();
        let mask = hydro.eroded_mask();
        for idx in 0..g.num_nodes() {
            if !mask[idx] {
                continue;
            }
            let x = g.position(idx)[0];
            let tol = 10.0 * h * h * (1.0 + x.abs().powi(3));
            assert!((vp.components[0][idx] + x).abs() < tol, "v+({x})");
            assert!((vm.components[0][idx] - x).abs() < tol, "v-({x})");
        }
        // masked tail nodes hold the nearest valid drift, hence stay finite
        assert!(vp.components[0].iter().all(|v| v.is_finite()));
        let edge = vp.components[0][0];
        assert!(edge.abs() < 10.0, "tail fill {edge}");
    }

    #[test]
    fn drift_fields_plane_wave() {
        let p = desk();
        let g = Grid::new_1d(
            -8.0 * std::f64::consts::PI,
            8.0 * std::f64::consts::PI,
            256,
            BoundaryCondition::Periodic,
        )
        .unwrap();
        let psi = AnalyticState::plane_wave_1d(1.0).sample(&g, &p).unwrap();
        let hydro = decompose(&psi, &p, None).unwrap();
        let (vp, vm) = drift_fields(&hydro).unwrap();
        let h = g.spacing(0);
        for idx in 0..g.num_nodes() {
            assert!((vp.components[0][idx] - 1.0).abs() < h * h);
            assert!((vm.components[0][idx] - 1.0).abs() < h * h);
        }
    }

    #[test]
    fn constant_drift_mean_displacement() {
        let p = PhysicalParams { m: 1.0, d: 1e-4, c: 1.0 };
        let g = sho_grid(257);
        let spec = NoiseSpec::new(NoiseLaw::Gaussian, 11);
        let n = 20_000;
        let mut ens =
            WalkerEnsemble::from_positions(&g, vec![[0.0, 0.0]; n], spec, &p).unwrap();
        let mut drift = RealVectorField::zeros(&g);
        drift.components[0].iter_mut().for_each(|v| *v = 0.7);
        let dt = 0.01;
        for _ in 0..10 {
            step_ensemble(&mut ens, &drift, dt).unwrap();
        }
        let mean: f64 =
            ens.positions.iter().map(|p| p[0]).sum::<f64>() / n as f64;
        let sigma = (2.0 * p.d * 10.0 * dt).sqrt();
        assert!((mean - 0.07).abs() < 3.0 * sigma / (n as f64).sqrt() + 1e-12, "mean {mean}");
        assert!((ens.t - 0.1).abs() < 1e-12);
    }

    #[test]
    fn ou_drift_reaches_analytic_stationary_variance() {
        // dX = -X dt + sqrt(2 D dt) a has stationary variance D (here 0.5)
        let p = desk();
        let g = sho_grid(513);
        let spec = NoiseSpec::new(NoiseLaw::Gaussian, 23);
        let n = 100_000;
        let mut ens =
            WalkerEnsemble::from_positions(&g, vec![[0.0, 0.0]; n], spec, &p).unwrap();
        let mut drift = RealVectorField::zeros(&g);
        for idx in 0..g.num_nodes() {
            drift.components[0][idx] = -g.position(idx)[0];
        }
        let dt = 5e-3;
        for _ in 0..1600 {
            step_ensemble(&mut ens, &drift, dt).unwrap();
        }
        let var: f64 =
            ens.positions.iter().map(|p| p[0] * p[0]).sum::<f64>() / n as f64;
        // Euler-Maruyama fixed point is D/(1 - dt/2), slightly above D
        let expect = p.d / (1.0 - dt / 2.0);
        assert!((var / expect - 1.0).abs() < 0.02, "variance {var} vs {expect}");
    }

    #[test]
    fn rademacher_two_steps_land_on_lattice() {
        let p = desk();
        let g = sho_grid(257);
        let spec = NoiseSpec::new(NoiseLaw::Rademacher, 5);
        let mut ens =
            WalkerEnsemble::from_positions(&g, vec![[0.0, 0.0]; 64], spec, &p).unwrap();
        let drift = RealVectorField::zeros(&g);
        let dt = 0.01;
        let step = (2.0 * p.d * dt).sqrt();
        step_ensemble(&mut ens, &drift, dt).unwrap();
        step_ensemble(&mut ens, &drift, dt).unwrap();
        for pos in &ens.positions {
            let lattice = [-2.0 * step, 0.0, 2.0 * step];
            assert!(
                lattice.iter().any(|l| (pos[0] - l).abs() < 1e-12),
                "off-lattice position {}",
                pos[0]
            );
        }
    }

    #[test]
    fn stepping_is_thread_count_invariant() {
        let p = desk();
        let g = sho_grid(257);
        let spec = NoiseSpec::new(NoiseLaw::Uniform, 77);
        let drift = RealVectorField::zeros(&g);
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| {
                let mut ens =
                    WalkerEnsemble::from_positions(&g, vec![[0.1, 0.0]; 1000], spec, &p)
                        .unwrap();
                for _ in 0..20 {
                    step_ensemble(&mut ens, &drift, 0.01).unwrap();
                }
                ens.positions
            })
        };
        let a = run(1);
        let b = run(4);
        assert_eq!(a, b);
    }

    #[test]
    fn density_estimate_is_normalized() {
        let p = desk();
        let g = sho_grid(257);
        let spec = NoiseSpec::new(NoiseLaw::Gaussian, 1);
        let psi = AnalyticState::gaussian_1d(0.0, 1.0, 0.0).sample(&g, &p).unwrap();
        let ens =
            WalkerEnsemble::sample_from_density(&g, &psi.density(), 50_000, spec, &p).unwrap();
        for bw in [None, Some(0.1)] {
            let est = density_estimate(&ens, &g, bw).unwrap();
            assert!((est.integral() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn single_point_ensemble_gives_single_bin() {
        let p = desk();
        let g = sho_grid(257);
        let spec = NoiseSpec::new(NoiseLaw::Gaussian, 1);
        let ens = WalkerEnsemble::from_positions(&g, vec![[0.0, 0.0]; 10], spec, &p).unwrap();
        let est = density_estimate(&ens, &g, None).unwrap();
        let nonzero: Vec<usize> =
            (0..g.num_nodes()).filter(|&i| est.values[i] > 0.0).collect();
        assert_eq!(nonzero.len(), 1);
        assert_eq!(g.position(nonzero[0])[0], 0.0);
    }

    #[test]
    fn sampled_ensemble_matches_source_density() {
        let p = desk();
        let g = sho_grid(257);
        let spec = NoiseSpec::new(NoiseLaw::Gaussian, 13);
        let psi = AnalyticState::ShoEigenstate { n: 0, omega: 1.0 }.sample(&g, &p).unwrap();
        let dens = psi.density();
        let ens = WalkerEnsemble::sample_from_density(&g, &dens, 100_000, spec, &p).unwrap();
        let est = density_estimate(&ens, &g, None).unwrap();
        let m = compare_density(&est, &dens).unwrap();
        assert!(m.l1 < 0.05, "L1 {}", m.l1);
        assert!(m.ks < 0.01, "KS {}", m.ks);
    }

    #[test]
    fn compare_density_identical_fields() {
        let p = desk();
        let g = sho_grid(257);
        let psi = AnalyticState::gaussian_1d(0.0, 1.0, 0.0).sample(&g, &p).unwrap();
        let d = psi.density();
        let m = compare_density(&d, &d).unwrap();
        assert_eq!(m.l1, 0.0);
        assert_eq!(m.ks, 0.0);
    }

    #[test]
    fn compare_density_one_bin_shift_oracle() {
        // shift a discrete density by one node; L1 must equal the directly
        // summed overlap difference
        let g = sho_grid(257);
        let psi = AnalyticState::gaussian_1d(0.0, 1.0, 0.0)
            .sample(&g, &PhysicalParams::desk())
            .unwrap();
        let a = psi.density();
        let mut shifted = a.values.clone();
        shifted.rotate_right(1);
        let b = RealField::new(g.clone(), shifted).unwrap();
        let m = compare_density(&b, &a).unwrap();
        let direct = g.integrate(|idx| (b.values[idx] - a.values[idx]).abs());
        assert!((m.l1 - direct).abs() < 1e-14);
        assert!(m.l1 > 0.0);
    }

    #[test]
    fn selection_keeps_only_region_and_is_idempotent() {
        let p = desk();
        let g = sho_grid(257);
        let spec = NoiseSpec::new(NoiseLaw::Gaussian, 3);
        let psi = AnalyticState::gaussian_1d(0.0, 1.0, 0.0).sample(&g, &p).unwrap();
        let ens =
            WalkerEnsemble::sample_from_density(&g, &psi.density(), 20_000, spec, &p).unwrap();
        let full = vec![true; g.num_nodes()];
        assert_eq!(select_geodesics(&ens, &full).unwrap().len(), ens.len());

        let region: Vec<bool> = (0..g.num_nodes()).map(|i| g.position(i)[0] > 0.0).collect();
        let half = select_geodesics(&ens, &region).unwrap();
        let frac = half.len() as f64 / ens.len() as f64;
        assert!((frac - 0.5).abs() < 0.02, "kept fraction {frac}");
        assert!(half.positions.iter().all(|p| p[0] > -g.spacing(0)));
        let again = select_geodesics(&half, &region).unwrap();
        assert_eq!(again.len(), half.len());
        assert_eq!(again.positions, half.positions);

        let nothing: Vec<bool> = vec![false; g.num_nodes()];
        assert!(matches!(
            select_geodesics(&ens, &nothing),
            Err(Error::MeasurementImpossible)
        ));
    }

    #[test]
    fn walker_count_is_conserved_by_stepping() {
        let p = desk();
        let g = sho_grid(257);
        let spec = NoiseSpec::new(NoiseLaw::Gaussian, 4);
        let mut ens =
            WalkerEnsemble::from_positions(&g, vec![[9.9, 0.0]; 500], spec, &p).unwrap();
        let mut drift = RealVectorField::zeros(&g);
        drift.components[0].iter_mut().for_each(|v| *v = 5.0);
        for _ in 0..100 {
            step_ensemble(&mut ens, &drift, 0.01).unwrap();
        }
        // reflecting boundary keeps every walker inside the Dirichlet box
        assert_eq!(ens.len(), 500);
        assert!(ens.positions.iter().all(|p| p[0] >= -10.0 && p[0] <= 10.0));
    }
}
