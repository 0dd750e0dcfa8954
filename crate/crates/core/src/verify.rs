//! Identity checks for the derivation chain.
//!
//! Each operation evaluates both sides of one analytic identity with the
//! shared stencils from `fields::ops` and reports the pointwise residual, so
//! a failure means the identity is broken, not that two discretizations
//! disagree.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::fields::ops::derivative_axis;
use crate::fields::{laplacian_values, BoundaryCondition, ComplexField, Grid, RealField};
use crate::hydro::{
    cadence, complex_hamiltonian, complex_lagrangian, complex_velocity, eroded, masked_norms,
};
use crate::{Error, PhysicalParams, Result};

/// Residual norms of one identity check, with the discretization it was run
/// at and a pass flag against the caller's tolerance. `order` is filled by
/// [`attach_order`] when two refinement levels were run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentityReport {
    pub name: String,
    pub norm_l2: f64,
    pub norm_max: f64,
    pub h: f64,
    pub dt: f64,
    pub order: Option<f64>,
    pub pass: bool,
}

impl IdentityReport {
    fn new(name: &str, norm_l2: f64, norm_max: f64, h: f64, dt: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            norm_l2,
            norm_max,
            h,
            dt,
            order: None,
            pass: norm_max <= tol,
        }
    }
}

/// Convergence order between two refinement levels of the same identity,
/// attached to the fine-level report.
pub fn attach_order(coarse: &IdentityReport, mut fine: IdentityReport) -> IdentityReport {
    let ratio = (coarse.h / fine.h).log2();
    if ratio > 0.0 && fine.norm_l2 > 0.0 {
        fine.order = Some((coarse.norm_l2 / fine.norm_l2).log2() / ratio);
    }
    fine
}

/// True away from Dirichlet edges by `margin` nodes; everywhere on periodic
/// grids, where the stencils wrap without losing accuracy.
fn interior_mask(grid: &Grid, margin: usize) -> Vec<bool> {
    let (nx, ny) = (grid.n(0), grid.n(1));
    if grid.bc() == BoundaryCondition::Periodic {
        return vec![true; grid.num_nodes()];
    }
    let mut out = vec![false; grid.num_nodes()];
    for j in 0..ny {
        for i in 0..nx {
            let in_x = i >= margin && i + margin < nx;
            let in_y = ny == 1 || (j >= margin && j + margin < ny);
            out[grid.index(i, j)] = in_x && in_y;
        }
    }
    out
}

fn magnitude_field(grid: &Grid, sq: Vec<f64>) -> RealField {
    RealField {
        grid: grid.clone().into(),
        values: sq.into_iter().map(f64::sqrt).collect(),
    }
}

/// Residual of (1/a) grad(lap(R^a)/R^a) = 2a grad(ln R) . grad(grad(ln R))
/// + lap(grad(ln R)), checked per gradient component. R must be strictly
/// positive.
pub fn remarkable_identity_residual(
    r: &RealField,
    alpha: f64,
    tol: f64,
) -> Result<IdentityReport> {
    if r.values.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::NonPositiveField);
    }
    let grid = &r.grid;
    let n = grid.num_nodes();
    let ra: Vec<f64> = r.values.iter().map(|v| v.powf(alpha)).collect();
    let lap_ra = laplacian_values(&ra, grid);
    let ratio: Vec<f64> = lap_ra.iter().zip(&ra).map(|(l, d)| l / d).collect();
    let lnr: Vec<f64> = r.values.iter().map(|v| v.ln()).collect();
    let g: Vec<Vec<f64>> = (0..grid.dims())
        .map(|axis| derivative_axis(&lnr, grid, axis))
        .collect();

    let mut sq = vec![0.0f64; n];
    for a in 0..grid.dims() {
        let lhs = derivative_axis(&ratio, grid, a);
        let lap_ga = laplacian_values(&g[a], grid);
        let cross: Vec<Vec<f64>> = (0..grid.dims())
            .map(|b| derivative_axis(&g[a], grid, b))
            .collect();
        for idx in 0..n {
            let mut dot = 0.0;
            for b in 0..grid.dims() {
                dot += g[b][idx] * cross[b][idx];
            }
            let res = lhs[idx] / alpha - 2.0 * alpha * dot - lap_ga[idx];
            sq[idx] += res * res;
        }
    }
    let field = magnitude_field(grid, sq);
    // grad(lap(.)) reaches two nodes deep, and the boundary rows already use
    // one-sided or ghost stencils, so keep three nodes clear
    let (l2, max) = masked_norms(&field, &interior_mask(grid, 3));
    Ok(IdentityReport::new(
        "remarkable-identity",
        l2,
        max,
        grid.spacing(0),
        0.0,
        tol,
    ))
}

/// Covariant derivative d/dt + V.grad - i D lap applied to the middle
/// snapshot of a uniform series, with `velocity` the complex velocity
/// components at that time.
pub fn covariant_derivative(
    series: &[ComplexField],
    velocity: &[Vec<Complex64>],
    params: &PhysicalParams,
) -> Result<ComplexField> {
    let times: Vec<f64> = series.iter().map(|f| f.t).collect();
    let dt = cadence(&times)?;
    let k = series.len() / 2;
    let grid = &series[k].grid;
    if velocity.len() != grid.dims() || velocity.iter().any(|c| c.len() != grid.num_nodes()) {
        return Err(Error::GridMismatch("velocity components".into()));
    }
    let lap = laplacian_values(&series[k].values, grid);
    let grad: Vec<Vec<Complex64>> = (0..grid.dims())
        .map(|axis| derivative_axis(&series[k].values, grid, axis))
        .collect();
    let id = Complex64::new(0.0, params.d);
    let values = (0..grid.num_nodes())
        .map(|idx| {
            let dfdt = (series[k + 1].values[idx] - series[k - 1].values[idx]) / (2.0 * dt);
            let mut advect = Complex64::default();
            for a in 0..grid.dims() {
                advect += velocity[a][idx] * grad[a][idx];
            }
            dfdt + advect - id * lap[idx]
        })
        .collect();
    ComplexField::new(grid.clone(), values, series[k].t)
}

/// Residual of the geodesic equation m dV/dt + grad(Phi) = 0 on a solver
/// snapshot series, with dV/dt the covariant derivative of the complex
/// velocity. Norms are taken over density-resolved interior nodes.
pub fn geodesic_equation_residual(
    psis: &[ComplexField],
    pot: &RealField,
    params: &PhysicalParams,
    eps_rel: Option<f64>,
    tol: f64,
) -> Result<IdentityReport> {
    let times: Vec<f64> = psis.iter().map(|f| f.t).collect();
    let dt = cadence(&times)?;
    let grid = psis[0].grid.clone();
    if !pot.grid.same_layout(&grid) {
        return Err(Error::GridMismatch("potential grid".into()));
    }
    let n = grid.num_nodes();
    let vels: Vec<Vec<Vec<Complex64>>> =
        psis.iter().map(|psi| complex_velocity(psi, params)).collect();
    let grad_pot: Vec<Vec<f64>> = (0..grid.dims())
        .map(|axis| derivative_axis(&pot.values, &grid, axis))
        .collect();
    let id = Complex64::new(0.0, params.d);

    let mut norm_l2 = 0.0f64;
    let mut norm_max = 0.0f64;
    for k in 1..psis.len() - 1 {
        let mut sq = vec![0.0f64; n];
        for a in 0..grid.dims() {
            let lap = laplacian_values(&vels[k][a], &grid);
            let cross: Vec<Vec<Complex64>> = (0..grid.dims())
                .map(|b| derivative_axis(&vels[k][a], &grid, b))
                .collect();
            for idx in 0..n {
                let dvdt = (vels[k + 1][a][idx] - vels[k - 1][a][idx]) / (2.0 * dt);
                let mut advect = Complex64::default();
                for b in 0..grid.dims() {
                    advect += vels[k][b][idx] * cross[b][idx];
                }
                let res = (dvdt + advect - id * lap[idx]) * params.m + grad_pot[a][idx];
                sq[idx] += res.norm_sqr();
            }
        }
        // trust only nodes resolved on all three snapshots, two stencil
        // layers clear of the mask edge (velocity is already one derivative)
        let mut mask = interior_mask(&grid, 2);
        for s in [k - 1, k, k + 1] {
            let hydro = crate::hydro::decompose(&psis[s], params, eps_rel)?;
            let m = eroded(&hydro.eroded_mask(), &grid);
            for idx in 0..n {
                mask[idx] = mask[idx] && m[idx];
            }
        }
        let field = magnitude_field(&grid, sq);
        let (l2, max) = masked_norms(&field, &mask);
        norm_l2 = norm_l2.max(l2);
        norm_max = norm_max.max(max);
    }
    Ok(IdentityReport::new(
        "geodesic-equation",
        norm_l2,
        norm_max,
        grid.spacing(0),
        dt,
        tol,
    ))
}

/// Checks hbar = 2 m D and lambda m c = hbar to rounding.
pub fn compton_relation_check(params: &PhysicalParams) -> IdentityReport {
    let hbar = params.hbar();
    let r1 = (hbar - 2.0 * params.m * params.d).abs();
    let r2 = (params.lambda() * params.m * params.c - hbar).abs();
    let max = r1.max(r2);
    IdentityReport::new(
        "compton-relation",
        (r1 * r1 + r2 * r2).sqrt(),
        max,
        0.0,
        0.0,
        1e-14 * hbar.max(1.0),
    )
}

/// Residual of H psi = 2 i m D dpsi/dt with H = -2 m D^2 lap + Phi, centered
/// time differences over the snapshot series.
pub fn hamiltonian_equivalence(
    psis: &[ComplexField],
    pot: &RealField,
    params: &PhysicalParams,
    tol: f64,
) -> Result<IdentityReport> {
    let times: Vec<f64> = psis.iter().map(|f| f.t).collect();
    let dt = cadence(&times)?;
    let grid = psis[0].grid.clone();
    if !pot.grid.same_layout(&grid) {
        return Err(Error::GridMismatch("potential grid".into()));
    }
    let kin = -2.0 * params.m * params.d * params.d;
    let i2md = Complex64::new(0.0, 2.0 * params.m * params.d);
    let mask = interior_mask(&grid, 1);
    let mut norm_l2 = 0.0f64;
    let mut norm_max = 0.0f64;
    for k in 1..psis.len() - 1 {
        let lap = laplacian_values(&psis[k].values, &grid);
        let sq = (0..grid.num_nodes())
            .map(|idx| {
                let h_psi = lap[idx] * kin + psis[k].values[idx] * pot.values[idx];
                let dpsidt = (psis[k + 1].values[idx] - psis[k - 1].values[idx]) / (2.0 * dt);
                (h_psi - i2md * dpsidt).norm_sqr()
            })
            .collect();
        let field = magnitude_field(&grid, sq);
        let (l2, max) = masked_norms(&field, &mask);
        norm_l2 = norm_l2.max(l2);
        norm_max = norm_max.max(max);
    }
    Ok(IdentityReport::new(
        "hamiltonian-form",
        norm_l2,
        norm_max,
        grid.spacing(0),
        dt,
        tol,
    ))
}

/// Residual of the covariant expansion H = m V^2 - i m D div(V) - L, using
/// the module's own H and L. Algebraic under shared stencils, so the
/// tolerance is rounding-level.
pub fn strong_covariance_check(
    psi: &ComplexField,
    pot: &RealField,
    params: &PhysicalParams,
    tol: f64,
) -> Result<IdentityReport> {
    let grid = &psi.grid;
    let ham = complex_hamiltonian(psi, pot, params)?;
    let lag = complex_lagrangian(psi, pot, params)?;
    let cv = complex_velocity(psi, params);
    let div_v = crate::fields::divergence(&cv, grid);
    let imd = Complex64::new(0.0, params.m * params.d);
    let sq = (0..grid.num_nodes())
        .map(|idx| {
            let v2: Complex64 = cv.iter().map(|c| c[idx] * c[idx]).sum();
            let rhs = v2 * params.m - imd * div_v[idx] - lag.values[idx];
            (ham.values[idx] - rhs).norm_sqr()
        })
        .collect();
    let field = magnitude_field(grid, sq);
    let mask = vec![true; grid.num_nodes()];
    let (l2, max) = masked_norms(&field, &mask);
    Ok(IdentityReport::new(
        "strong-covariance",
        l2,
        max,
        grid.spacing(0),
        0.0,
        tol,
    ))
}
