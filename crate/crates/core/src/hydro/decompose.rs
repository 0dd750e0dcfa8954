use num_complex::Complex64;
use std::f64::consts::PI;

use crate::fields::ops::derivative_axis;
use crate::fields::{laplacian_real, ComplexField, RealField, RealVectorField};
use crate::{Error, PhysicalParams, Result};

/// Relative density threshold below which nodes are masked invalid.
pub const DEFAULT_EPS_REL: f64 = 1e-8;

/// Guard against division by an exactly-zero density node.
const TINY: f64 = 1e-300;

/// Madelung fields of a wavefunction: density, unwrapped phase, real and
/// imaginary velocities, quantum potential and a validity mask.
///
/// V and U are both taken from the single complex ratio grad(psi)/psi, so the
/// reconstruction identities (complex velocity, probability current) hold to
/// rounding rather than to stencil order. On valid nodes they agree with
/// 2D grad(theta) and D grad(ln P) at second order in h.
#[derive(Debug, Clone)]
pub struct HydroFields {
    pub p: RealField,
    pub theta: RealField,
    pub v: RealVectorField,
    pub u: RealVectorField,
    pub q: RealField,
    pub valid: Vec<bool>,
    pub t: f64,
    pub params: PhysicalParams,
    /// Absolute density threshold actually applied.
    pub eps_node: f64,
}

impl HydroFields {
    /// Mask eroded by one node along every axis: valid nodes whose immediate
    /// neighbors are valid too, so first-derivative stencils see clean data.
    pub fn eroded_mask(&self) -> Vec<bool> {
        eroded(&self.valid, &self.p.grid)
    }

    pub fn masked_fraction(&self) -> f64 {
        let n = self.valid.len();
        self.valid.iter().filter(|&&v| !v).count() as f64 / n as f64
    }
}

pub(crate) fn eroded(valid: &[bool], grid: &crate::fields::Grid) -> Vec<bool> {
    let (nx, ny) = (grid.n(0), grid.n(1));
    let periodic = grid.bc() == crate::fields::BoundaryCondition::Periodic;
    let mut out = vec![false; valid.len()];
    for j in 0..ny {
        for i in 0..nx {
            let idx = grid.index(i, j);
            if !valid[idx] {
                continue;
            }
            let mut ok = true;
            let mut probe = |ii: isize, jj: isize| {
                let (ii, jj) = if periodic {
                    (
                        ii.rem_euclid(nx as isize) as usize,
                        jj.rem_euclid(ny as isize) as usize,
                    )
                } else {
                    if ii < 0 || jj < 0 || ii >= nx as isize || jj >= ny as isize {
                        return;
                    }
                    (ii as usize, jj as usize)
                };
                if !valid[grid.index(ii, jj)] {
                    ok = false;
                }
            };
            probe(i as isize - 1, j as isize);
            probe(i as isize + 1, j as isize);
            if grid.dims() == 2 {
                probe(i as isize, j as isize - 1);
                probe(i as isize, j as isize + 1);
            }
            out[idx] = ok;
        }
    }
    out
}

pub(crate) fn wrap_pi(d: f64) -> f64 {
    (d + PI).rem_euclid(2.0 * PI) - PI
}

/// Unwrapped phase, accumulating principal-value jumps along grid sweeps.
/// The sweep is anchored at the max-density node, so phase noise at
/// tiny-amplitude boundary nodes cannot offset the interior values. The
/// anchor row is swept in x both ways, then every column in y from that row.
/// Valid only for vortex-free fields.
pub(crate) fn unwrap_phase(psi: &ComplexField) -> Vec<f64> {
    let grid = &psi.grid;
    let (nx, ny) = (grid.n(0), grid.n(1));
    let raw: Vec<f64> = psi.values.iter().map(|v| v.arg()).collect();
    let mut out = raw.clone();
    let anchor = (0..psi.values.len())
        .max_by(|&a, &b| {
            psi.values[a].norm_sqr().total_cmp(&psi.values[b].norm_sqr())
        })
        .unwrap_or(0);
    let (ci, cj) = (anchor % nx, anchor / nx);
    for i in ci + 1..nx {
        let (cur, prev) = (grid.index(i, cj), grid.index(i - 1, cj));
        out[cur] = out[prev] + wrap_pi(raw[cur] - raw[prev]);
    }
    for i in (0..ci).rev() {
        let (cur, prev) = (grid.index(i, cj), grid.index(i + 1, cj));
        out[cur] = out[prev] + wrap_pi(raw[cur] - raw[prev]);
    }
    for i in 0..nx {
        for j in cj + 1..ny {
            let (cur, prev) = (grid.index(i, j), grid.index(i, j - 1));
            out[cur] = out[prev] + wrap_pi(raw[cur] - raw[prev]);
        }
        for j in (0..cj).rev() {
            let (cur, prev) = (grid.index(i, j), grid.index(i, j + 1));
            out[cur] = out[prev] + wrap_pi(raw[cur] - raw[prev]);
        }
    }
    out
}

/// Per-axis complex logarithmic derivative, conj(psi) * grad(psi) / |psi|^2.
pub(crate) fn log_derivative(psi: &ComplexField, p: &[f64]) -> Vec<Vec<Complex64>> {
    (0..psi.grid.dims())
        .map(|axis| {
            let grad = derivative_axis(&psi.values, &psi.grid, axis);
            psi.values
                .iter()
                .zip(&grad)
                .zip(p)
                .map(|((&w, &g), &pp)| w.conj() * g / pp.max(TINY))
                .collect()
        })
        .collect()
}

/// Madelung decomposition of a normalized wavefunction.
///
/// `eps_rel` is the mask threshold relative to max P; pass `None` for the
/// default 1e-8. Errors if the state is not normalized or if nearly all
/// nodes (>90%) fall below the threshold. A localized state on a wide box
/// legitimately masks well over half the domain, so the degeneracy guard
/// only trips when almost nothing remains.
pub fn decompose(
    psi: &ComplexField,
    params: &PhysicalParams,
    eps_rel: Option<f64>,
) -> Result<HydroFields> {
    let norm2 = psi.norm2();
    if (norm2 - 1.0).abs() > 1e-6 {
        return Err(Error::NotNormalized { norm2 });
    }
    let p = psi.density();
    let max_p = p.values.iter().cloned().fold(0.0f64, f64::max);
    if !(max_p > 0.0) {
        return Err(Error::NonPositiveField);
    }
    let eps_node = eps_rel.unwrap_or(DEFAULT_EPS_REL) * max_p;
    let valid: Vec<bool> = p.values.iter().map(|&pp| pp > eps_node).collect();
    let masked = valid.iter().filter(|&&v| !v).count();
    let masked_fraction = masked as f64 / valid.len() as f64;
    if masked_fraction > 0.9 {
        return Err(Error::DecompositionDegenerate { masked_fraction });
    }

    let two_d = 2.0 * params.d;
    let logd = log_derivative(psi, &p.values);
    let mut v = RealVectorField::zeros(&psi.grid);
    let mut u = RealVectorField::zeros(&psi.grid);
    for axis in 0..psi.grid.dims() {
        for idx in 0..psi.grid.num_nodes() {
            v.components[axis][idx] = two_d * logd[axis][idx].im;
            u.components[axis][idx] = two_d * logd[axis][idx].re;
        }
    }

    let theta = RealField { grid: psi.grid.clone(), values: unwrap_phase(psi) };
    let q = quantum_potential(&p, params)?;
    Ok(HydroFields { p, theta, v, u, q, valid, t: psi.t, params: *params, eps_node })
}

/// Complex velocity field, -2iD grad(ln psi), evaluated through the same
/// logarithmic derivative used by `decompose`, so Re = V and -Im = U exactly.
pub fn complex_velocity(psi: &ComplexField, params: &PhysicalParams) -> Vec<Vec<Complex64>> {
    let p: Vec<f64> = psi.values.iter().map(|w| w.norm_sqr()).collect();
    let coef = Complex64::new(0.0, -2.0 * params.d);
    log_derivative(psi, &p)
        .into_iter()
        .map(|comp| comp.into_iter().map(|g| coef * g).collect())
        .collect()
}

/// Quantum potential, -2 m D^2 laplacian(sqrt P) / sqrt P.
pub fn quantum_potential(p: &RealField, params: &PhysicalParams) -> Result<RealField> {
    if !p.values.iter().any(|&v| v > 0.0) {
        return Err(Error::NonPositiveField);
    }
    let amp = RealField {
        grid: p.grid.clone(),
        values: p.values.iter().map(|&v| v.max(0.0).sqrt()).collect(),
    };
    let lap = laplacian_real(&amp);
    let coef = -2.0 * params.m * params.d * params.d;
    let values = amp
        .values
        .iter()
        .zip(&lap)
        .map(|(&a, &l)| coef * l / a.max(TINY))
        .collect();
    Ok(RealField { grid: p.grid.clone(), values })
}

/// Pointwise discrepancy between the quantum potential and the kinetic
/// operator applied to sqrt P, divided by sqrt P. The two routes share the
/// Laplacian stencil, so only the coefficient arithmetic differs.
pub fn kinetic_form_residual(p: &RealField, params: &PhysicalParams) -> Result<RealField> {
    let q = quantum_potential(p, params)?;
    let amp = RealField {
        grid: p.grid.clone(),
        values: p.values.iter().map(|&v| v.max(0.0).sqrt()).collect(),
    };
    let lap = laplacian_real(&amp);
    let hbar = params.hbar();
    let coef = -hbar * hbar / (2.0 * params.m);
    let values = q
        .values
        .iter()
        .zip(amp.values.iter().zip(&lap))
        .map(|(&qv, (&a, &l))| (qv - coef * l / a.max(TINY)).abs())
        .collect();
    Ok(RealField { grid: p.grid.clone(), values })
}

/// Probability current, J = (hbar/m) Im(conj(psi) grad psi).
pub fn probability_current(psi: &ComplexField, params: &PhysicalParams) -> RealVectorField {
    let coef = params.hbar() / params.m;
    let components = (0..psi.grid.dims())
        .map(|axis| {
            let grad = derivative_axis(&psi.values, &psi.grid, axis);
            psi.values
                .iter()
                .zip(&grad)
                .map(|(&w, &g)| coef * (w.conj() * g).im)
                .collect()
        })
        .collect();
    RealVectorField { grid: psi.grid.clone(), components }
}
