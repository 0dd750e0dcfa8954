use num_complex::Complex64;

use super::decompose::{complex_velocity, unwrap_phase, wrap_pi, DEFAULT_EPS_REL};
use crate::fields::{divergence, ComplexField, RealField};
use crate::{Error, PhysicalParams, Result};

/// Complex momentum, action and the Hamilton/Lagrange functions of a state.
#[derive(Debug, Clone)]
pub struct ComplexDynamicFields {
    /// m * complex velocity, one slice per axis.
    pub momentum: Vec<Vec<Complex64>>,
    pub action: ComplexField,
    pub lagrange: ComplexField,
    pub hamilton: ComplexField,
}

/// Complex Hamilton function, H = m V^2 / 2 - i m D div(V) + Phi, with V the
/// complex velocity field. Constant and real on energy eigenstates.
pub fn complex_hamiltonian(
    psi: &ComplexField,
    pot: &RealField,
    params: &PhysicalParams,
) -> Result<ComplexField> {
    if !psi.grid.same_layout(&pot.grid) {
        return Err(Error::GridMismatch("potential grid".into()));
    }
    let cv = complex_velocity(psi, params);
    let div_v = divergence(&cv, &psi.grid);
    let imd = Complex64::new(0.0, params.m * params.d);
    let values = (0..psi.grid.num_nodes())
        .map(|idx| {
            let v2: Complex64 = cv.iter().map(|comp| comp[idx] * comp[idx]).sum();
            v2 * (0.5 * params.m) - imd * div_v[idx] + pot.values[idx]
        })
        .collect();
    ComplexField::new(psi.grid.clone(), values, psi.t)
}

/// Complex Lagrange function, L = m V^2 / 2 - Phi.
pub fn complex_lagrangian(
    psi: &ComplexField,
    pot: &RealField,
    params: &PhysicalParams,
) -> Result<ComplexField> {
    if !psi.grid.same_layout(&pot.grid) {
        return Err(Error::GridMismatch("potential grid".into()));
    }
    let cv = complex_velocity(psi, params);
    let values = (0..psi.grid.num_nodes())
        .map(|idx| {
            let v2: Complex64 = cv.iter().map(|comp| comp[idx] * comp[idx]).sum();
            v2 * (0.5 * params.m) - pot.values[idx]
        })
        .collect();
    ComplexField::new(psi.grid.clone(), values, psi.t)
}

/// Complex action S = -i S0 ln(psi), S0 = hbar, with the imaginary logarithm
/// unwrapped along the grid sweep. Errors if adjacent well-resolved nodes
/// differ in phase by (nearly) pi, where unwrapping is ambiguous.
pub fn recover_action(psi: &ComplexField, params: &PhysicalParams) -> Result<ComplexField> {
    let grid = &psi.grid;
    let max_p = psi.values.iter().map(|v| v.norm_sqr()).fold(0.0f64, f64::max);
    if !(max_p > 0.0) {
        return Err(Error::DegenerateState);
    }
    let eps = DEFAULT_EPS_REL * max_p;
    let resolved = |idx: usize| psi.values[idx].norm_sqr() > eps;
    let (nx, ny) = (grid.n(0), grid.n(1));
    let check = |a: usize, b: usize| -> Result<()> {
        if resolved(a) && resolved(b) {
            let jump = wrap_pi(psi.values[b].arg() - psi.values[a].arg());
            if jump.abs() > 0.95 * std::f64::consts::PI {
                return Err(Error::PhaseJump { node: b });
            }
        }
        Ok(())
    };
    for j in 0..ny {
        for i in 1..nx {
            check(grid.index(i - 1, j), grid.index(i, j))?;
        }
    }
    for j in 1..ny {
        for i in 0..nx {
            check(grid.index(i, j - 1), grid.index(i, j))?;
        }
    }

    let s0 = params.hbar();
    let theta = unwrap_phase(psi);
    let values = psi
        .values
        .iter()
        .zip(&theta)
        .map(|(&w, &th)| {
            let amp = w.norm().max(1e-300);
            Complex64::new(s0 * th, -s0 * amp.ln())
        })
        .collect();
    ComplexField::new(grid.clone(), values, psi.t)
}

/// Bundle momentum m V, action, Lagrange and Hamilton fields of one state.
pub fn dynamic_fields(
    psi: &ComplexField,
    pot: &RealField,
    params: &PhysicalParams,
) -> Result<ComplexDynamicFields> {
    let cv = complex_velocity(psi, params);
    let momentum = cv
        .into_iter()
        .map(|comp| comp.into_iter().map(|v| v * params.m).collect())
        .collect();
    Ok(ComplexDynamicFields {
        momentum,
        action: recover_action(psi, params)?,
        lagrange: complex_lagrangian(psi, pot, params)?,
        hamilton: complex_hamiltonian(psi, pot, params)?,
    })
}
