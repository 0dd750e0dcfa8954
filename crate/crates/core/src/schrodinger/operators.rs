use num_complex::Complex64;

use super::PotentialSpec;
use crate::fields::ops::second_derivative_axis;
use crate::fields::{gradient_axis, laplacian, ComplexField};
use crate::{Error, PhysicalParams, Result};

/// Observables whose expectation values the quadrature layer supports.
#[derive(Debug, Clone)]
pub enum Observable<'a> {
    Position(usize),
    PositionSq(usize),
    Momentum(usize),
    MomentumSq(usize),
    Kinetic,
    Hamiltonian(&'a PotentialSpec),
}

/// `P_axis psi = -i hbar d/dx_axis psi`.
pub fn apply_momentum(psi: &ComplexField, params: &PhysicalParams, axis: usize) -> ComplexField {
    let grad = gradient_axis(psi, axis);
    let factor = Complex64::new(0.0, -params.hbar());
    ComplexField {
        grid: psi.grid.clone(),
        values: grad.into_iter().map(|g| factor * g).collect(),
        t: psi.t,
    }
}

/// `T psi = -(hbar^2 / 2m) Lap psi`.
pub fn apply_kinetic(psi: &ComplexField, params: &PhysicalParams) -> ComplexField {
    let lap = laplacian(psi);
    let factor = -params.hbar() * params.hbar() / (2.0 * params.m);
    ComplexField {
        grid: psi.grid.clone(),
        values: lap.into_iter().map(|l| l * factor).collect(),
        t: psi.t,
    }
}

/// `H psi = T psi + Phi psi`.
pub fn apply_hamiltonian(
    psi: &ComplexField,
    pot: &PotentialSpec,
    params: &PhysicalParams,
) -> Result<ComplexField> {
    let phi = pot.evaluate(&psi.grid, params)?;
    let mut out = apply_kinetic(psi, params);
    for (i, v) in out.values.iter_mut().enumerate() {
        *v += psi.values[i] * phi.values[i];
    }
    Ok(out)
}

/// Pointwise residual of the canonical commutator:
/// `(x_i P_j - P_j x_i) psi - i hbar delta_ij psi`.
pub fn commutator_residual(
    i_axis: usize,
    j_axis: usize,
    test: &ComplexField,
    params: &PhysicalParams,
) -> ComplexField {
    let grid = &test.grid;
    let x_field = |f: &ComplexField| ComplexField {
        grid: grid.clone(),
        values: f
            .values
            .iter()
            .enumerate()
            .map(|(idx, &v)| v * grid.position(idx)[i_axis])
            .collect(),
        t: f.t,
    };
    let p_then_x = x_field(&apply_momentum(test, params, j_axis));
    let x_then_p = apply_momentum(&x_field(test), params, j_axis);
    let ihbar = Complex64::new(0.0, params.hbar());
    let delta = if i_axis == j_axis { 1.0 } else { 0.0 };
    ComplexField {
        grid: grid.clone(),
        values: (0..grid.num_nodes())
            .map(|idx| p_then_x.values[idx] - x_then_p.values[idx] - ihbar * delta * test.values[idx])
            .collect(),
        t: test.t,
    }
}

fn require_normalized(psi: &ComplexField) -> Result<()> {
    let n2 = psi.norm2();
    if (n2 - 1.0).abs() > 1e-6 {
        return Err(Error::NotNormalized { norm2: n2 });
    }
    Ok(())
}

/// Expectation value `<A> = int psi* A psi dr` by trapezoidal quadrature.
pub fn expectation(
    psi: &ComplexField,
    obs: &Observable<'_>,
    params: &PhysicalParams,
) -> Result<Complex64> {
    require_normalized(psi)?;
    let applied: ComplexField = match obs {
        Observable::Position(axis) => {
            let grid = psi.grid.clone();
            let a = *axis;
            ComplexField {
                values: psi
                    .values
                    .iter()
                    .enumerate()
                    .map(|(idx, &v)| v * grid.position(idx)[a])
                    .collect(),
                grid,
                t: psi.t,
            }
        }
        Observable::PositionSq(axis) => {
            let grid = psi.grid.clone();
            let a = *axis;
            ComplexField {
                values: psi
                    .values
                    .iter()
                    .enumerate()
                    .map(|(idx, &v)| {
                        let x = grid.position(idx)[a];
                        v * (x * x)
                    })
                    .collect(),
                grid,
                t: psi.t,
            }
        }
        Observable::Momentum(axis) => apply_momentum(psi, params, *axis),
        Observable::MomentumSq(axis) => {
            // -hbar^2 d^2/dx_axis^2 via the shared second-difference stencil
            let d2 = second_derivative_axis(&psi.values, &psi.grid, *axis);
            let f = -params.hbar() * params.hbar();
            ComplexField {
                grid: psi.grid.clone(),
                values: d2.into_iter().map(|v| v * f).collect(),
                t: psi.t,
            }
        }
        Observable::Kinetic => apply_kinetic(psi, params),
        Observable::Hamiltonian(pot) => apply_hamiltonian(psi, pot, params)?,
    };
    psi.inner(&applied)
}

/// Standard deviations of position and momentum along one axis and their
/// product.
pub fn uncertainty_product(
    psi: &ComplexField,
    params: &PhysicalParams,
    axis: usize,
) -> Result<(f64, f64, f64)> {
    let x = expectation(psi, &Observable::Position(axis), params)?.re;
    let x2 = expectation(psi, &Observable::PositionSq(axis), params)?.re;
    let p = expectation(psi, &Observable::Momentum(axis), params)?.re;
    let p2 = expectation(psi, &Observable::MomentumSq(axis), params)?.re;
    let dx = (x2 - x * x).max(0.0).sqrt();
    let dp = (p2 - p * p).max(0.0).sqrt();
    Ok((dx, dp, dx * dp))
}

/// Expansion coefficients `c_n = <psi_n | psi>` against an orthonormal basis
/// sampled on the same grid.
pub fn eigenbasis_coefficients(
    psi: &ComplexField,
    basis: &[ComplexField],
) -> Result<Vec<Complex64>> {
    basis.iter().map(|b| b.inner(psi)).collect()
}
