//! Madelung fluid representation of the wavefunction: density, phase,
//! real/imaginary velocity fields, quantum potential, probability current,
//! complex Hamilton/Lagrange functions and the Euler/continuity residuals.

mod decompose;
mod dynamic;
mod residuals;

pub use decompose::{
    complex_velocity, decompose, kinetic_form_residual, probability_current, quantum_potential,
    HydroFields, DEFAULT_EPS_REL,
};
pub use dynamic::{
    complex_hamiltonian, complex_lagrangian, dynamic_fields, recover_action, ComplexDynamicFields,
};
pub use residuals::{
    continuity_residual, euler_residual, hamilton_jacobi_residual, ResidualReport,
};
pub(crate) use decompose::eroded;
pub(crate) use residuals::cadence;

use crate::fields::RealField;
use std::io::Write;

/// HydroFields CSV export: coordinates, P, theta, V, U, Q, valid.
pub fn write_hydro_csv<W: Write>(w: &mut W, hydro: &HydroFields) -> crate::Result<()> {
    let grid = &hydro.p.grid;
    let dims = grid.dims();
    if dims == 1 {
        writeln!(w, "x,p,theta,v,u,q,valid")?;
    } else {
        writeln!(w, "x,y,p,theta,vx,vy,ux,uy,q,valid")?;
    }
    for idx in 0..grid.num_nodes() {
        let pos = grid.position(idx);
        let valid = u8::from(hydro.valid[idx]);
        if dims == 1 {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                pos[0],
                hydro.p.values[idx],
                hydro.theta.values[idx],
                hydro.v.components[0][idx],
                hydro.u.components[0][idx],
                hydro.q.values[idx],
                valid
            )?;
        } else {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{}",
                pos[0],
                pos[1],
                hydro.p.values[idx],
                hydro.theta.values[idx],
                hydro.v.components[0][idx],
                hydro.v.components[1][idx],
                hydro.u.components[0][idx],
                hydro.u.components[1][idx],
                hydro.q.values[idx],
                valid
            )?;
        }
    }
    Ok(())
}

/// Weighted L2 and max norms of a per-node sample restricted to a mask.
pub(crate) fn masked_norms(values: &RealField, mask: &[bool]) -> (f64, f64) {
    let grid = &values.grid;
    let mut l2 = 0.0;
    let mut max = 0.0f64;
    for idx in 0..grid.num_nodes() {
        if mask[idx] {
            let r = values.values[idx];
            l2 += r * r * grid.quad_weight(idx);
            max = max.max(r.abs());
        }
    }
    (l2.sqrt(), max)
}
