use serde::{Deserialize, Serialize};

use super::decompose::{eroded, HydroFields};
use super::masked_norms;
use crate::fields::ops::derivative_axis;
use crate::fields::{divergence, ComplexField, RealField};
use crate::{Error, PhysicalParams, Result};

/// L2 and max norms of a pointwise residual, with the grid spacing and
/// snapshot cadence it was evaluated at.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResidualReport {
    pub name: String,
    pub norm_l2: f64,
    pub norm_max: f64,
    pub h: f64,
    pub dt: f64,
}

/// Snapshot cadence, or an error if the series is too short or nonuniform.
pub(crate) fn cadence(times: &[f64]) -> Result<f64> {
    if times.len() < 3 {
        return Err(Error::CadenceMismatch(format!(
            "need at least 3 snapshots, got {}",
            times.len()
        )));
    }
    let dt = times[1] - times[0];
    if !(dt > 0.0) {
        return Err(Error::CadenceMismatch("snapshot times must increase".into()));
    }
    for k in 1..times.len() {
        let step = times[k] - times[k - 1];
        if (step - dt).abs() > 1e-9 * dt.max(1.0) {
            return Err(Error::CadenceMismatch(format!(
                "nonuniform cadence: step {k} is {step}, expected {dt}"
            )));
        }
    }
    Ok(dt)
}

/// Mask where the centered residual at interior snapshot `k` is trustworthy:
/// valid on all three snapshots and eroded by one node for the stencils.
fn triple_mask(snapshots: &[HydroFields], k: usize) -> Vec<bool> {
    let grid = &snapshots[k].p.grid;
    let combined: Vec<bool> = (0..grid.num_nodes())
        .map(|idx| {
            snapshots[k - 1].valid[idx] && snapshots[k].valid[idx] && snapshots[k + 1].valid[idx]
        })
        .collect();
    eroded(&combined, grid)
}

/// Continuity residual dP/dt + div(P V), centered time differences over the
/// interior snapshots, reported as the worst L2/max norms over valid nodes.
pub fn continuity_residual(snapshots: &[HydroFields]) -> Result<ResidualReport> {
    let times: Vec<f64> = snapshots.iter().map(|s| s.t).collect();
    let dt = cadence(&times)?;
    let grid = snapshots[0].p.grid.clone();
    let mut norm_l2 = 0.0f64;
    let mut norm_max = 0.0f64;
    for k in 1..snapshots.len() - 1 {
        if !snapshots[k].p.grid.same_layout(&grid) {
            return Err(Error::GridMismatch("snapshot grids differ".into()));
        }
        let mid = &snapshots[k];
        let flux: Vec<Vec<f64>> = (0..grid.dims())
            .map(|axis| {
                (0..grid.num_nodes())
                    .map(|idx| mid.p.values[idx] * mid.v.components[axis][idx])
                    .collect()
            })
            .collect();
        let div = divergence(&flux, &grid);
        let values = (0..grid.num_nodes())
            .map(|idx| {
                let dpdt =
                    (snapshots[k + 1].p.values[idx] - snapshots[k - 1].p.values[idx]) / (2.0 * dt);
                dpdt + div[idx]
            })
            .collect();
        let field = RealField { grid: grid.clone(), values };
        let (l2, max) = masked_norms(&field, &triple_mask(snapshots, k));
        norm_l2 = norm_l2.max(l2);
        norm_max = norm_max.max(max);
    }
    Ok(ResidualReport {
        name: "continuity".into(),
        norm_l2,
        norm_max,
        h: grid.spacing(0),
        dt,
    })
}

/// Euler residual dV/dt + (V.grad)V + grad((Phi + Q)/m), centered time
/// differences, per-node magnitude over all components.
pub fn euler_residual(
    snapshots: &[HydroFields],
    pot: &RealField,
    params: &PhysicalParams,
) -> Result<ResidualReport> {
    let times: Vec<f64> = snapshots.iter().map(|s| s.t).collect();
    let dt = cadence(&times)?;
    let grid = snapshots[0].p.grid.clone();
    if !pot.grid.same_layout(&grid) {
        return Err(Error::GridMismatch("potential grid".into()));
    }
    let mut norm_l2 = 0.0f64;
    let mut norm_max = 0.0f64;
    for k in 1..snapshots.len() - 1 {
        let mid = &snapshots[k];
        let specific: Vec<f64> = (0..grid.num_nodes())
            .map(|idx| (pot.values[idx] + mid.q.values[idx]) / params.m)
            .collect();
        let mut sq = vec![0.0f64; grid.num_nodes()];
        for axis in 0..grid.dims() {
            let grad_specific = derivative_axis(&specific, &grid, axis);
            let advect: Vec<Vec<f64>> = (0..grid.dims())
                .map(|b| derivative_axis(&mid.v.components[axis], &grid, b))
                .collect();
            for idx in 0..grid.num_nodes() {
                let dvdt = (snapshots[k + 1].v.components[axis][idx]
                    - snapshots[k - 1].v.components[axis][idx])
                    / (2.0 * dt);
                let mut conv = 0.0;
                for b in 0..grid.dims() {
                    conv += mid.v.components[b][idx] * advect[b][idx];
                }
                let r = dvdt + conv + grad_specific[idx];
                sq[idx] += r * r;
            }
        }
        let values = sq.into_iter().map(f64::sqrt).collect();
        let field = RealField { grid: grid.clone(), values };
        let (l2, max) = masked_norms(&field, &triple_mask(snapshots, k));
        norm_l2 = norm_l2.max(l2);
        norm_max = norm_max.max(max);
    }
    Ok(ResidualReport { name: "euler".into(), norm_l2, norm_max, h: grid.spacing(0), dt })
}

/// Hamilton-Jacobi residual dS/dt + H over a wavefunction snapshot series,
/// centered time differences on the recovered complex action.
pub fn hamilton_jacobi_residual(
    psis: &[ComplexField],
    pot: &RealField,
    params: &PhysicalParams,
    eps_rel: Option<f64>,
) -> Result<ResidualReport> {
    let times: Vec<f64> = psis.iter().map(|s| s.t).collect();
    let dt = cadence(&times)?;
    let grid = psis[0].grid.clone();
    let actions: Vec<ComplexField> =
        psis.iter().map(|psi| super::recover_action(psi, params)).collect::<Result<_>>()?;
    let mut norm_l2 = 0.0f64;
    let mut norm_max = 0.0f64;
    for k in 1..psis.len() - 1 {
        let hydro = super::decompose(&psis[k], params, eps_rel)?;
        let ham = super::complex_hamiltonian(&psis[k], pot, params)?;
        let values = (0..grid.num_nodes())
            .map(|idx| {
                let dsdt = (actions[k + 1].values[idx] - actions[k - 1].values[idx]) / (2.0 * dt);
                (dsdt + ham.values[idx]).norm()
            })
            .collect();
        let field = RealField { grid: grid.clone(), values };
        let (l2, max) = masked_norms(&field, &hydro.eroded_mask());
        norm_l2 = norm_l2.max(l2);
        norm_max = norm_max.max(max);
    }
    Ok(ResidualReport {
        name: "hamilton-jacobi".into(),
        norm_l2,
        norm_max,
        h: grid.spacing(0),
        dt,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{BoundaryCondition, Grid};
    use crate::hydro::decompose;
    use crate::schrodinger::{AnalyticState, CrankNicolson, PotentialSpec};
    use num_complex::Complex64;

    fn desk() -> PhysicalParams {
        PhysicalParams::desk()
    }

    /// Analytic stationary-state snapshots psi0 e^{-iEt}.
    fn stationary_snapshots(
        psi0: &ComplexField,
        e: f64,
        params: &PhysicalParams,
        dt: f64,
        count: usize,
        eps_rel: Option<f64>,
    ) -> Vec<HydroFields> {
        (0..count)
            .map(|k| {
                let t = k as f64 * dt;
                let mut psi = psi0.map(|v| v * Complex64::from_polar(1.0, -e * t / params.hbar()));
                psi.t = t;
                decompose(&psi, params, eps_rel).unwrap()
            })
            .collect()
    }

    fn free_packet_snapshots(
        n: usize,
        dt: f64,
        steps_between: usize,
        params: &PhysicalParams,
    ) -> Vec<ComplexField> {
        let g = Grid::new_1d(-10.0, 10.0, n, BoundaryCondition::DirichletZero).unwrap();
        let solver = CrankNicolson::new(&g, &PotentialSpec::Free, params, dt).unwrap();
        let mut psi = AnalyticState::gaussian_1d(0.0, 1.0, 1.0).sample(&g, params).unwrap();
        // settle away from t = 0 before recording
        for s in 0..50 {
            solver.step(&mut psi, s).unwrap();
        }
        let mut out = vec![psi.clone()];
        for k in 0..4 {
            for s in 0..steps_between {
                solver.step(&mut psi, 50 + k * steps_between + s).unwrap();
            }
            out.push(psi.clone());
        }
        out
    }

    #[test]
    fn stationary_state_continuity_vanishes() {
        let p = desk();
        let g = Grid::new_1d(-10.0, 10.0, 513, BoundaryCondition::DirichletZero).unwrap();
        let psi0 = AnalyticState::ShoEigenstate { n: 0, omega: 1.0 }.sample(&g, &p).unwrap();
        let snaps = stationary_snapshots(&psi0, 0.5, &p, 1e-3, 3, Some(1e-4));
        let rep = continuity_residual(&snaps).unwrap();
        assert!(rep.norm_max < 1e-6, "max residual {}", rep.norm_max);
    }

    #[test]
    fn plane_wave_continuity_and_euler_vanish() {
        let p = desk();
        let g = Grid::new_1d(
            -8.0 * std::f64::consts::PI,
            8.0 * std::f64::consts::PI,
            256,
            BoundaryCondition::Periodic,
        )
        .unwrap();
        let st = AnalyticState::plane_wave_1d(1.0);
        let psi0 = st.sample(&g, &p).unwrap();
        let e = st.energy(&p);
        let snaps = stationary_snapshots(&psi0, e, &p, 1e-3, 3, None);
        let cont = continuity_residual(&snaps).unwrap();
        assert!(cont.norm_max < 1e-8, "continuity {}", cont.norm_max);
        let pot = RealField::zeros(&g);
        let eul = euler_residual(&snaps, &pot, &p).unwrap();
        assert!(eul.norm_max < 1e-8, "euler {}", eul.norm_max);
    }

    #[test]
    fn stationary_sho_euler_balance() {
        let p = desk();
        let g = Grid::new_1d(-10.0, 10.0, 513, BoundaryCondition::DirichletZero).unwrap();
        let h = g.spacing(0);
        let psi0 = AnalyticState::ShoEigenstate { n: 0, omega: 1.0 }.sample(&g, &p).unwrap();
        let snaps = stationary_snapshots(&psi0, 0.5, &p, 1e-3, 3, Some(1e-4));
        let pot = RealField::from_fn(&g, |pos| 0.5 * pos[0] * pos[0]);
        let rep = euler_residual(&snaps, &pot, &p).unwrap();
        assert!(rep.norm_max < 100.0 * h * h, "max residual {}", rep.norm_max);
    }

    #[test]
    fn free_packet_residuals_converge_at_second_order() {
        // halve h and dt together; both residual norms must drop by >= 2^1.8
        let p = desk();
        let mut cont = Vec::new();
        let mut eul = Vec::new();
        for (n, dt, stride) in [(513usize, 1e-3, 10usize), (1025, 5e-4, 20)] {
            let psis = free_packet_snapshots(n, dt, stride, &p);
            let snaps: Vec<HydroFields> =
                psis.iter().map(|psi| decompose(psi, &p, Some(1e-5)).unwrap()).collect();
            let pot = RealField::zeros(&psis[0].grid);
            cont.push(continuity_residual(&snaps).unwrap());
            eul.push(euler_residual(&snaps, &pot, &p).unwrap());
        }
        let cont_order = (cont[0].norm_l2 / cont[1].norm_l2).log2();
        let eul_order = (eul[0].norm_l2 / eul[1].norm_l2).log2();
        assert!(cont_order >= 1.8, "continuity order {cont_order}");
        assert!(eul_order >= 1.8, "euler order {eul_order}");
    }

    #[test]
    fn hamilton_jacobi_residual_is_small_on_packet() {
        let p = desk();
        let psis = free_packet_snapshots(513, 1e-3, 10, &p);
        let pot = RealField::zeros(&psis[0].grid);
        let rep = hamilton_jacobi_residual(&psis, &pot, &p, Some(1e-5)).unwrap();
        assert!(rep.norm_l2 < 0.05, "l2 residual {}", rep.norm_l2);
    }

    #[test]
    fn cadence_is_enforced() {
        let p = desk();
        let g = Grid::new_1d(-10.0, 10.0, 257, BoundaryCondition::DirichletZero).unwrap();
        let psi0 = AnalyticState::ShoEigenstate { n: 0, omega: 1.0 }.sample(&g, &p).unwrap();
        let mut snaps = stationary_snapshots(&psi0, 0.5, &p, 1e-3, 4, Some(1e-4));
        assert!(continuity_residual(&snaps[..2]).is_err());
        snaps[3].t += 5e-4;
        assert!(matches!(continuity_residual(&snaps), Err(Error::CadenceMismatch(_))));
    }

    #[test]
    fn report_serializes_with_expected_keys() {
        let rep = ResidualReport {
            name: "continuity".into(),
            norm_l2: 1.0,
            norm_max: 2.0,
            h: 0.1,
            dt: 0.01,
        };
        let json = serde_json::to_string(&rep).unwrap();
        for key in ["name", "norm_l2", "norm_max", "\"h\"", "\"dt\""] {
            assert!(json.contains(key), "missing {key} in {json}");
        }
    }
}
