use crate::fields::ComplexField;
use crate::{Error, Result};

/// Von Neumann projection: zero the field outside the region and renormalize.
///
/// Errors when the state has (numerically) no overlap with the region.
pub fn project_measurement(psi: &ComplexField, region: &[bool]) -> Result<ComplexField> {
    if region.len() != psi.grid.num_nodes() {
        return Err(Error::GridMismatch("measurement region".into()));
    }
    if !region.iter().any(|&r| r) {
        return Err(Error::MeasurementImpossible);
    }
    let mut out = psi.clone();
    for (v, &keep) in out.values.iter_mut().zip(region) {
        if !keep {
            *v = Default::default();
        }
    }
    let overlap = out.norm2();
    if overlap <= 1e-300 {
        return Err(Error::MeasurementImpossible);
    }
    out.normalize()?;
    Ok(out)
}

/// Probability that a measurement finds the system inside the region.
pub fn region_probability(psi: &ComplexField, region: &[bool]) -> f64 {
    psi.grid.integrate(|idx| if region[idx] { psi.values[idx].norm_sqr() } else { 0.0 })
}
