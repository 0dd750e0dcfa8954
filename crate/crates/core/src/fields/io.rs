//! Field serialization: CSV for inspection, a compact little-endian binary
//! record for exact round trips.

use num_complex::Complex64;
use std::io::{Read, Write};
use std::sync::Arc;

use super::{BoundaryCondition, ComplexField, Grid, RealField};
use crate::{Error, Result};

fn write_header<W: Write>(w: &mut W, grid: &Grid, t: f64, ncomp: u32) -> Result<()> {
    w.write_all(&(grid.dims() as u32).to_le_bytes())?;
    let bc = match grid.bc() {
        BoundaryCondition::DirichletZero => 0u32,
        BoundaryCondition::Periodic => 1u32,
    };
    w.write_all(&bc.to_le_bytes())?;
    w.write_all(&ncomp.to_le_bytes())?;
    w.write_all(&(grid.n(0) as u64).to_le_bytes())?;
    w.write_all(&(grid.n(1) as u64).to_le_bytes())?;
    for axis in 0..2 {
        w.write_all(&grid.lower(axis).to_le_bytes())?;
        w.write_all(&grid.upper(axis).to_le_bytes())?;
    }
    w.write_all(&t.to_le_bytes())?;
    Ok(())
}

struct Header {
    grid: Arc<Grid>,
    t: f64,
    ncomp: u32,
}

fn read_header<R: Read>(r: &mut R) -> Result<Header> {
    let mut u32buf = [0u8; 4];
    let mut u64buf = [0u8; 8];
    let mut next_u32 = |r: &mut R| -> Result<u32> {
        r.read_exact(&mut u32buf)?;
        Ok(u32::from_le_bytes(u32buf))
    };
    let dims = next_u32(r)? as usize;
    let bc = match next_u32(r)? {
        0 => BoundaryCondition::DirichletZero,
        1 => BoundaryCondition::Periodic,
        other => return Err(Error::InvalidGrid(format!("unknown boundary tag {other}"))),
    };
    let ncomp = next_u32(r)?;
    let mut next_u64 = |r: &mut R| -> Result<u64> {
        r.read_exact(&mut u64buf)?;
        Ok(u64::from_le_bytes(u64buf))
    };
    let nx = next_u64(r)? as usize;
    let ny = next_u64(r)? as usize;
    let mut next_f64 = |r: &mut R| -> Result<f64> {
        r.read_exact(&mut u64buf)?;
        Ok(f64::from_le_bytes(u64buf))
    };
    let mut lower = [0.0; 2];
    let mut upper = [0.0; 2];
    for axis in 0..2 {
        lower[axis] = next_f64(r)?;
        upper[axis] = next_f64(r)?;
    }
    let t = next_f64(r)?;
    let grid = if dims == 1 {
        Grid::new_1d(lower[0], upper[0], nx, bc)?
    } else {
        Grid::new_2d(lower, upper, [nx, ny], bc)?
    };
    Ok(Header { grid, t, ncomp })
}

fn read_payload<R: Read>(r: &mut R, count: usize) -> Result<Vec<f64>> {
    let mut bytes = vec![0u8; count * 8];
    r.read_exact(&mut bytes)?;
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect())
}

pub fn write_complex_binary<W: Write>(w: &mut W, field: &ComplexField) -> Result<()> {
    write_header(w, &field.grid, field.t, 2)?;
    for v in &field.values {
        w.write_all(&v.re.to_le_bytes())?;
        w.write_all(&v.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_complex_binary<R: Read>(r: &mut R) -> Result<ComplexField> {
    let h = read_header(r)?;
    if h.ncomp != 2 {
        return Err(Error::InvalidGrid(format!("expected complex record, ncomp = {}", h.ncomp)));
    }
    let raw = read_payload(r, h.grid.num_nodes() * 2)?;
    let values = raw.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect();
    ComplexField::new(h.grid, values, h.t)
}

pub fn write_real_binary<W: Write>(w: &mut W, field: &RealField) -> Result<()> {
    write_header(w, &field.grid, 0.0, 1)?;
    for v in &field.values {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_real_binary<R: Read>(r: &mut R) -> Result<RealField> {
    let h = read_header(r)?;
    if h.ncomp != 1 {
        return Err(Error::InvalidGrid(format!("expected real record, ncomp = {}", h.ncomp)));
    }
    let values = read_payload(r, h.grid.num_nodes())?;
    RealField::new(h.grid, values)
}

/// CSV export: node coordinates followed by re/im columns.
pub fn write_complex_csv<W: Write>(w: &mut W, field: &ComplexField) -> Result<()> {
    if field.grid.dims() == 1 {
        writeln!(w, "x,re,im")?;
    } else {
        writeln!(w, "x,y,re,im")?;
    }
    for idx in 0..field.grid.num_nodes() {
        let p = field.grid.position(idx);
        let v = field.values[idx];
        if field.grid.dims() == 1 {
            writeln!(w, "{},{},{}", p[0], v.re, v.im)?;
        } else {
            writeln!(w, "{},{},{},{}", p[0], p[1], v.re, v.im)?;
        }
    }
    Ok(())
}

pub fn write_real_csv<W: Write>(w: &mut W, field: &RealField, column: &str) -> Result<()> {
    if field.grid.dims() == 1 {
        writeln!(w, "x,{column}")?;
    } else {
        writeln!(w, "x,y,{column}")?;
    }
    for idx in 0..field.grid.num_nodes() {
        let p = field.grid.position(idx);
        if field.grid.dims() == 1 {
            writeln!(w, "{},{}", p[0], field.values[idx])?;
        } else {
            writeln!(w, "{},{},{}", p[0], p[1], field.values[idx])?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_binary_round_trip_is_exact() {
        let g = Grid::new_1d(-2.0, 2.0, 33, BoundaryCondition::DirichletZero).unwrap();
        let f = ComplexField::from_fn(&g, 1.25, |p| Complex64::new(p[0].sin(), p[0].cos()));
        let mut buf = Vec::new();
        write_complex_binary(&mut buf, &f).unwrap();
        let back = read_complex_binary(&mut buf.as_slice()).unwrap();
        assert_eq!(back.t, f.t);
        assert!(back.grid.same_layout(&f.grid));
        assert_eq!(back.values, f.values);
    }

    #[test]
    fn real_binary_round_trip_2d() {
        let g = Grid::new_2d([-1.0, 0.0], [1.0, 3.0], [9, 12], BoundaryCondition::Periodic)
            .unwrap();
        let f = RealField::from_fn(&g, |p| p[0] * p[1] + 0.5);
        let mut buf = Vec::new();
        write_real_binary(&mut buf, &f).unwrap();
        let back = read_real_binary(&mut buf.as_slice()).unwrap();
        assert!(back.grid.same_layout(&f.grid));
        assert_eq!(back.values, f.values);
    }

    #[test]
    fn csv_has_expected_shape() {
        let g = Grid::new_1d(0.0, 1.0, 8, BoundaryCondition::Periodic).unwrap();
        let f = ComplexField::from_fn(&g, 0.0, |_| Complex64::new(1.0, -1.0));
        let mut buf = Vec::new();
        write_complex_csv(&mut buf, &f).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 9);
        assert_eq!(lines[0], "x,re,im");
    }
}
