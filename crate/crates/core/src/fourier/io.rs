//! Coefficient tables and reconstruction grids.
//!
//! Coefficient CSV: `l1,l2,re,im,flag`. Integer indices carry `flag = l`.
//! One row with `flag = l0` holds the constant-mode coefficient, with `l1`
//! set to `λ` and `l2 = 0`.
//!
//! Grid binary: three little-endian `u32` (`nx`, `ny`, version) followed by
//! `nx·ny` little-endian `f64` in row-major order, `x1` fastest.

use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{FourierCoefficientMap, FourierError, Reconstruction, Result};

pub const GRID_BIN_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct CoefficientRow {
    l1: String,
    l2: i32,
    re: f64,
    im: f64,
    flag: String,
}

pub fn write_coefficients_csv<W: Write>(w: W, map: &FourierCoefficientMap) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for l in map.indices() {
        let v = map.get(l).ok_or(FourierError::MissingCoefficient(l))?;
        out.serialize(CoefficientRow {
            l1: l[0].to_string(),
            l2: l[1],
            re: v.re,
            im: v.im,
            flag: "l".into(),
        })?;
    }
    let v = map
        .zeroth()
        .ok_or(FourierError::MissingCoefficient([0, 0]))?;
    out.serialize(CoefficientRow {
        l1: map.lambda.to_string(),
        l2: 0,
        re: v.re,
        im: v.im,
        flag: "l0".into(),
    })?;
    out.flush()?;
    Ok(())
}

/// Reads a table written by [`write_coefficients_csv`] for half-width `a`.
pub fn read_coefficients_csv<R: Read>(r: R, a: f64) -> Result<FourierCoefficientMap> {
    let mut rows = Vec::new();
    let mut zeroth = None;
    for row in csv::Reader::from_reader(r).deserialize::<CoefficientRow>() {
        let row = row?;
        let parse_err =
            |e: &dyn std::fmt::Display| FourierError::Format(format!("l1 = {:?}: {e}", row.l1));
        let v = Complex64::new(row.re, row.im);
        match row.flag.as_str() {
            "l" => rows.push((
                [row.l1.parse::<i32>().map_err(|e| parse_err(&e))?, row.l2],
                v,
            )),
            "l0" => zeroth = Some((row.l1.parse::<f64>().map_err(|e| parse_err(&e))?, v)),
            other => return Err(FourierError::Format(format!("unknown flag {other:?}"))),
        }
    }
    let (lambda, s0) = zeroth.ok_or_else(|| FourierError::Format("no l0 row".into()))?;
    let n = rows
        .iter()
        .map(|(l, _)| l[0].unsigned_abs().max(l[1].unsigned_abs()))
        .max()
        .unwrap_or(0) as usize;
    let mut map = FourierCoefficientMap::new(n, a, lambda);
    for (l, v) in rows {
        map.set(l, v)?;
    }
    map.set_zeroth(s0);
    Ok(map)
}

#[derive(Serialize)]
struct GridRow {
    x1: f64,
    x2: f64,
    value: f64,
}

pub fn write_grid_csv<W: Write>(w: W, r: &Reconstruction) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for (p, &value) in r.grid.points().zip(&r.values) {
        out.serialize(GridRow {
            x1: p.x1,
            x2: p.x2,
            value,
        })?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_grid_bin<W: Write>(mut w: W, r: &Reconstruction) -> Result<()> {
    for h in [r.grid.nx() as u32, r.grid.ny() as u32, GRID_BIN_VERSION] {
        w.write_all(&h.to_le_bytes())?;
    }
    for v in &r.values {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

/// `(nx, ny, values)` from a grid binary.
pub fn read_grid_bin<R: Read>(mut r: R) -> Result<(usize, usize, Vec<f64>)> {
    let mut word = [0u8; 4];
    let mut header = [0u32; 3];
    for h in &mut header {
        r.read_exact(&mut word)?;
        *h = u32::from_le_bytes(word);
    }
    let [nx, ny, version] = header;
    if version != GRID_BIN_VERSION {
        return Err(FourierError::Format(format!(
            "grid version {version}, expected {GRID_BIN_VERSION}"
        )));
    }
    let len = nx as usize * ny as usize;
    let mut bytes = Vec::with_capacity(8 * len);
    r.read_to_end(&mut bytes)?;
    if bytes.len() != 8 * len {
        return Err(FourierError::Format(format!(
            "{} payload bytes for a {nx}×{ny} grid",
            bytes.len()
        )));
    }
    let values = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    Ok((nx as usize, ny as usize, values))
}
