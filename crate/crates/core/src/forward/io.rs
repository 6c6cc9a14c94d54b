//! CSV persistence for traces. Points are stored by angle; readers rebuild
//! them on a circle of the caller-supplied radius. Several wavenumbers may
//! share one file, in which case rows are grouped by `k` in order of first
//! appearance.

use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{FieldTrace, ForwardError, PhaselessTrace, Point2, ReferenceChannel};

#[derive(Debug, Serialize, Deserialize)]
struct FieldRow {
    k: f64,
    point_index: usize,
    theta: f64,
    re_u: f64,
    im_u: f64,
    re_lap_u: f64,
    im_lap_u: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct PhaselessRow {
    k: f64,
    point_index: usize,
    theta: f64,
    abs_u: f64,
    abs_lap_u: f64,
    j: Option<usize>,
    ell: Option<usize>,
    abs_v: Option<f64>,
    abs_lap_v: Option<f64>,
}

fn theta(p: Point2) -> f64 {
    let t = p.x2.atan2(p.x1);
    if t < 0.0 {
        t + std::f64::consts::TAU
    } else {
        t
    }
}

pub fn write_field_csv<W: Write>(w: W, traces: &[FieldTrace]) -> Result<(), ForwardError> {
    let mut out = csv::Writer::from_writer(w);
    for t in traces {
        for (i, p) in t.points.iter().enumerate() {
            out.serialize(FieldRow {
                k: t.k,
                point_index: i,
                theta: theta(*p),
                re_u: t.u[i].re,
                im_u: t.u[i].im,
                re_lap_u: t.laplacian_u[i].re,
                im_lap_u: t.laplacian_u[i].im,
            })?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Partition rows into runs sharing the same `k` (first-appearance order).
fn group_by_k<T>(rows: Vec<T>, k_of: impl Fn(&T) -> f64) -> Vec<(f64, Vec<T>)> {
    let mut groups: Vec<(f64, Vec<T>)> = Vec::new();
    for row in rows {
        let k = k_of(&row);
        match groups.iter_mut().find(|(g, _)| g.to_bits() == k.to_bits()) {
            Some((_, v)) => v.push(row),
            None => groups.push((k, vec![row])),
        }
    }
    groups
}

pub fn read_field_csv<R: Read>(r: R, radius: f64) -> Result<Vec<FieldTrace>, ForwardError> {
    let rows: Vec<FieldRow> = csv::Reader::from_reader(r)
        .deserialize()
        .collect::<Result<_, _>>()?;
    group_by_k(rows, |r| r.k)
        .into_iter()
        .map(|(k, mut rows)| {
            rows.sort_by_key(|r| r.point_index);
            if rows.iter().enumerate().any(|(i, r)| r.point_index != i) {
                return Err(ForwardError::Format(format!(
                    "k = {k}: point indices are not 0..n"
                )));
            }
            Ok(FieldTrace {
                k,
                points: rows
                    .iter()
                    .map(|r| Point2::polar(radius, r.theta))
                    .collect(),
                u: rows
                    .iter()
                    .map(|r| Complex64::new(r.re_u, r.im_u))
                    .collect(),
                laplacian_u: rows
                    .iter()
                    .map(|r| Complex64::new(r.re_lap_u, r.im_lap_u))
                    .collect(),
            })
        })
        .collect()
}

/// One row per (point, reference channel covering it); points outside every
/// channel get a single row with empty reference columns.
pub fn write_phaseless_csv<W: Write>(w: W, traces: &[PhaselessTrace]) -> Result<(), ForwardError> {
    let mut out = csv::Writer::from_writer(w);
    for t in traces {
        let mut covering: Vec<Vec<(usize, usize)>> = vec![Vec::new(); t.points.len()];
        for (c, ch) in t.references.iter().enumerate() {
            for (pos, &i) in ch.point_indices.iter().enumerate() {
                covering[i].push((c, pos));
            }
        }
        for (i, p) in t.points.iter().enumerate() {
            let base = |j, ell, abs_v, abs_lap_v| PhaselessRow {
                k: t.k,
                point_index: i,
                theta: theta(*p),
                abs_u: t.abs_u[i],
                abs_lap_u: t.abs_laplacian_u[i],
                j,
                ell,
                abs_v,
                abs_lap_v,
            };
            if covering[i].is_empty() {
                out.serialize(base(None, None, None, None))?;
            }
            for &(c, pos) in &covering[i] {
                let ch = &t.references[c];
                out.serialize(base(
                    Some(ch.j),
                    Some(ch.ell),
                    Some(ch.abs_v[pos]),
                    Some(ch.abs_laplacian_v[pos]),
                ))?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

pub fn read_phaseless_csv<R: Read>(r: R, radius: f64) -> Result<Vec<PhaselessTrace>, ForwardError> {
    let rows: Vec<PhaselessRow> = csv::Reader::from_reader(r)
        .deserialize()
        .collect::<Result<_, _>>()?;
    group_by_k(rows, |r| r.k)
        .into_iter()
        .map(|(k, rows)| {
            let n = rows.iter().map(|r| r.point_index + 1).max().unwrap_or(0);
            let mut thetas = vec![None; n];
            let mut abs_u = vec![0.0; n];
            let mut abs_laplacian_u = vec![0.0; n];
            let mut references: Vec<ReferenceChannel> = Vec::new();
            for r in &rows {
                thetas[r.point_index] = Some(r.theta);
                abs_u[r.point_index] = r.abs_u;
                abs_laplacian_u[r.point_index] = r.abs_lap_u;
                let (Some(j), Some(ell)) = (r.j, r.ell) else {
                    continue;
                };
                let (Some(v), Some(lv)) = (r.abs_v, r.abs_lap_v) else {
                    return Err(ForwardError::Format(format!(
                        "k = {k}, point {}: reference row without magnitudes",
                        r.point_index
                    )));
                };
                let ch = match references.iter_mut().position(|c| c.j == j && c.ell == ell) {
                    Some(c) => &mut references[c],
                    None => {
                        references.push(ReferenceChannel {
                            j,
                            ell,
                            point_indices: Vec::new(),
                            abs_v: Vec::new(),
                            abs_laplacian_v: Vec::new(),
                        });
                        references.last_mut().expect("just pushed")
                    }
                };
                ch.point_indices.push(r.point_index);
                ch.abs_v.push(v);
                ch.abs_laplacian_v.push(lv);
            }
            let points = thetas
                .into_iter()
                .enumerate()
                .map(|(i, t)| {
                    t.map(|t| Point2::polar(radius, t))
                        .ok_or_else(|| ForwardError::Format(format!("k = {k}: missing point {i}")))
                })
                .collect::<Result<_, _>>()?;
            references.sort_by_key(|c| (c.j, c.ell));
            Ok(PhaselessTrace {
                k,
                points,
                abs_u,
                abs_laplacian_u,
                references,
            })
        })
        .collect()
}
