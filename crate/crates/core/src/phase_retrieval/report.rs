//! Per-(arc, operator) retrieval error rows.

use std::io::Write;

use serde::Serialize;

use super::{OpTag, Retrieval, RetrievalGeometry};
use crate::forward::FieldTrace;
use crate::harness::metrics::{rel_inf_error, rel_l2_error, MetricError};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorRow {
    pub k: f64,
    pub j: usize,
    pub op_tag: &'static str,
    pub rel_l2: f64,
    pub rel_inf: f64,
    pub det_min: f64,
    pub bound: f64,
}

/// Compares retrieved against true fields arc by arc. Arcs whose true field
/// vanishes are skipped.
pub fn error_rows(truth: &FieldTrace, r: &Retrieval, g: &RetrievalGeometry) -> Vec<ErrorRow> {
    let mut rows = Vec::new();
    for (arc, idx) in g.arcs.iter().zip(g.partition(&truth.points)) {
        for tag in OpTag::BOTH {
            let pick = |t: &FieldTrace| -> Vec<_> {
                let src = match tag {
                    OpTag::Identity => &t.u,
                    OpTag::Laplacian => &t.laplacian_u,
                };
                idx.iter().map(|&i| src[i]).collect()
            };
            let (exact, approx) = (pick(truth), pick(&r.field));
            let (l2, inf) = match (
                rel_l2_error(&approx, &exact),
                rel_inf_error(&approx, &exact),
            ) {
                (Ok(l2), Ok(inf)) => (l2, inf),
                (Err(MetricError::ZeroReference), _) | (_, Err(MetricError::ZeroReference)) => {
                    continue
                }
                (Err(e), _) | (_, Err(e)) => unreachable!("arc slices share one partition: {e}"),
            };
            let rep = r.report(arc.j, tag);
            rows.push(ErrorRow {
                k: truth.k,
                j: arc.j,
                op_tag: tag.as_str(),
                rel_l2: l2,
                rel_inf: inf,
                det_min: rep.map_or(f64::NAN, |r| r.det_min),
                bound: rep.map_or(f64::NAN, |r| r.bound),
            });
        }
    }
    rows
}

/// CSV columns: `k, j, op_tag, rel_l2, rel_inf, det_min, bound`.
pub fn write_error_report<W: Write>(w: W, rows: &[ErrorRow]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}
