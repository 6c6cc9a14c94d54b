//! Phase retrieval with two reference point sources per measurement arc.
//!
//! For a reference `Ψ = -c Φ_k(·, z)` write `Φ_k(x, z) = -(A + iB)/8` with
//! `r = |x - z|`:
//!
//! `A^I = (Y0(kr) + H0(kr))/k²`, `B^I = -J0(kr)/k²`,
//! `A^Δ = H0(kr) - Y0(kr)`,    `B^Δ = J0(kr)`.
//!
//! Then `|v|² = |u|² + (c/4)(A Re u + B Im u) + c²(A² + B²)/64`, so each
//! reference yields one real linear equation `A Re u + B Im u = f`, and two
//! references on the same arc determine `u` by Cramer's rule. The same holds
//! for `Δu` with the Δ coefficients.

mod report;

use std::f64::consts::PI;
use std::fmt;

use log::warn;
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::forward::{
    self, FieldTrace, ForwardError, NoiseModel, PhaselessTrace, Point2, ReferenceChannel,
};
use crate::specfun;

pub use report::{error_rows, write_error_report, ErrorRow};

/// Arcs whose `‖u‖_{j,∞}` falls below this fraction of the global maximum are
/// treated as carrying no field.
pub const DEGENERATE_FRACTION: f64 = 1e-14;

/// Angular slack when assigning points to arcs, in units of one arc span.
const ARC_SLACK: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum RetrievalError {
    #[error("invalid retrieval parameters: {0}")]
    Params(String),
    #[error("reference point coincides with measurement point (distance {0})")]
    Singular(f64),
    #[error("scaling factor must be positive, got {0}")]
    Scaling(f64),
    #[error("arc has no field: max |u| = 0")]
    Degenerate,
    #[error("2x2 system is ill-conditioned: |det| = {det:e} below {threshold:e}")]
    IllConditioned { det: f64, threshold: f64 },
    #[error("arc {j}, point {point}, k = {k}, tag {tag}: {source}")]
    AtPoint {
        j: usize,
        point: usize,
        k: f64,
        tag: OpTag,
        #[source]
        source: Box<RetrievalError>,
    },
    #[error("trace lacks reference channel (j = {j}, ell = {ell})")]
    MissingChannel { j: usize, ell: usize },
    #[error("trace wavenumber {trace} does not match geometry wavenumber {geometry}")]
    WavenumberMismatch { trace: f64, geometry: f64 },
    #[error(transparent)]
    Forward(#[from] ForwardError),
}

pub type Result<T> = std::result::Result<T, RetrievalError>;

/// Operator applied to the field: the field itself or its Laplacian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum OpTag {
    #[serde(rename = "I")]
    Identity,
    #[serde(rename = "Delta")]
    Laplacian,
}

impl OpTag {
    pub const BOTH: [OpTag; 2] = [OpTag::Identity, OpTag::Laplacian];

    pub fn as_str(self) -> &'static str {
        match self {
            OpTag::Identity => "I",
            OpTag::Laplacian => "Delta",
        }
    }
}

impl fmt::Display for OpTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetrievalParams {
    pub a: f64,
    pub m: usize,
    pub tau: f64,
    pub k0: f64,
}

impl RetrievalParams {
    /// `k0 = π/(30a)`.
    pub fn new(a: f64, m: usize, tau: f64) -> Result<Self> {
        let p = Self {
            a,
            m,
            tau,
            k0: PI / (30.0 * a),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.a.is_finite()) {
            return Err(RetrievalError::Params(format!(
                "half-width a = {} must be positive",
                self.a
            )));
        }
        if self.m < 10 {
            return Err(RetrievalError::Params(format!(
                "m = {} must be at least 10",
                self.m
            )));
        }
        if !(self.tau >= 6.0 && self.tau.is_finite()) {
            return Err(RetrievalError::Params(format!(
                "tau = {} must be at least 6",
                self.tau
            )));
        }
        if !(self.k0 > 0.0 && self.k0 * 6.0 * self.a < 1.0) {
            return Err(RetrievalError::Params(format!(
                "k0 = {} must satisfy 0 < k0 R < 1",
                self.k0
            )));
        }
        Ok(())
    }

    pub fn is_k0(&self, k: f64) -> bool {
        (k - self.k0).abs() <= 1e-12 * self.k0
    }

    /// Measurement radius: `6a` at `k0`, `τa` otherwise.
    pub fn radius(&self, k: f64) -> f64 {
        if self.is_k0(k) {
            6.0 * self.a
        } else {
            self.tau * self.a
        }
    }

    /// `(λ1, λ2)`: `λ1 = 1/2`; `λ2 = -3/2` at `k0`, else `1/2 + π/(2kR)`.
    pub fn lambdas(&self, k: f64) -> [f64; 2] {
        if self.is_k0(k) {
            [0.5, -1.5]
        } else {
            [0.5, 0.5 + PI / (2.0 * k * self.radius(k))]
        }
    }

    /// `M = (1.74 - 3/(2τ))/2`.
    pub fn m_constant(&self) -> f64 {
        0.5 * (1.74 - 3.0 / (2.0 * self.tau))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArcGeometry {
    /// 1-based arc index.
    pub j: usize,
    /// `ϑ_{2j-2}`
    pub start: f64,
    /// `ϑ_{2j}`
    pub end: f64,
    /// `ϑ_{2j-1}`
    pub midline: f64,
    pub lambda: [f64; 2],
    pub z: [Point2; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct RetrievalGeometry {
    pub k: f64,
    pub radius: f64,
    pub params: RetrievalParams,
    pub arcs: Vec<ArcGeometry>,
}

/// Arcs `[ϑ_{2j-2}, ϑ_{2j})`, `ϑ_i = iπ/m`, with reference points
/// `z_{j,ℓ} = λ_ℓ R (cos ϑ_{2j-1}, sin ϑ_{2j-1})`.
pub fn build_geometry(p: &RetrievalParams, k: f64) -> Result<RetrievalGeometry> {
    p.validate()?;
    if !(k > 0.0 && k.is_finite()) {
        return Err(RetrievalError::Params(format!(
            "wavenumber {k} must be positive"
        )));
    }
    let radius = p.radius(k);
    let lambda = p.lambdas(k);
    let theta = |i: usize| i as f64 * PI / p.m as f64;
    let arcs = (1..=p.m)
        .map(|j| {
            let midline = theta(2 * j - 1);
            let dir = Point2::polar(1.0, midline);
            ArcGeometry {
                j,
                start: theta(2 * j - 2),
                end: theta(2 * j),
                midline,
                lambda,
                z: [dir.scale(lambda[0] * radius), dir.scale(lambda[1] * radius)],
            }
        })
        .collect();
    Ok(RetrievalGeometry {
        k,
        radius,
        params: *p,
        arcs,
    })
}

impl RetrievalGeometry {
    /// 1-based arc containing polar angle `theta`.
    pub fn arc_of(&self, theta: f64) -> usize {
        let m = self.arcs.len();
        let t = theta.rem_euclid(2.0 * PI);
        let idx = (t * m as f64 / (2.0 * PI) + ARC_SLACK).floor() as usize;
        idx % m + 1
    }

    /// Point indices per arc (index 0 holds arc 1).
    pub fn partition(&self, points: &[Point2]) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.arcs.len()];
        for (i, p) in points.iter().enumerate() {
            out[self.arc_of(p.x2.atan2(p.x1)) - 1].push(i);
        }
        out
    }
}

/// `‖u‖_{j,∞} / ‖Φ_k(·, z)‖_{j,∞}` from magnitudes on one arc.
pub fn scaling_factor(
    abs_u_on_arc: &[f64],
    k: f64,
    z: Point2,
    arc_points: &[Point2],
) -> Result<f64> {
    if abs_u_on_arc.is_empty() || abs_u_on_arc.len() != arc_points.len() {
        return Err(RetrievalError::Params(
            "arc must be nonempty and match its magnitudes".into(),
        ));
    }
    let num = abs_u_on_arc.iter().copied().fold(0.0, f64::max);
    if num == 0.0 {
        return Err(RetrievalError::Degenerate);
    }
    let mut den = 0.0f64;
    for &x in arc_points {
        den = den.max(forward::phi(k, x, z)?.norm());
    }
    Ok(num / den)
}

/// `(A, B)` with `Φ = -(A + iB)/8` (tag I) or `ΔΦ = -(A + iB)/8` (tag Δ).
pub fn coefficients(k: f64, r: f64, tag: OpTag) -> Result<(f64, f64)> {
    if !(r > 0.0) {
        return Err(RetrievalError::Singular(r));
    }
    let x = k * r;
    let (j0, y0, h0) = (
        specfun::bessel_j(0, x).map_err(|e| RetrievalError::Params(e.to_string()))?,
        specfun::bessel_y(0, x).map_err(|e| RetrievalError::Params(e.to_string()))?,
        specfun::h0_tilde(x).map_err(|e| RetrievalError::Params(e.to_string()))?,
    );
    Ok(match tag {
        OpTag::Identity => ((y0 + h0) / (k * k), -j0 / (k * k)),
        OpTag::Laplacian => (h0 - y0, j0),
    })
}

/// `f = (4/c)(|v|² - |u|²) - (c/16)(A² + B²)`.
pub fn rhs_f(abs_v: f64, abs_u: f64, c: f64, a: f64, b: f64) -> Result<f64> {
    if !(c > 0.0) {
        return Err(RetrievalError::Scaling(c));
    }
    Ok(4.0 / c * (abs_v * abs_v - abs_u * abs_u) - c / 16.0 * (a * a + b * b))
}

/// Solves `A_ℓ Re u + B_ℓ Im u = f_ℓ`, `ℓ = 1, 2`.
pub fn retrieve_point(f1: f64, f2: f64, a1: f64, b1: f64, a2: f64, b2: f64) -> Result<Complex64> {
    let det = a1 * b2 - a2 * b1;
    let scale = a1.abs().max(b1.abs()).max(a2.abs()).max(b2.abs());
    let threshold = 1e3 * f64::EPSILON * scale * scale;
    if !(det.abs() > threshold) {
        return Err(RetrievalError::IllConditioned {
            det: det.abs(),
            threshold,
        });
    }
    Ok(Complex64::new(
        (f1 * b2 - f2 * b1) / det,
        (a1 * f2 - a2 * f1) / det,
    ))
}

/// Theoretical floor for `|det D|`: tag I `M/(k⁵R)` (`3/(20k0⁴)` at `k0`);
/// tag Δ the same times `k⁴`.
pub fn det_lower_bound(k: f64, p: &RetrievalParams, tag: OpTag) -> f64 {
    let base = if p.is_k0(k) {
        3.0 / (20.0 * k.powi(4))
    } else {
        p.m_constant() / (k.powi(5) * p.radius(k))
    };
    match tag {
        OpTag::Identity => base,
        OpTag::Laplacian => base * k.powi(4),
    }
}

/// Scaling factors `c_{j,ℓ}` for one arc, or `None` for a degenerate arc.
fn arc_scaling(
    abs_u: &[f64],
    global_max: f64,
    k: f64,
    arc: &ArcGeometry,
    pts: &[Point2],
) -> Result<Option<[f64; 2]>> {
    let local = abs_u.iter().copied().fold(0.0, f64::max);
    if !(local > DEGENERATE_FRACTION * global_max) {
        return Ok(None);
    }
    Ok(Some([
        scaling_factor(abs_u, k, arc.z[0], pts)?,
        scaling_factor(abs_u, k, arc.z[1], pts)?,
    ]))
}

fn check_k(trace: f64, g: &RetrievalGeometry) -> Result<()> {
    if (trace - g.k).abs() > 1e-12 * g.k {
        return Err(RetrievalError::WavenumberMismatch {
            trace,
            geometry: g.k,
        });
    }
    Ok(())
}

/// Phaseless measurements of a phased trace: `|u|`, `|Δu|` and, for every
/// arc and reference, `|u + Ψ|` and `|Δ(u + Ψ)|`.
///
/// With noise, `|u|` and `|Δu|` are perturbed first, the scaling factors are
/// computed from the perturbed `|u|`, and the reference magnitudes are
/// perturbed after superposition.
pub fn acquire(
    field: &FieldTrace,
    g: &RetrievalGeometry,
    noise: Option<&NoiseModel>,
) -> Result<PhaselessTrace> {
    check_k(field.k, g)?;
    let k = field.k;
    let mut pt = PhaselessTrace::from_field(field);
    if let Some(n) = noise {
        n.perturb(&mut pt.abs_u, k, forward::noise_channel::ABS_U);
        n.perturb(
            &mut pt.abs_laplacian_u,
            k,
            forward::noise_channel::ABS_LAP_U,
        );
    }
    let global = pt.abs_u.iter().copied().fold(0.0, f64::max);
    for (arc, idx) in g.arcs.iter().zip(g.partition(&field.points)) {
        if idx.is_empty() {
            continue;
        }
        let pts: Vec<Point2> = idx.iter().map(|&i| field.points[i]).collect();
        let abs_u: Vec<f64> = idx.iter().map(|&i| pt.abs_u[i]).collect();
        // a degenerate arc still gets channels; retrieval zeroes it anyway
        let c = arc_scaling(&abs_u, global, k, arc, &pts)?.unwrap_or([0.0; 2]);
        for ell in 0..2 {
            let (psi, lap_psi) = forward::reference_field(k, arc.z[ell], c[ell], &pts)?;
            let mut abs_v: Vec<f64> = idx
                .iter()
                .zip(&psi)
                .map(|(&i, p)| (field.u[i] + p).norm())
                .collect();
            let mut abs_lap_v: Vec<f64> = idx
                .iter()
                .zip(&lap_psi)
                .map(|(&i, p)| (field.laplacian_u[i] + p).norm())
                .collect();
            if let Some(n) = noise {
                n.perturb(
                    &mut abs_v,
                    k,
                    forward::noise_channel::reference(arc.j, ell + 1, false),
                );
                n.perturb(
                    &mut abs_lap_v,
                    k,
                    forward::noise_channel::reference(arc.j, ell + 1, true),
                );
            }
            pt.references.push(ReferenceChannel {
                j: arc.j,
                ell: ell + 1,
                point_indices: idx.clone(),
                abs_v,
                abs_laplacian_v: abs_lap_v,
            });
        }
    }
    Ok(pt)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArcReport {
    pub j: usize,
    pub tag: OpTag,
    /// Smallest `|det D|` over the arc's points; infinite for empty or
    /// degenerate arcs.
    pub det_min: f64,
    pub bound: f64,
    pub degenerate: bool,
    pub scaling: [f64; 2],
}

#[derive(Debug, Clone)]
pub struct Retrieval {
    pub field: FieldTrace,
    pub arcs: Vec<ArcReport>,
}

impl Retrieval {
    pub fn report(&self, j: usize, tag: OpTag) -> Option<&ArcReport> {
        self.arcs.iter().find(|r| r.j == j && r.tag == tag)
    }
}

fn channel<'a>(
    pt: &'a PhaselessTrace,
    j: usize,
    ell: usize,
    idx: &[usize],
) -> Result<&'a ReferenceChannel> {
    pt.reference(j, ell)
        .filter(|c| c.point_indices == idx)
        .ok_or(RetrievalError::MissingChannel { j, ell })
}

/// Recovers phased `u` and `Δu` on every arc from phaseless data.
pub fn retrieve_trace(pt: &PhaselessTrace, g: &RetrievalGeometry) -> Result<Retrieval> {
    check_k(pt.k, g)?;
    let k = pt.k;
    let mut field = FieldTrace::zeros(k, pt.points.clone());
    let mut reports = Vec::with_capacity(2 * g.arcs.len());
    let global = pt.abs_u.iter().copied().fold(0.0, f64::max);
    for (arc, idx) in g.arcs.iter().zip(g.partition(&pt.points)) {
        let pts: Vec<Point2> = idx.iter().map(|&i| pt.points[i]).collect();
        let abs_u: Vec<f64> = idx.iter().map(|&i| pt.abs_u[i]).collect();
        let scaling = if idx.is_empty() {
            None
        } else {
            arc_scaling(&abs_u, global, k, arc, &pts)?
        };
        let Some(c) = scaling else {
            if !idx.is_empty() {
                warn!(
                    "k = {k}, arc {}: no measurable field, retrieved as zero",
                    arc.j
                );
            }
            for tag in OpTag::BOTH {
                reports.push(ArcReport {
                    j: arc.j,
                    tag,
                    det_min: f64::INFINITY,
                    bound: det_lower_bound(k, &g.params, tag),
                    degenerate: !idx.is_empty(),
                    scaling: [0.0; 2],
                });
            }
            continue;
        };
        let chans = [channel(pt, arc.j, 1, &idx)?, channel(pt, arc.j, 2, &idx)?];
        for tag in OpTag::BOTH {
            let mut det_min = f64::INFINITY;
            for (pos, (&i, &x)) in idx.iter().zip(&pts).enumerate() {
                let at = |e: RetrievalError| RetrievalError::AtPoint {
                    j: arc.j,
                    point: i,
                    k,
                    tag,
                    source: Box::new(e),
                };
                let (abs_w, abs_v) = match tag {
                    OpTag::Identity => (pt.abs_u[i], [chans[0].abs_v[pos], chans[1].abs_v[pos]]),
                    OpTag::Laplacian => (
                        pt.abs_laplacian_u[i],
                        [chans[0].abs_laplacian_v[pos], chans[1].abs_laplacian_v[pos]],
                    ),
                };
                let (a1, b1) = coefficients(k, x.dist(arc.z[0]), tag).map_err(at)?;
                let (a2, b2) = coefficients(k, x.dist(arc.z[1]), tag).map_err(at)?;
                let f1 = rhs_f(abs_v[0], abs_w, c[0], a1, b1).map_err(at)?;
                let f2 = rhs_f(abs_v[1], abs_w, c[1], a2, b2).map_err(at)?;
                det_min = det_min.min((a1 * b2 - a2 * b1).abs());
                let w = retrieve_point(f1, f2, a1, b1, a2, b2).map_err(at)?;
                match tag {
                    OpTag::Identity => field.u[i] = w,
                    OpTag::Laplacian => field.laplacian_u[i] = w,
                }
            }
            reports.push(ArcReport {
                j: arc.j,
                tag,
                det_min,
                bound: det_lower_bound(k, &g.params, tag),
                degenerate: false,
                scaling: c,
            });
        }
    }
    Ok(Retrieval {
        field,
        arcs: reports,
    })
}

/// One determinant evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetSample {
    pub j: usize,
    pub point_index: usize,
    pub tag: OpTag,
    pub det: f64,
}

/// `|det D|` at every point for both tags; depends only on the geometry.
pub fn det_sweep(g: &RetrievalGeometry, points: &[Point2]) -> Result<Vec<DetSample>> {
    let mut out = Vec::with_capacity(2 * points.len());
    for (arc, idx) in g.arcs.iter().zip(g.partition(points)) {
        for &i in &idx {
            let (r1, r2) = (points[i].dist(arc.z[0]), points[i].dist(arc.z[1]));
            for tag in OpTag::BOTH {
                let (a1, b1) = coefficients(g.k, r1, tag)?;
                let (a2, b2) = coefficients(g.k, r2, tag)?;
                out.push(DetSample {
                    j: arc.j,
                    point_index: i,
                    tag,
                    det: (a1 * b2 - a2 * b1).abs(),
                });
            }
        }
    }
    Ok(out)
}
