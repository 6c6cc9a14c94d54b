//! Radiated biharmonic fields: the outgoing fundamental solution, quadrature
//! synthesis of `u` and `Δu` on measurement points, reference point sources
//! and the multiplicative magnitude noise model.
//!
//! With `r = |x - y|`,
//!
//! `Φ_k  = (i J0(kr) - Y0(kr) - H0(kr)) / (8k^2)`
//! `ΔΦ_k = (Y0(kr) - H0(kr) - i J0(kr)) / 8`
//!
//! where `H0 = (2/π) K0` is the decaying modified-Helmholtz part.

mod io;
mod noise;
mod quadrature;

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::specfun;

pub use io::{read_field_csv, read_phaseless_csv, write_field_csv, write_phaseless_csv};
pub use noise::{add_noise, channel as noise_channel, NoiseModel};
pub use quadrature::{Node, QuadratureRule, QuadratureScheme};

#[derive(Debug, Error)]
pub enum ForwardError {
    #[error("evaluation point {x:?} coincides with source point {y:?}")]
    Singular { x: Point2, y: Point2 },
    #[error("wavenumber must be positive and finite, got {0}")]
    Wavenumber(f64),
    #[error("measurement point {index} at {point:?} lies inside the disc of radius {radius} containing the source box")]
    InsideSource {
        index: usize,
        point: Point2,
        radius: f64,
    },
    #[error("noise level {0} outside [0, 1)")]
    NoiseLevel(f64),
    #[error("quadrature: {0}")]
    Quadrature(String),
    #[error("malformed trace data: {0}")]
    Format(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub x1: f64,
    pub x2: f64,
}

impl Point2 {
    pub const fn new(x1: f64, x2: f64) -> Self {
        Self { x1, x2 }
    }

    pub fn polar(radius: f64, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::new(radius * c, radius * s)
    }

    pub fn norm(self) -> f64 {
        self.x1.hypot(self.x2)
    }

    pub fn dist(self, other: Point2) -> f64 {
        (self.x1 - other.x1).hypot(self.x2 - other.x2)
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x1 * other.x1 + self.x2 * other.x2
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(s * self.x1, s * self.x2)
    }
}

/// `n` equiangular points `θ_i = 2πi/n` on the circle of the given radius.
pub fn circle_points(radius: f64, n: usize) -> Vec<Point2> {
    circle_angles(n).map(|t| Point2::polar(radius, t)).collect()
}

pub fn circle_angles(n: usize) -> impl ExactSizeIterator<Item = f64> + Clone {
    (0..n).map(move |i| 2.0 * PI * i as f64 / n as f64)
}

/// A real source supported in `(-a, a)^2`; the evaluator is clipped to zero
/// outside the box.
#[derive(Clone)]
pub struct SourceField {
    evaluator: Arc<dyn Fn(Point2) -> f64 + Send + Sync>,
    half_width: f64,
}

impl SourceField {
    pub fn new(half_width: f64, f: impl Fn(Point2) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            evaluator: Arc::new(f),
            half_width,
        }
    }

    pub fn zero(half_width: f64) -> Self {
        Self::new(half_width, |_| 0.0)
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn contains(&self, p: Point2) -> bool {
        p.x1.abs() < self.half_width && p.x2.abs() < self.half_width
    }

    pub fn eval(&self, p: Point2) -> f64 {
        if self.contains(p) {
            (self.evaluator)(p)
        } else {
            0.0
        }
    }

    /// `alpha * self + beta * other` on the smaller of the two boxes.
    pub fn combine(&self, alpha: f64, other: &SourceField, beta: f64) -> SourceField {
        let (s, o) = (self.clone(), other.clone());
        let a = self.half_width.min(other.half_width);
        SourceField::new(a, move |p| alpha * s.eval(p) + beta * o.eval(p))
    }
}

impl fmt::Debug for SourceField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SourceField")
            .field("half_width", &self.half_width)
            .finish_non_exhaustive()
    }
}

/// Complex `u` and `Δu` sampled at measurement points for one wavenumber.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldTrace {
    pub k: f64,
    pub points: Vec<Point2>,
    pub u: Vec<Complex64>,
    pub laplacian_u: Vec<Complex64>,
}

impl FieldTrace {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn zeros(k: f64, points: Vec<Point2>) -> Self {
        let n = points.len();
        Self {
            k,
            points,
            u: vec![Complex64::new(0.0, 0.0); n],
            laplacian_u: vec![Complex64::new(0.0, 0.0); n],
        }
    }
}

/// Magnitudes of `u + Ψ_{j,ℓ}` and `Δ(u + Ψ_{j,ℓ})` on the points of arc `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceChannel {
    /// Arc index, 1-based.
    pub j: usize,
    /// Reference index within the arc, 1 or 2.
    pub ell: usize,
    /// Indices into the trace's point list.
    pub point_indices: Vec<usize>,
    pub abs_v: Vec<f64>,
    pub abs_laplacian_v: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaselessTrace {
    pub k: f64,
    pub points: Vec<Point2>,
    pub abs_u: Vec<f64>,
    pub abs_laplacian_u: Vec<f64>,
    pub references: Vec<ReferenceChannel>,
}

impl PhaselessTrace {
    /// Magnitudes of a phased trace, without reference channels.
    pub fn from_field(t: &FieldTrace) -> Self {
        Self {
            k: t.k,
            points: t.points.clone(),
            abs_u: t.u.iter().map(|z| z.norm()).collect(),
            abs_laplacian_u: t.laplacian_u.iter().map(|z| z.norm()).collect(),
            references: Vec::new(),
        }
    }

    pub fn reference(&self, j: usize, ell: usize) -> Option<&ReferenceChannel> {
        self.references.iter().find(|c| c.j == j && c.ell == ell)
    }
}

fn check_k(k: f64) -> Result<(), ForwardError> {
    if k > 0.0 && k.is_finite() {
        Ok(())
    } else {
        Err(ForwardError::Wavenumber(k))
    }
}

/// `(Φ_k, ΔΦ_k)` at distance `r > 0`.
pub fn kernel(k: f64, r: f64) -> (Complex64, Complex64) {
    let (j0, y0, h0) = specfun::j0_y0_h0(k * r);
    let phi = Complex64::new(-(y0 + h0), j0) / (8.0 * k * k);
    let lap = Complex64::new(y0 - h0, -j0) / 8.0;
    (phi, lap)
}

/// Fundamental solution `Φ_k(x, y)` of `Δ²u - k⁴u`.
pub fn phi(k: f64, x: Point2, y: Point2) -> Result<Complex64, ForwardError> {
    check_k(k)?;
    let r = x.dist(y);
    if r == 0.0 {
        return Err(ForwardError::Singular { x, y });
    }
    Ok(kernel(k, r).0)
}

/// `Δ_x Φ_k(x, y)`.
pub fn delta_phi(k: f64, x: Point2, y: Point2) -> Result<Complex64, ForwardError> {
    check_k(k)?;
    let r = x.dist(y);
    if r == 0.0 {
        return Err(ForwardError::Singular { x, y });
    }
    Ok(kernel(k, r).1)
}

/// `u(x) = ∫ Φ_k(x, y) S(y) dy` and `Δu(x)` at every point, by the given rule.
pub fn radiate(
    s: &SourceField,
    k: f64,
    points: &[Point2],
    q: &QuadratureRule,
) -> Result<FieldTrace, ForwardError> {
    check_k(k)?;
    let radius = SQRT_2 * s.half_width();
    if let Some((index, &point)) = points.iter().enumerate().find(|(_, p)| p.norm() <= radius) {
        return Err(ForwardError::InsideSource {
            index,
            point,
            radius,
        });
    }
    let weighted: Vec<(Point2, f64)> = q
        .nodes
        .iter()
        .map(|n| (n.point, n.weight * s.eval(n.point)))
        .filter(|&(_, w)| w != 0.0)
        .collect();
    let (u, laplacian_u) = points
        .par_iter()
        .map(|&x| {
            let (mut sj, mut sy, mut sh) = (0.0, 0.0, 0.0);
            for &(y, w) in &weighted {
                let (j0, y0, h0) = specfun::j0_y0_h0(k * x.dist(y));
                sj += w * j0;
                sy += w * y0;
                sh += w * h0;
            }
            (
                Complex64::new(-(sy + sh), sj) / (8.0 * k * k),
                Complex64::new(sy - sh, -sj) / 8.0,
            )
        })
        .unzip();
    Ok(FieldTrace {
        k,
        points: points.to_vec(),
        u,
        laplacian_u,
    })
}

/// `Ψ = -c Φ_k(·, z)` and `ΔΨ` at the given points.
pub fn reference_field(
    k: f64,
    z: Point2,
    c: f64,
    points: &[Point2],
) -> Result<(Vec<Complex64>, Vec<Complex64>), ForwardError> {
    check_k(k)?;
    let mut psi = Vec::with_capacity(points.len());
    let mut lap = Vec::with_capacity(points.len());
    for &x in points {
        let r = x.dist(z);
        if r == 0.0 {
            return Err(ForwardError::Singular { x, y: z });
        }
        let (p, l) = kernel(k, r);
        psi.push(-c * p);
        lap.push(-c * l);
    }
    Ok((psi, lap))
}
