//! Fourier reconstruction of the source from multi-frequency Cauchy data.
//!
//! For `k = π|l|/a` and `φ_l(x) = exp(iπ l·x/a)`, Green's second identity for
//! `Δ² - k⁴` on the disc of radius `ρ` reduces `∫ S conj(φ_l)` to a boundary
//! functional of `(w, ∂_ν w, Δw, ∂_ν Δw)` on `Γ_ρ`. The data measured on
//! `Γ_R` is split into its Helmholtz and modified-Helmholtz parts and each is
//! continued outward by its own circle-harmonic series.
//!
//! Coefficients are normalized as `ŝ_l = (2a)^{-2} ∫_{V0} S conj(φ_l)`, so
//! that `S = Σ ŝ_l φ_l` on the box.

mod grid;
mod io;

use std::f64::consts::{PI, SQRT_2};

use log::debug;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use thiserror::Error;

use crate::forward::{FieldTrace, Point2};
use crate::specfun::{self, SpecfunError};

pub use grid::{reconstruct, Grid, Reconstruction, ZerothMode};
pub use io::{
    read_coefficients_csv, read_grid_bin, write_coefficients_csv, write_grid_bin, write_grid_csv,
    GRID_BIN_VERSION,
};

/// Relative tail level above which a circle series counts as truncated.
pub const TAIL_TOLERANCE: f64 = 1e-12;

/// Circle-harmonic orders kept beyond `k·√2·a`, where the source disc's
/// contribution starts to decay super-exponentially.
pub const ORDER_MARGIN: usize = 25;

/// Minimum number of trapezoid nodes on `Γ_ρ`.
pub const MIN_RHO_POINTS: usize = 400;

#[derive(Debug, Error)]
pub enum FourierError {
    #[error("invalid admissible set: {0}")]
    Admissible(String),
    #[error("samples are not equiangular on a circle: {0}")]
    NotEquiangular(String),
    #[error("series order {n_max} needs at least {need} samples, got {got}")]
    Nyquist {
        n_max: usize,
        need: usize,
        got: usize,
    },
    #[error("continuation radius {rho} is inside the measurement radius {radius}")]
    Radius { rho: f64, radius: f64 },
    #[error("data at k = {got} does not match the index wavenumber {want}")]
    Wavenumber { want: f64, got: f64 },
    #[error("no data supplied for wavenumber {0}")]
    MissingData(f64),
    #[error("coefficient for l = {0:?} is missing")]
    MissingCoefficient([i32; 2]),
    #[error("λ = {0} outside (0, a/(2π))")]
    Lambda(f64),
    #[error("noise level {0} must lie in (0, 1)")]
    NoiseLevel(f64),
    #[error("malformed input: {0}")]
    Format(String),
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, FourierError>;

/// Integer indices sharing one wavenumber `π√q/a`, `q = l1² + l2²`.
#[derive(Debug, Clone, PartialEq)]
pub struct Shell {
    pub q: u32,
    pub k: f64,
    pub members: Vec<[i32; 2]>,
}

/// `{π|l|/a : 1 ≤ |l|_∞ ≤ N} ∪ {k0}`, grouped into shells of equal `|l|`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibleSet {
    pub n: usize,
    pub a: f64,
    pub k0: f64,
    pub shells: Vec<Shell>,
}

impl AdmissibleSet {
    /// Requires `0 < k0 < 1/radius`.
    pub fn new(n: usize, a: f64, k0: f64, radius: f64) -> Result<Self> {
        if n == 0 {
            return Err(FourierError::Admissible("N must be at least 1".into()));
        }
        if !(a > 0.0 && a.is_finite()) {
            return Err(FourierError::Admissible(format!(
                "half-width {a} must be positive"
            )));
        }
        if !(k0 > 0.0 && k0 * radius < 1.0) {
            return Err(FourierError::Admissible(format!(
                "k0 = {k0} must satisfy 0 < k0 < 1/R = {}",
                1.0 / radius
            )));
        }
        let n_i = n as i32;
        let mut by_q = std::collections::BTreeMap::<u32, Vec<[i32; 2]>>::new();
        for l1 in -n_i..=n_i {
            for l2 in -n_i..=n_i {
                if (l1, l2) != (0, 0) {
                    by_q.entry((l1 * l1 + l2 * l2) as u32)
                        .or_default()
                        .push([l1, l2]);
                }
            }
        }
        let shells = by_q
            .into_iter()
            .map(|(q, members)| Shell {
                q,
                k: PI * f64::from(q).sqrt() / a,
                members,
            })
            .collect();
        Ok(Self { n, a, k0, shells })
    }

    /// `λ = a k0 / π`, the first component of the low-frequency index `l0`.
    pub fn lambda(&self) -> f64 {
        self.a * self.k0 / PI
    }

    /// `k0` followed by the shell wavenumbers in increasing order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        std::iter::once(self.k0)
            .chain(self.shells.iter().map(|s| s.k))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.shells.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// `N = 5⌊ε^{-1/4} + 1⌋`.
pub fn truncation_from_noise(eps: f64) -> Result<usize> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(FourierError::NoiseLevel(eps));
    }
    Ok(5 * (eps.powf(-0.25) + 1.0).floor() as usize)
}

/// `(u_H, u_M)` with `u = u_H + u_M` and `Δu = k²(u_M - u_H)`.
pub fn split_fields(u: Complex64, lap_u: Complex64, k: f64) -> (Complex64, Complex64) {
    let k2 = k * k;
    let two_k2 = 2.0 * k2;
    (-(lap_u - k2 * u) / two_k2, (lap_u + k2 * u) / two_k2)
}

/// Series order used for data at wavenumber `k` sampled at `n_points`.
pub fn series_order(k: f64, a: f64, n_points: usize) -> usize {
    let want = (k * SQRT_2 * a).ceil() as usize + ORDER_MARGIN;
    want.min((n_points.saturating_sub(1)) / 2)
}

/// Trapezoid nodes on `Γ_ρ` that integrate the `l`-phase times a series of
/// order `n_max` without aliasing.
pub fn rho_points_for(k: f64, rho: f64, n_max: usize) -> usize {
    let kr = k * rho;
    let need = kr + n_max as f64 + 10.0 * kr.cbrt() + 30.0;
    MIN_RHO_POINTS.max(need.ceil() as usize)
}

fn check_equiangular(points: &[Point2]) -> Result<(f64, f64)> {
    let n = points.len();
    if n == 0 {
        return Err(FourierError::NotEquiangular("no samples".into()));
    }
    let radius = points[0].norm();
    let theta0 = points[0].x2.atan2(points[0].x1);
    if radius == 0.0 {
        return Err(FourierError::NotEquiangular(
            "first sample at the origin".into(),
        ));
    }
    for (i, p) in points.iter().enumerate() {
        let want = Point2::polar(radius, theta0 + 2.0 * PI * i as f64 / n as f64);
        if p.dist(want) > 1e-9 * radius {
            return Err(FourierError::NotEquiangular(format!(
                "sample {i} at {p:?}, expected {want:?}"
            )));
        }
    }
    Ok((radius, theta0))
}

/// `c_n = (1/N) Σ_i v_i e^{-i n θ_i}` for `|n| ≤ n_max`, stored at `n + n_max`.
pub fn circle_series(
    values: &[Complex64],
    points: &[Point2],
    n_max: usize,
) -> Result<Vec<Complex64>> {
    if values.len() != points.len() {
        return Err(FourierError::Format(format!(
            "{} values for {} points",
            values.len(),
            points.len()
        )));
    }
    let (_, theta0) = check_equiangular(points)?;
    let len = points.len();
    if 2 * n_max + 1 > len {
        return Err(FourierError::Nyquist {
            n_max,
            need: 2 * n_max + 1,
            got: len,
        });
    }
    let mut buf = values.to_vec();
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    let scale = 1.0 / len as f64;
    Ok((-(n_max as i64)..=n_max as i64)
        .map(|n| {
            let idx = n.rem_euclid(len as i64) as usize;
            buf[idx] * scale * Complex64::from_polar(1.0, -(n as f64) * theta0)
        })
        .collect())
}

/// Circle-harmonic coefficients of `u_H` and `u_M` on the measurement circle.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleCoeffs {
    pub k: f64,
    pub radius: f64,
    pub n_max: usize,
    /// `û^H_n` at index `n + n_max`.
    pub helmholtz: Vec<Complex64>,
    /// `û^M_n` at index `n + n_max`.
    pub modified: Vec<Complex64>,
    /// Largest outer-band magnitude relative to the peak.
    pub tail: f64,
}

impl CircleCoeffs {
    pub fn helmholtz_at(&self, n: i32) -> Complex64 {
        self.helmholtz[(n + self.n_max as i32) as usize]
    }

    pub fn modified_at(&self, n: i32) -> Complex64 {
        self.modified[(n + self.n_max as i32) as usize]
    }

    pub fn is_truncated(&self) -> bool {
        self.tail > TAIL_TOLERANCE
    }
}

fn tail_ratio(n_max: usize, series: [&[Complex64]; 2]) -> f64 {
    let peak = series
        .iter()
        .flat_map(|s| s.iter())
        .map(|c| c.norm())
        .fold(0.0, f64::max);
    if peak == 0.0 {
        return 0.0;
    }
    let band = 5.min(n_max + 1);
    let outer = series
        .iter()
        .flat_map(|s| s[..band].iter().chain(&s[s.len() - band..]))
        .map(|c| c.norm())
        .fold(0.0, f64::max);
    outer / peak
}

/// Splits a sampled trace and expands both parts in circle harmonics.
pub fn circle_fourier_coeffs(t: &FieldTrace, n_max: usize) -> Result<CircleCoeffs> {
    let (uh, um): (Vec<_>, Vec<_>) =
        t.u.iter()
            .zip(&t.laplacian_u)
            .map(|(&u, &l)| split_fields(u, l, t.k))
            .unzip();
    let helmholtz = circle_series(&uh, &t.points, n_max)?;
    let modified = circle_series(&um, &t.points, n_max)?;
    let tail = tail_ratio(n_max, [&helmholtz, &modified]);
    if tail > TAIL_TOLERANCE {
        debug!(
            "circle series at k = {} truncated at |n| = {n_max}: tail/peak = {tail:.2e}",
            t.k
        );
    }
    Ok(CircleCoeffs {
        k: t.k,
        radius: check_equiangular(&t.points)?.0,
        n_max,
        helmholtz,
        modified,
        tail,
    })
}

/// `(w, ∂_ν w, Δw, ∂_ν Δw)` at equiangular points `θ_j = 2πj/len` of `Γ_ρ`.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagatedCauchyData {
    pub k: f64,
    pub rho: f64,
    pub w: Vec<Complex64>,
    pub dw: Vec<Complex64>,
    pub lap_w: Vec<Complex64>,
    pub dlap_w: Vec<Complex64>,
}

impl PropagatedCauchyData {
    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    pub fn points(&self) -> Vec<Point2> {
        crate::forward::circle_points(self.rho, self.len())
    }

    pub fn zeros(k: f64, rho: f64, len: usize) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); len];
        Self {
            k,
            rho,
            w: z.clone(),
            dw: z.clone(),
            lap_w: z.clone(),
            dlap_w: z,
        }
    }
}

/// Evaluates `Σ_{|n| ≤ n_max} c_n e^{i n θ_j}` at `len` equiangular angles.
fn synthesize(
    coeffs: &[Complex64],
    n_max: usize,
    len: usize,
    planner: &mut FftPlanner<f64>,
) -> Vec<Complex64> {
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    for (i, &c) in coeffs.iter().enumerate() {
        let n = i as i64 - n_max as i64;
        buf[n.rem_euclid(len as i64) as usize] += c;
    }
    planner.plan_fft_inverse(len).process(&mut buf);
    buf
}

/// Continues the split series from `Γ_R` to `Γ_ρ`, `ρ ≥ R`, on `len` points.
pub fn propagate(c: &CircleCoeffs, rho: f64, len: usize) -> Result<PropagatedCauchyData> {
    if rho < c.radius {
        return Err(FourierError::Radius {
            rho,
            radius: c.radius,
        });
    }
    if 2 * c.n_max + 1 > len {
        return Err(FourierError::Nyquist {
            n_max: c.n_max,
            need: 2 * c.n_max + 1,
            got: len,
        });
    }
    let (k, n_max) = (c.k, c.n_max);
    let h = specfun::hankel1_ratio_table(n_max, k * rho, k * c.radius)?;
    let m = specfun::k_ratio_table(n_max, k * rho, k * c.radius)?;
    let size = 2 * n_max + 1;
    let mut series: [Vec<Complex64>; 4] =
        std::array::from_fn(|_| vec![Complex64::new(0.0, 0.0); size]);
    let k2 = k * k;
    for i in 0..size {
        // F_{-n} = (-1)^n F_n for both families, so ratios depend on |n| only
        let order = (i as i64 - n_max as i64).unsigned_abs() as usize;
        let wh = h.value[order] * c.helmholtz[i];
        let wm = m.value[order] * c.modified[i];
        let dwh = k * h.derivative[order] * c.helmholtz[i];
        let dwm = k * m.derivative[order] * c.modified[i];
        series[0][i] = wh + wm;
        series[1][i] = dwh + dwm;
        series[2][i] = k2 * (wm - wh);
        series[3][i] = k2 * (dwm - dwh);
    }
    let mut planner = FftPlanner::new();
    let [w, dw, lap_w, dlap_w] = series.map(|s| synthesize(&s, n_max, len, &mut planner));
    Ok(PropagatedCauchyData {
        k,
        rho,
        w,
        dw,
        lap_w,
        dlap_w,
    })
}

/// `(2a)^{-2}` times the Green functional at frequency `ξ` (in units of
/// `π/a`), trapezoid rule on `Γ_ρ`.
fn green_functional(d: &PropagatedCauchyData, xi: [f64; 2], a: f64) -> Complex64 {
    let len = d.len();
    let k2 = d.k * d.k;
    let ds = 2.0 * PI * d.rho / len as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for j in 0..len {
        let (s, c) = (2.0 * PI * j as f64 / len as f64).sin_cos();
        // t = (π/a) ξ·ν; on Γ_ρ, (π/a) ξ·x = ρ t
        let t = PI / a * (xi[0] * c + xi[1] * s);
        let it = Complex64::new(0.0, t);
        let bracket = d.dlap_w[j] + it * d.lap_w[j] - k2 * (d.dw[j] + it * d.w[j]);
        sum += bracket * Complex64::from_polar(1.0, -d.rho * t);
    }
    sum * ds / (4.0 * a * a)
}

fn check_wavenumber(want: f64, got: f64) -> Result<()> {
    if (want - got).abs() > 1e-12 * want {
        return Err(FourierError::Wavenumber { want, got });
    }
    Ok(())
}

/// `ŝ_l` from Cauchy data at `k = π|l|/a`.
pub fn fourier_coefficient(l: [i32; 2], d: &PropagatedCauchyData, a: f64) -> Result<Complex64> {
    if l == [0, 0] {
        return Err(FourierError::Format(
            "l = (0, 0) is not paired with a wavenumber".into(),
        ));
    }
    let xi = [f64::from(l[0]), f64::from(l[1])];
    check_wavenumber(PI * xi[0].hypot(xi[1]) / a, d.k)?;
    Ok(green_functional(d, xi, a))
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}

/// `∫_{V0} φ_l conj(φ_{l0})` with `l0 = (λ, 0)`; zero unless `l2 = 0`.
pub fn overlap(l: [i32; 2], lambda: f64, a: f64) -> f64 {
    if l[1] != 0 {
        return 0.0;
    }
    let d = f64::from(l[0]) - lambda;
    // sin((l1 - λ)π) = (-1)^(l1+1) sin(λπ), avoiding the rounding of l1·π
    let sign = if l[0].rem_euclid(2) == 0 { -1.0 } else { 1.0 };
    4.0 * a * a * sign * (lambda * PI).sin() / (d * PI)
}

/// Coefficient of the constant mode, from Cauchy data at `k0 = πλ/a` and the
/// already computed integer-index coefficients.
///
/// The `k0` functional gives `∫ S conj(φ_{l0}) = Σ_l ŝ_l ∫ φ_l conj(φ_{l0})`;
/// every term but `l = 0` is known, and `∫ conj(φ_{l0}) = 4a² sinc(λπ)`.
pub fn zeroth_coefficient(
    d0: &PropagatedCauchyData,
    coeffs: &FourierCoefficientMap,
) -> Result<Complex64> {
    let (a, lambda) = (coeffs.a, coeffs.lambda);
    if !(lambda > 0.0 && lambda < a / (2.0 * PI)) {
        return Err(FourierError::Lambda(lambda));
    }
    check_wavenumber(PI * lambda / a, d0.k)?;
    let total = green_functional(d0, [lambda, 0.0], a) * 4.0 * a * a;
    let n = coeffs.n as i32;
    let mut known = Complex64::new(0.0, 0.0);
    for l1 in -n..=n {
        if l1 != 0 {
            let s = coeffs
                .get([l1, 0])
                .ok_or(FourierError::MissingCoefficient([l1, 0]))?;
            known += s * overlap([l1, 0], lambda, a);
        }
    }
    Ok((total - known) / (4.0 * a * a * sinc(lambda * PI)))
}

/// `ŝ_l` for `1 ≤ |l|_∞ ≤ N` plus the constant-mode coefficient `ŝ_0`
/// recovered through the low-frequency index `l0 = (λ, 0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierCoefficientMap {
    pub n: usize,
    pub a: f64,
    pub lambda: f64,
    values: Vec<Option<Complex64>>,
    zeroth: Option<Complex64>,
}

impl FourierCoefficientMap {
    pub fn new(n: usize, a: f64, lambda: f64) -> Self {
        let side = 2 * n + 1;
        Self {
            n,
            a,
            lambda,
            values: vec![None; side * side],
            zeroth: None,
        }
    }

    fn slot(&self, l: [i32; 2]) -> Option<usize> {
        let n = self.n as i32;
        if l == [0, 0] || l[0].abs() > n || l[1].abs() > n {
            return None;
        }
        let side = 2 * self.n + 1;
        Some((l[0] + n) as usize * side + (l[1] + n) as usize)
    }

    pub fn get(&self, l: [i32; 2]) -> Option<Complex64> {
        self.slot(l).and_then(|i| self.values[i])
    }

    pub fn set(&mut self, l: [i32; 2], v: Complex64) -> Result<()> {
        let i = self.slot(l).ok_or(FourierError::MissingCoefficient(l))?;
        self.values[i] = Some(v);
        Ok(())
    }

    pub fn zeroth(&self) -> Option<Complex64> {
        self.zeroth
    }

    pub fn set_zeroth(&mut self, v: Complex64) {
        self.zeroth = Some(v);
    }

    /// All integer indices `1 ≤ |l|_∞ ≤ N` in lexicographic order.
    pub fn indices(&self) -> impl Iterator<Item = [i32; 2]> {
        let n = self.n as i32;
        (-n..=n)
            .flat_map(move |l1| (-n..=n).map(move |l2| [l1, l2]))
            .filter(|&l| l != [0, 0])
    }

    /// First missing index, with `None` meaning the map is complete.
    pub fn first_missing(&self) -> Option<[i32; 2]> {
        self.indices().find(|&l| self.get(l).is_none())
    }

    /// `max |ŝ_{-l} - conj(ŝ_l)| / max |ŝ_l|`, zero for a real source.
    pub fn conjugate_symmetry_defect(&self) -> f64 {
        let peak = self
            .indices()
            .filter_map(|l| self.get(l))
            .map(|v| v.norm())
            .fold(0.0, f64::max);
        if peak == 0.0 {
            return 0.0;
        }
        self.indices()
            .filter_map(|l| Some((self.get(l)?, self.get([-l[0], -l[1]])?)))
            .map(|(p, m)| (m - p.conj()).norm())
            .fold(0.0, f64::max)
            / peak
    }
}

/// Per-wavenumber diagnostics of the coefficient pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesReport {
    pub k: f64,
    pub n_max: usize,
    pub rho_points: usize,
    pub tail: f64,
}

fn continue_trace(
    t: &FieldTrace,
    a: f64,
    rho: f64,
) -> Result<(PropagatedCauchyData, SeriesReport)> {
    let n_max = series_order(t.k, a, t.len());
    let c = circle_fourier_coeffs(t, n_max)?;
    let len = rho_points_for(t.k, rho, n_max);
    let d = propagate(&c, rho, len)?;
    Ok((
        d,
        SeriesReport {
            k: t.k,
            n_max,
            rho_points: len,
            tail: c.tail,
        },
    ))
}

fn find_trace<'t>(traces: &'t [FieldTrace], k: f64) -> Result<&'t FieldTrace> {
    traces
        .iter()
        .find(|t| (t.k - k).abs() <= 1e-12 * k)
        .ok_or(FourierError::MissingData(k))
}

/// Full coefficient map from measured (or retrieved) traces covering every
/// wavenumber of the admissible set, continued to `Γ_ρ`.
pub fn coefficients_from_traces(
    set: &AdmissibleSet,
    traces: &[FieldTrace],
    rho: f64,
) -> Result<(FourierCoefficientMap, Vec<SeriesReport>)> {
    let shells: Vec<(Vec<([i32; 2], Complex64)>, SeriesReport)> = set
        .shells
        .par_iter()
        .map(|shell| {
            let (d, report) = continue_trace(find_trace(traces, shell.k)?, set.a, rho)?;
            let values = shell
                .members
                .iter()
                .map(|&l| Ok((l, fourier_coefficient(l, &d, set.a)?)))
                .collect::<Result<Vec<_>>>()?;
            Ok((values, report))
        })
        .collect::<Result<_>>()?;
    let mut map = FourierCoefficientMap::new(set.n, set.a, set.lambda());
    let mut reports = Vec::with_capacity(set.len());
    for (values, report) in shells {
        for (l, v) in values {
            map.set(l, v)?;
        }
        reports.push(report);
    }
    let (d0, report0) = continue_trace(find_trace(traces, set.k0)?, set.a, rho)?;
    map.set_zeroth(zeroth_coefficient(&d0, &map)?);
    reports.insert(0, report0);
    Ok((map, reports))
}

#[cfg(test)]
mod tests;
