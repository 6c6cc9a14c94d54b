use std::f64::consts::PI;

use num_complex::Complex64;

use super::{FourierCoefficientMap, FourierError, Result};
use crate::forward::Point2;

/// Tensor grid over `V0`; values are stored row-major with `x1` fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub x1: Vec<f64>,
    pub x2: Vec<f64>,
}

impl Grid {
    /// `n × n` cell centres `-a + (i + 1/2)·2a/n`, all strictly inside `V0`.
    pub fn cell_centered(a: f64, n: usize) -> Self {
        let h = 2.0 * a / n as f64;
        let axis: Vec<f64> = (0..n).map(|i| -a + (i as f64 + 0.5) * h).collect();
        Self {
            x1: axis.clone(),
            x2: axis,
        }
    }

    pub fn nx(&self) -> usize {
        self.x1.len()
    }

    pub fn ny(&self) -> usize {
        self.x2.len()
    }

    pub fn len(&self) -> usize {
        self.nx() * self.ny()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Points in storage order.
    pub fn points(&self) -> impl Iterator<Item = Point2> + '_ {
        self.x2
            .iter()
            .flat_map(move |&y| self.x1.iter().map(move |&x| Point2::new(x, y)))
    }

    pub fn sample(&self, f: impl Fn(Point2) -> f64) -> Vec<f64> {
        self.points().map(f).collect()
    }
}

/// Basis function carrying the constant-mode coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ZerothMode {
    /// `ŝ_0 · 1`, the exact Fourier-series term.
    #[default]
    Constant,
    /// `ŝ_0 · φ_{l0}` with the non-integer frequency `(λ, 0)`.
    Shifted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub grid: Grid,
    /// Real part of `S_N`, row-major.
    pub values: Vec<f64>,
    /// `max |Im S_N| / max |Re S_N|` over the grid.
    pub imag_residue: f64,
}

fn phases(axis: &[f64], n: i32, a: f64) -> Vec<Vec<Complex64>> {
    axis.iter()
        .map(|&x| {
            (-n..=n)
                .map(|l| Complex64::from_polar(1.0, PI * f64::from(l) * x / a))
                .collect()
        })
        .collect()
}

/// `S_N = ŝ_0 ψ_0 + Σ_{1 ≤ |l|_∞ ≤ N} ŝ_l φ_l` on the grid, with `ψ_0`
/// chosen by `mode`. Summed separably in `x2` then `x1`.
pub fn reconstruct(
    coeffs: &FourierCoefficientMap,
    grid: &Grid,
    mode: ZerothMode,
) -> Result<Reconstruction> {
    if let Some(l) = coeffs.first_missing() {
        return Err(FourierError::MissingCoefficient(l));
    }
    let s0 = coeffs
        .zeroth()
        .ok_or(FourierError::MissingCoefficient([0, 0]))?;
    let n = coeffs.n as i32;
    let side = (2 * n + 1) as usize;
    let a = coeffs.a;
    let e1 = phases(&grid.x1, n, a);
    let e2 = phases(&grid.x2, n, a);

    let mut values = Vec::with_capacity(grid.len());
    let (mut peak_re, mut peak_im) = (0.0_f64, 0.0_f64);
    let mut column = vec![Complex64::new(0.0, 0.0); side];
    for row2 in &e2 {
        for (i1, slot) in column.iter_mut().enumerate() {
            let l1 = i1 as i32 - n;
            *slot = (0..side)
                .filter_map(|i2| coeffs.get([l1, i2 as i32 - n]).map(|s| s * row2[i2]))
                .sum();
        }
        for (ix, row1) in e1.iter().enumerate() {
            let mut v: Complex64 = row1.iter().zip(&column).map(|(p, c)| p * c).sum();
            v += match mode {
                ZerothMode::Constant => s0,
                ZerothMode::Shifted => {
                    s0 * Complex64::from_polar(1.0, PI * coeffs.lambda * grid.x1[ix] / a)
                }
            };
            peak_re = peak_re.max(v.re.abs());
            peak_im = peak_im.max(v.im.abs());
            values.push(v.re);
        }
    }
    let imag_residue = if peak_re > 0.0 {
        peak_im / peak_re
    } else {
        peak_im
    };
    Ok(Reconstruction {
        grid: grid.clone(),
        values,
        imag_residue,
    })
}
