//! Piecewise Chebyshev interpolants of J0, J1, Y0, Y1, e^x K0, e^x K1 on
//! `[SERIES_LIMIT, ASYMPTOTIC_LIMIT)`, built once from the continued-fraction
//! evaluators, which are accurate but latency-bound there.
//!
//! Each piece has width 1/2 and degree 16. The nearest singularity (x = 0) is
//! at least four half-widths from every piece, so interpolation error is
//! below 1e-17 and the table is limited by the source values.

use std::f64::consts::PI;
use std::sync::OnceLock;

use super::{steed, Order01, ASYMPTOTIC_LIMIT, SERIES_LIMIT};

const NODES: usize = 17;
const WIDTH: f64 = 0.5;
const FUNCS: usize = 6;

type Piece = [[f64; NODES]; FUNCS];

fn pieces() -> &'static [Piece] {
    static TABLE: OnceLock<Vec<Piece>> = OnceLock::new();
    TABLE.get_or_init(build)
}

fn build() -> Vec<Piece> {
    let count = ((ASYMPTOTIC_LIMIT - SERIES_LIMIT) / WIDTH).ceil() as usize;
    (0..count)
        .map(|p| {
            let lo = SERIES_LIMIT + p as f64 * WIDTH;
            let mid = lo + 0.5 * WIDTH;
            let values: Vec<[f64; FUNCS]> = (0..NODES)
                .map(|j| {
                    let t = (PI * (j as f64 + 0.5) / NODES as f64).cos();
                    let x = mid + 0.5 * WIDTH * t;
                    let o = steed::jy01(x);
                    let (k0, k1) = steed::k01_scaled(x);
                    [o.j0, o.j1, o.y0, o.y1, k0, k1]
                })
                .collect();
            let mut piece = [[0.0; NODES]; FUNCS];
            for (f, coeffs) in piece.iter_mut().enumerate() {
                for (k, c) in coeffs.iter_mut().enumerate() {
                    let s: f64 = values
                        .iter()
                        .enumerate()
                        .map(|(j, v)| {
                            v[f] * (PI * k as f64 * (j as f64 + 0.5) / NODES as f64).cos()
                        })
                        .sum();
                    *c = 2.0 * s / NODES as f64;
                }
                coeffs[0] *= 0.5;
            }
            piece
        })
        .collect()
}

#[inline]
fn clenshaw(c: &[f64; NODES], t: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    let t2 = 2.0 * t;
    for &ck in c[1..].iter().rev() {
        let b0 = t2 * b1 - b2 + ck;
        b2 = b1;
        b1 = b0;
    }
    t * b1 - b2 + c[0]
}

#[inline]
fn locate(x: f64) -> (&'static Piece, f64) {
    let table = pieces();
    let p = (((x - SERIES_LIMIT) / WIDTH) as usize).min(table.len() - 1);
    let mid = SERIES_LIMIT + (p as f64 + 0.5) * WIDTH;
    (&table[p], (x - mid) / (0.5 * WIDTH))
}

pub(crate) fn jy01(x: f64) -> Order01 {
    let (p, t) = locate(x);
    Order01 {
        j0: clenshaw(&p[0], t),
        j1: clenshaw(&p[1], t),
        y0: clenshaw(&p[2], t),
        y1: clenshaw(&p[3], t),
    }
}

pub(crate) fn k01_scaled(x: f64) -> (f64, f64) {
    let (p, t) = locate(x);
    (clenshaw(&p[4], t), clenshaw(&p[5], t))
}

/// `(J0, Y0, e^x K0)`.
pub(crate) fn jyk0(x: f64) -> (f64, f64, f64) {
    let (p, t) = locate(x);
    (clenshaw(&p[0], t), clenshaw(&p[2], t), clenshaw(&p[4], t))
}
