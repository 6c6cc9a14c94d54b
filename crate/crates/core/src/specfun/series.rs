//! Ascending power series for orders 0 and 1, used for small arguments.

use std::f64::consts::{FRAC_2_PI, PI};

use super::{Order01, EULER_GAMMA};

const TERM_TOL: f64 = 1e-17;
const MAX_TERMS: usize = 200;

/// J0, J1, Y0, Y1 from their ascending series.
///
/// Accurate to a few ulps for `0 < x <= 2`; usable (with growing
/// cancellation) up to roughly `x = 8`.
pub(crate) fn jy01(x: f64) -> Order01 {
    let q = -0.25 * x * x;
    // k = 0 terms
    let mut t0 = 1.0; // (-x^2/4)^k / (k!)^2
    let mut t1 = 1.0; // (-x^2/4)^k / (k! (k+1)!)
    let mut harmonic = 0.0; // H_k
    let mut j0 = 1.0;
    let mut j1s = 1.0;
    let mut y0s = 0.0;
    let mut y1s = 1.0 - 2.0 * EULER_GAMMA; // psi(1) + psi(2)
    for k in 1..MAX_TERMS {
        let kf = k as f64;
        t0 *= q / (kf * kf);
        t1 *= q / (kf * (kf + 1.0));
        harmonic += 1.0 / kf;
        j0 += t0;
        y0s += harmonic * t0;
        j1s += t1;
        y1s += (2.0 * harmonic + 1.0 / (kf + 1.0) - 2.0 * EULER_GAMMA) * t1;
        if t0.abs() < TERM_TOL * j0.abs().max(1e-300) && t1.abs() < TERM_TOL * j1s.abs() {
            break;
        }
    }
    let log_half = (0.5 * x).ln();
    let j1 = 0.5 * x * j1s;
    let y0 = FRAC_2_PI * ((log_half + EULER_GAMMA) * j0 - y0s);
    let y1 = -FRAC_2_PI / x + FRAC_2_PI * log_half * j1 - x / (2.0 * PI) * y1s;
    Order01 { j0, j1, y0, y1 }
}

/// K0 and K1 from their ascending series. Intended for `0 < x < 2`.
pub(crate) fn k01(x: f64) -> (f64, f64) {
    let q = 0.25 * x * x;
    let mut t0 = 1.0;
    let mut t1 = 1.0;
    let mut harmonic = 0.0;
    let mut i0 = 1.0;
    let mut i1s = 1.0;
    let mut k0s = 0.0;
    let mut k1s = 1.0 - 2.0 * EULER_GAMMA;
    for k in 1..MAX_TERMS {
        let kf = k as f64;
        t0 *= q / (kf * kf);
        t1 *= q / (kf * (kf + 1.0));
        harmonic += 1.0 / kf;
        i0 += t0;
        k0s += harmonic * t0;
        i1s += t1;
        k1s += (2.0 * harmonic + 1.0 / (kf + 1.0) - 2.0 * EULER_GAMMA) * t1;
        if t0 < TERM_TOL * i0 && t1 < TERM_TOL * i1s {
            break;
        }
    }
    let log_half = (0.5 * x).ln();
    let i1 = 0.5 * x * i1s;
    let k0 = -(log_half + EULER_GAMMA) * i0 + k0s;
    let k1 = 1.0 / x + log_half * i1 - 0.25 * x * k1s;
    (k0, k1)
}
