//! Steed's continued-fraction method for the intermediate argument range.
//!
//! For J/Y the ratio `J0'/J0` comes from the first continued fraction and
//! `(J0' + iY0')/(J0 + iY0)` from the second; the Wronskian then fixes the
//! normalization. For K the second continued fraction in Temme's form gives
//! `e^x K0` and `e^x K1` directly.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::Order01;

const EPS: f64 = f64::EPSILON;
const TINY: f64 = 1e-300;
// complex division squares magnitudes, so the complex fraction needs headroom
const TINY_C: f64 = 1e-150;
const MAX_ITER: usize = 100_000;

/// J0, J1, Y0, Y1 for `x >= 2`.
pub(crate) fn jy01(x: f64) -> Order01 {
    let xi2 = 2.0 / x;

    // CF1: f = J0'/J0 = -J1/J0, tracking the sign of J0.
    let mut sign = 1.0;
    let mut h = TINY;
    let mut b = 0.0;
    let mut d = 0.0;
    let mut c = h;
    for _ in 0..MAX_ITER {
        b += xi2;
        d = b - d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b - 1.0 / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = c * d;
        h *= del;
        if d < 0.0 {
            sign = -sign;
        }
        if (del - 1.0).abs() <= EPS {
            break;
        }
    }
    let f = h;

    // CF2: p + iq = (J0' + iY0')/(J0 + iY0)
    //      = -1/(2x) + i + (i/x) * a1/(b1 + a2/(b2 + ...)),
    // a_k = (k - 1/2)^2, b_k = 2(x + ik).
    let mut frac = Complex64::new(TINY_C, 0.0);
    let mut cc = frac;
    let mut dd = Complex64::new(0.0, 0.0);
    for k in 1..MAX_ITER {
        let kf = k as f64;
        let a = (kf - 0.5) * (kf - 0.5);
        let bk = Complex64::new(2.0 * x, 2.0 * kf);
        dd = bk + a * dd;
        if dd.norm() < TINY_C {
            dd = Complex64::new(TINY_C, 0.0);
        }
        cc = bk + a / cc;
        if cc.norm() < TINY_C {
            cc = Complex64::new(TINY_C, 0.0);
        }
        dd = dd.inv();
        let delta = cc * dd;
        frac *= delta;
        if (delta - 1.0).norm() <= EPS {
            break;
        }
    }
    let pq = Complex64::new(-0.5 / x, 1.0) + Complex64::new(0.0, 1.0 / x) * frac;
    let (p, q) = (pq.re, pq.im);

    let gamma = (p - f) / q;
    let wronskian = 2.0 / (PI * x);
    let j0 = sign * (wronskian / (q * (1.0 + gamma * gamma))).sqrt();
    let y0 = gamma * j0;
    let dj0 = f * j0;
    let dy0 = p * y0 + q * j0;
    Order01 {
        j0,
        j1: -dj0,
        y0,
        y1: -dy0,
    }
}

/// `(e^x K0(x), e^x K1(x))` for `x >= 2`.
pub(crate) fn k01_scaled(x: f64) -> (f64, f64) {
    let xi = 1.0 / x;
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 1..MAX_ITER {
        let fi = i as f64;
        a -= 2.0 * fi;
        c = -a * c / (fi + 1.0);
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() <= EPS {
            break;
        }
    }
    h *= a1;
    let k0 = (PI / (2.0 * x)).sqrt() / s;
    let k1 = k0 * (x + 0.5 - h) * xi;
    (k0, k1)
}
