//! Integer-order sequences built from orders 0 and 1.
//!
//! Y and K use forward recurrence, J uses Miller's backward recurrence
//! normalized against the directly computed J0 or J1. Y and K values are
//! carried as a mantissa and a power-of-two exponent so high orders at small
//! arguments do not overflow.

use std::ops::Sub;

use num_complex::Complex64;

use super::Order01;

const RESCALE_AT: f64 = 1e250;
const RESCALE_BITS: i32 = 830; // 2^830 ~ 1e250
const MILLER_RESCALE: f64 = 1e-250;

/// A value stored as `mantissa * 2^exp2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled<T> {
    pub mantissa: T,
    pub exp2: i32,
}

pub(crate) fn pow2(e: i32) -> f64 {
    if e < -1100 {
        0.0
    } else if e > 1100 {
        f64::INFINITY
    } else {
        2f64.powi(e)
    }
}

impl Scaled<f64> {
    pub fn value(&self) -> f64 {
        self.mantissa * pow2(self.exp2)
    }
}

impl Scaled<Complex64> {
    pub fn value(&self) -> Complex64 {
        self.mantissa * pow2(self.exp2)
    }
}

impl Scaled<f64> {
    /// `self / other` as a plain value.
    pub fn ratio(&self, other: &Scaled<f64>) -> f64 {
        (self.mantissa / other.mantissa) * pow2(self.exp2 - other.exp2)
    }
}

impl Scaled<Complex64> {
    /// `self / other` as a plain value.
    pub fn ratio(&self, other: &Scaled<Complex64>) -> Complex64 {
        // complex division squares magnitudes; bring both near unity first
        let s = other.mantissa.re.abs().max(other.mantissa.im.abs());
        let (top, bottom) = (self.mantissa / s, other.mantissa / s);
        (top / bottom) * pow2(self.exp2 - other.exp2)
    }
}

impl<T> Scaled<T>
where
    T: Copy + Sub<Output = T> + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
{
    fn aligned(a: &Scaled<T>, b: &Scaled<T>) -> (T, T, i32) {
        let e = a.exp2.max(b.exp2);
        (
            a.mantissa * pow2(a.exp2 - e),
            b.mantissa * pow2(b.exp2 - e),
            e,
        )
    }

    /// `(self - other) / 2`
    pub(crate) fn half_difference(&self, other: &Scaled<T>) -> Scaled<T> {
        let (x, y, e) = Self::aligned(self, other);
        Scaled {
            mantissa: (x - y) * 0.5,
            exp2: e,
        }
    }

    /// `-(self + other) / 2`
    pub(crate) fn neg_half_sum(&self, other: &Scaled<T>) -> Scaled<T> {
        let (x, y, e) = Self::aligned(self, other);
        Scaled {
            mantissa: (x + y) * -0.5,
            exp2: e,
        }
    }
}

/// Forward recurrence with rescaling: `z_{n+1} = (2n/x) z_n - z_{n-1}` for Y,
/// `z_{n+1} = (2n/x) z_n + z_{n-1}` for K (`modified`).
fn forward(nmax: usize, x: f64, z0: f64, z1: f64, modified: bool) -> Vec<Scaled<f64>> {
    let mut out = Vec::with_capacity(nmax + 1);
    out.push(Scaled {
        mantissa: z0,
        exp2: 0,
    });
    if nmax == 0 {
        return out;
    }
    out.push(Scaled {
        mantissa: z1,
        exp2: 0,
    });
    let (mut prev, mut cur, mut exp2) = (z0, z1, 0);
    for n in 1..nmax {
        let next = if modified {
            prev + (2.0 * n as f64 / x) * cur
        } else {
            (2.0 * n as f64 / x) * cur - prev
        };
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE_AT {
            cur *= pow2(-RESCALE_BITS);
            prev *= pow2(-RESCALE_BITS);
            exp2 += RESCALE_BITS;
        }
        out.push(Scaled {
            mantissa: cur,
            exp2,
        });
    }
    out
}

/// `Y_0..=Y_nmax` at `x > 0`.
pub(crate) fn y_seq(nmax: usize, x: f64, base: &Order01) -> Vec<Scaled<f64>> {
    forward(nmax, x, base.y0, base.y1, false)
}

/// `e^x K_n(x)` for `n = 0..=nmax`, from `e^x K0` and `e^x K1`.
pub(crate) fn k_scaled_seq(nmax: usize, x: f64, k0s: f64, k1s: f64) -> Vec<Scaled<f64>> {
    forward(nmax, x, k0s, k1s, true)
}

/// `J_0..=J_nmax` at `x > 0` by Miller's algorithm.
pub(crate) fn j_seq(nmax: usize, x: f64, base: &Order01) -> Vec<f64> {
    if nmax == 0 {
        return vec![base.j0];
    }
    if nmax == 1 {
        return vec![base.j0, base.j1];
    }
    let top = (nmax as f64).max(x);
    let mut start = (top + 20.0 + 10.0 * top.cbrt()).ceil() as usize;
    start += start % 2;
    let mut out = vec![0.0; nmax + 1];
    let mut above = 0.0; // f_{n+1}
    let mut cur = 1e-30; // f_n
    for n in (1..=start).rev() {
        if n <= nmax {
            out[n] = cur;
        }
        let below = (2.0 * n as f64 / x) * cur - above;
        above = cur;
        cur = below;
        if cur.abs() > RESCALE_AT {
            cur *= MILLER_RESCALE;
            above *= MILLER_RESCALE;
            for v in out.iter_mut().skip(n.saturating_sub(1)) {
                *v *= MILLER_RESCALE;
            }
        }
    }
    out[0] = cur;
    let scale = if base.j0.abs() >= base.j1.abs() {
        base.j0 / out[0]
    } else {
        base.j1 / out[1]
    };
    for v in out.iter_mut() {
        *v *= scale;
    }
    // orders 0 and 1 exactly as computed directly
    out[0] = base.j0;
    out[1] = base.j1;
    out
}

/// `H^(1)_0..=H^(1)_nmax` as scaled complex values.
pub(crate) fn h_seq(nmax: usize, x: f64, base: &Order01) -> Vec<Scaled<Complex64>> {
    let j = j_seq(nmax, x, base);
    let y = y_seq(nmax, x, base);
    j.iter()
        .zip(y.iter())
        .map(|(&jn, yn)| Scaled {
            mantissa: Complex64::new(jn * pow2(-yn.exp2), yn.mantissa),
            exp2: yn.exp2,
        })
        .collect()
}
