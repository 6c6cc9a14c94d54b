//! Bessel J, Y, modified Bessel K and Hankel H^(1) of integer order for
//! real positive arguments, plus the ratio evaluations used when continuing
//! circle-harmonic series from one radius to another.
//!
//! Orders 0 and 1 are evaluated directly: ascending series for `x < 2`,
//! Steed's continued fractions for `2 <= x < 25` (tabulated as piecewise
//! Chebyshev interpolants), and the Hankel asymptotic expansion beyond. Higher orders come from recurrences (forward for Y and K,
//! Miller's backward scheme for J).
//!
//! All functions are pure and thread-safe.

mod asymptotic;
mod chebyshev;
mod sequence;
mod series;
mod steed;

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use thiserror::Error;

pub use sequence::Scaled;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Largest supported order magnitude.
pub const MAX_ORDER: u32 = 4096;

/// Below this argument the ascending series are used.
pub const SERIES_LIMIT: f64 = 2.0;

/// At and above this argument the asymptotic expansions are used.
pub const ASYMPTOTIC_LIMIT: f64 = 25.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecfunError {
    #[error("{function}: argument {x} is outside the domain")]
    Domain { function: &'static str, x: f64 },
    #[error("order {0} exceeds the supported maximum {MAX_ORDER}")]
    OrderTooLarge(i32),
    #[error("{function}: numerator argument {num} is smaller than denominator argument {den}")]
    ArgumentOrder {
        function: &'static str,
        num: f64,
        den: f64,
    },
    #[error("{function}: value at order {n}, x = {x} is not representable")]
    Overflow {
        function: &'static str,
        n: i32,
        x: f64,
    },
    #[error("{function}: denominator at order {n}, x = {x} vanishes at working precision")]
    Underflow {
        function: &'static str,
        n: i32,
        x: f64,
    },
}

pub type Result<T> = std::result::Result<T, SpecfunError>;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Order01 {
    pub j0: f64,
    pub j1: f64,
    pub y0: f64,
    pub y1: f64,
}

fn order01(x: f64) -> Order01 {
    if x < SERIES_LIMIT {
        series::jy01(x)
    } else if x < ASYMPTOTIC_LIMIT {
        chebyshev::jy01(x)
    } else {
        asymptotic::jy01(x)
    }
}

/// `(e^x K0(x), e^x K1(x))`.
fn k01_scaled(x: f64) -> (f64, f64) {
    if x < SERIES_LIMIT {
        let (k0, k1) = series::k01(x);
        let e = x.exp();
        (k0 * e, k1 * e)
    } else if x < ASYMPTOTIC_LIMIT {
        chebyshev::k01_scaled(x)
    } else {
        asymptotic::k01_scaled(x)
    }
}

fn k0_direct(x: f64) -> f64 {
    if x < SERIES_LIMIT {
        series::k01(x).0
    } else {
        k01_scaled(x).0 * (-x).exp()
    }
}

fn check_order(n: i32) -> Result<usize> {
    if n.unsigned_abs() > MAX_ORDER {
        Err(SpecfunError::OrderTooLarge(n))
    } else {
        Ok(n.unsigned_abs() as usize)
    }
}

fn check_positive(function: &'static str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(SpecfunError::Domain { function, x })
    }
}

/// `(-1)^n` applied to `v` for negative orders of J, Y and H.
fn reflect<T: std::ops::Neg<Output = T>>(n: i32, v: T) -> T {
    if n < 0 && n % 2 != 0 {
        -v
    } else {
        v
    }
}

/// Bessel function of the first kind, `J_n(x)` for `x >= 0`.
pub fn bessel_j(n: i32, x: f64) -> Result<f64> {
    let m = check_order(n)?;
    if !(x >= 0.0 && x.is_finite()) {
        return Err(SpecfunError::Domain {
            function: "bessel_j",
            x,
        });
    }
    if x == 0.0 {
        return Ok(if m == 0 { 1.0 } else { 0.0 });
    }
    let base = order01(x);
    let v = match m {
        0 => base.j0,
        1 => base.j1,
        _ => sequence::j_seq(m, x, &base)[m],
    };
    Ok(reflect(n, v))
}

/// Bessel function of the second kind, `Y_n(x)` for `x > 0`.
pub fn bessel_y(n: i32, x: f64) -> Result<f64> {
    let m = check_order(n)?;
    check_positive("bessel_y", x)?;
    let base = order01(x);
    let v = match m {
        0 => base.y0,
        1 => base.y1,
        _ => {
            let v = sequence::y_seq(m, x, &base)[m].value();
            if !v.is_finite() {
                return Err(SpecfunError::Overflow {
                    function: "bessel_y",
                    n,
                    x,
                });
            }
            v
        }
    };
    Ok(reflect(n, v))
}

/// `H0(x) = i H0^(1)(ix) = (2/pi) K0(x)`, the modified-Helmholtz part of the
/// biharmonic kernel.
pub fn h0_tilde(x: f64) -> Result<f64> {
    check_positive("h0_tilde", x)?;
    Ok(k0_direct(x) / FRAC_PI_2)
}

/// Modified Bessel function of the second kind, `K_n(x)` for `x > 0`.
///
/// `K_0` is returned as `h0_tilde(x) * pi/2`, so the two agree bit for bit.
pub fn bessel_k(n: i32, x: f64) -> Result<f64> {
    let m = check_order(n)?;
    check_positive("bessel_k", x)?;
    if m == 0 {
        return Ok(h0_tilde(x)? * FRAC_PI_2);
    }
    if m == 1 && x < SERIES_LIMIT {
        return Ok(series::k01(x).1);
    }
    let (k0s, k1s) = k01_scaled(x);
    let s = sequence::k_scaled_seq(m, x, k0s, k1s)[m];
    if s.mantissa == 0.0 {
        return Ok(0.0);
    }
    let log = s.mantissa.ln() + f64::from(s.exp2) * std::f64::consts::LN_2 - x;
    let v = log.exp();
    if !v.is_finite() {
        return Err(SpecfunError::Overflow {
            function: "bessel_k",
            n,
            x,
        });
    }
    Ok(v)
}

/// Hankel function of the first kind, `H_n^(1)(x) = J_n(x) + i Y_n(x)`.
pub fn hankel1(n: i32, x: f64) -> Result<Complex64> {
    check_positive("hankel1", x)?;
    Ok(Complex64::new(bessel_j(n, x)?, bessel_y(n, x)?))
}

/// `J_n'(x)` via `(J_{n-1} - J_{n+1}) / 2`.
pub fn dbessel_j(n: i32, x: f64) -> Result<f64> {
    check_order(n.saturating_add(n.signum()))?;
    Ok(0.5 * (bessel_j(n - 1, x)? - bessel_j(n + 1, x)?))
}

/// `Y_n'(x)` via `(Y_{n-1} - Y_{n+1}) / 2`.
pub fn dbessel_y(n: i32, x: f64) -> Result<f64> {
    check_order(n.saturating_add(n.signum()))?;
    Ok(0.5 * (bessel_y(n - 1, x)? - bessel_y(n + 1, x)?))
}

/// `H_n^(1)'(x)` via `(H_{n-1} - H_{n+1}) / 2`.
pub fn dhankel1(n: i32, x: f64) -> Result<Complex64> {
    check_order(n.saturating_add(n.signum()))?;
    Ok(0.5 * (hankel1(n - 1, x)? - hankel1(n + 1, x)?))
}

/// `K_n'(x)` via `-(K_{n-1} + K_{n+1}) / 2`.
pub fn dbessel_k(n: i32, x: f64) -> Result<f64> {
    check_order(n.saturating_add(n.signum()))?;
    Ok(-0.5 * (bessel_k(n - 1, x)? + bessel_k(n + 1, x)?))
}

/// `H^(1)_0..=H^(1)_nmax` at `x`, scaled to avoid overflow.
pub fn hankel1_seq(nmax: usize, x: f64) -> Result<Vec<Scaled<Complex64>>> {
    check_order(nmax as i32)?;
    check_positive("hankel1_seq", x)?;
    Ok(sequence::h_seq(nmax, x, &order01(x)))
}

/// `e^x K_n(x)` for `n = 0..=nmax`, scaled to avoid overflow.
pub fn bessel_k_scaled_seq(nmax: usize, x: f64) -> Result<Vec<Scaled<f64>>> {
    check_order(nmax as i32)?;
    check_positive("bessel_k_scaled_seq", x)?;
    let (k0s, k1s) = k01_scaled(x);
    Ok(sequence::k_scaled_seq(nmax, x, k0s, k1s))
}

/// `(J0(x), Y0(x), H0(x))` in one evaluation, for kernel sums.
///
/// `H0` here is the decaying `h0_tilde`, bit-identical to [`h0_tilde`].
pub fn j0_y0_h0(x: f64) -> (f64, f64, f64) {
    if x < SERIES_LIMIT {
        let b = series::jy01(x);
        (b.j0, b.y0, series::k01(x).0 / FRAC_PI_2)
    } else if x < ASYMPTOTIC_LIMIT {
        let (j0, y0, k0s) = chebyshev::jyk0(x);
        (j0, y0, k0s * (-x).exp() / FRAC_PI_2)
    } else {
        let (j0, y0, k0s) = asymptotic::jyk0(x);
        (j0, y0, k0s * (-x).exp() / FRAC_PI_2)
    }
}

fn check_ratio_args(function: &'static str, num: f64, den: f64) -> Result<()> {
    check_positive(function, num)?;
    check_positive(function, den)?;
    if den > num {
        return Err(SpecfunError::ArgumentOrder { function, num, den });
    }
    Ok(())
}

/// `H_n^(1)(num) / H_n^(1)(den)` for `den <= num`.
pub fn hankel1_ratio(n: i32, num: f64, den: f64) -> Result<Complex64> {
    let m = check_order(n)?;
    check_ratio_args("hankel1_ratio", num, den)?;
    if num == den {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let top = sequence::h_seq(m, num, &order01(num))[m];
    let bottom = sequence::h_seq(m, den, &order01(den))[m];
    if bottom.mantissa.norm() == 0.0 {
        return Err(SpecfunError::Underflow {
            function: "hankel1_ratio",
            n,
            x: den,
        });
    }
    // (-1)^n cancels between numerator and denominator
    Ok(top.ratio(&bottom))
}

/// `K_n(num) / K_n(den)` for `den <= num`.
pub fn k_ratio(n: i32, num: f64, den: f64) -> Result<f64> {
    let m = check_order(n)?;
    check_ratio_args("k_ratio", num, den)?;
    if num == den {
        return Ok(1.0);
    }
    let top = bessel_k_scaled_seq(m, num)?[m];
    let bottom = bessel_k_scaled_seq(m, den)?[m];
    if bottom.mantissa == 0.0 {
        return Err(SpecfunError::Underflow {
            function: "k_ratio",
            n,
            x: den,
        });
    }
    Ok(top.ratio(&bottom) * (den - num).exp())
}

/// Value and derivative ratios for orders `0..=nmax`, used to continue a
/// circle-harmonic series from radius `R` (argument `den = kR`) to radius
/// `rho` (argument `num = k rho`).
#[derive(Debug, Clone)]
pub struct RatioTable {
    /// `F_n(num) / F_n(den)`
    pub value: Vec<Complex64>,
    /// `F_n'(num) / F_n(den)`
    pub derivative: Vec<Complex64>,
}

/// Ratios `H_n(num)/H_n(den)` and `H_n'(num)/H_n(den)` for `n = 0..=nmax`.
pub fn hankel1_ratio_table(nmax: usize, num: f64, den: f64) -> Result<RatioTable> {
    check_ratio_args("hankel1_ratio_table", num, den)?;
    let top = hankel1_seq(nmax + 1, num)?;
    let bottom = hankel1_seq(nmax, den)?;
    let mut value = Vec::with_capacity(nmax + 1);
    let mut derivative = Vec::with_capacity(nmax + 1);
    for n in 0..=nmax {
        if bottom[n].mantissa.norm() == 0.0 {
            return Err(SpecfunError::Underflow {
                function: "hankel1_ratio_table",
                n: n as i32,
                x: den,
            });
        }
        // H_{-1} = -H_1
        let below = if n == 0 {
            Scaled {
                mantissa: -top[1].mantissa,
                exp2: top[1].exp2,
            }
        } else {
            top[n - 1]
        };
        let d = below.half_difference(&top[n + 1]);
        value.push(if num == den {
            Complex64::new(1.0, 0.0)
        } else {
            top[n].ratio(&bottom[n])
        });
        derivative.push(d.ratio(&bottom[n]));
    }
    Ok(RatioTable { value, derivative })
}

/// Ratios `K_n(num)/K_n(den)` and `K_n'(num)/K_n(den)` for `n = 0..=nmax`.
pub fn k_ratio_table(nmax: usize, num: f64, den: f64) -> Result<RatioTable> {
    check_ratio_args("k_ratio_table", num, den)?;
    let top = bessel_k_scaled_seq(nmax + 1, num)?;
    let bottom = bessel_k_scaled_seq(nmax, den)?;
    let decay = (den - num).exp();
    let mut value = Vec::with_capacity(nmax + 1);
    let mut derivative = Vec::with_capacity(nmax + 1);
    for n in 0..=nmax {
        if bottom[n].mantissa == 0.0 {
            return Err(SpecfunError::Underflow {
                function: "k_ratio_table",
                n: n as i32,
                x: den,
            });
        }
        // K_{-1} = K_1
        let below = if n == 0 { top[1] } else { top[n - 1] };
        let d = below.neg_half_sum(&top[n + 1]);
        let v = if num == den {
            1.0
        } else {
            top[n].ratio(&bottom[n]) * decay
        };
        value.push(Complex64::new(v, 0.0));
        derivative.push(Complex64::new(d.ratio(&bottom[n]) * decay, 0.0));
    }
    Ok(RatioTable { value, derivative })
}

#[cfg(test)]
mod tests;
