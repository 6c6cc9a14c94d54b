//! Large-argument Hankel expansions for orders 0 and 1.
//!
//! With `a_k(nu) = prod_{i=1..k} (4 nu^2 - (2i-1)^2) / (k! 8^k)`:
//!
//! `H_nu(x) ~ sqrt(2/(pi x)) e^{i(x - nu pi/2 - pi/4)} sum_k i^k a_k / x^k`
//! `K_nu(x) ~ sqrt(pi/(2x)) e^{-x} sum_k a_k / x^k`
//!
//! Both series share the same coefficients. For `x >= 25` the smallest term
//! is far below machine precision.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_2_PI, PI};

use super::Order01;

const MAX_TERMS: usize = 60;
const TERM_TOL: f64 = 1e-17;

struct Sums {
    p: f64,
    q: f64,
    k: f64,
}

fn sums(nu: i32, x: f64) -> Sums {
    let mu = 4.0 * f64::from(nu * nu);
    let mut term = 1.0;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut k = 1.0;
    let mut last = f64::INFINITY;
    for i in 1..MAX_TERMS {
        let odd = (2 * i - 1) as f64;
        term *= (mu - odd * odd) / (8.0 * i as f64 * x);
        if term.abs() > last {
            // series started to diverge
            break;
        }
        last = term.abs();
        k += term;
        // i^i: 1, i, -1, -i, ...
        match i % 4 {
            0 => p += term,
            1 => q += term,
            2 => p -= term,
            _ => q -= term,
        }
        if term.abs() < TERM_TOL {
            break;
        }
    }
    Sums { p, q, k }
}

/// J0, J1, Y0, Y1 for large `x`.
pub(crate) fn jy01(x: f64) -> Order01 {
    let (s, c) = x.sin_cos();
    let amp = (FRAC_2_PI / x).sqrt();
    // x - pi/4 and x - 3pi/4 expanded exactly through sin x, cos x
    let (cos0, sin0) = ((c + s) * FRAC_1_SQRT_2, (s - c) * FRAC_1_SQRT_2);
    let (cos1, sin1) = ((s - c) * FRAC_1_SQRT_2, -(s + c) * FRAC_1_SQRT_2);
    let s0 = sums(0, x);
    let s1 = sums(1, x);
    Order01 {
        j0: amp * (s0.p * cos0 - s0.q * sin0),
        y0: amp * (s0.p * sin0 + s0.q * cos0),
        j1: amp * (s1.p * cos1 - s1.q * sin1),
        y1: amp * (s1.p * sin1 + s1.q * cos1),
    }
}

/// `(e^x K0(x), e^x K1(x))` for large `x`.
pub(crate) fn k01_scaled(x: f64) -> (f64, f64) {
    let amp = (PI / (2.0 * x)).sqrt();
    (amp * sums(0, x).k, amp * sums(1, x).k)
}

/// `(J0, Y0, e^x K0)` sharing one pass over the order-zero coefficients.
pub(crate) fn jyk0(x: f64) -> (f64, f64, f64) {
    let (s, c) = x.sin_cos();
    let (cos0, sin0) = ((c + s) * FRAC_1_SQRT_2, (s - c) * FRAC_1_SQRT_2);
    let sm = sums(0, x);
    let amp = (FRAC_2_PI / x).sqrt();
    (
        amp * (sm.p * cos0 - sm.q * sin0),
        amp * (sm.p * sin0 + sm.q * cos0),
        (PI / (2.0 * x)).sqrt() * sm.k,
    )
}
