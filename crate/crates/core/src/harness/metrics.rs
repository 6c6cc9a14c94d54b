use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("length mismatch: {approx} approximate vs {exact} exact values")]
    Length { approx: usize, exact: usize },
    #[error("relative error is undefined for an all-zero reference")]
    ZeroReference,
}

/// Scalars with a modulus, so real and complex samples share the metrics.
pub trait Modulus: Copy {
    fn modulus(self) -> f64;
    fn distance(self, other: Self) -> f64;
}

impl Modulus for f64 {
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn distance(self, other: Self) -> f64 {
        (self - other).abs()
    }
}

impl Modulus for Complex64 {
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn distance(self, other: Self) -> f64 {
        (self - other).norm()
    }
}

fn check<T>(approx: &[T], exact: &[T]) -> Result<(), MetricError> {
    if approx.len() != exact.len() {
        return Err(MetricError::Length {
            approx: approx.len(),
            exact: exact.len(),
        });
    }
    Ok(())
}

/// `sqrt(Σ|w - w^ε|²) / sqrt(Σ|w|²)`.
pub fn rel_l2_error<T: Modulus>(approx: &[T], exact: &[T]) -> Result<f64, MetricError> {
    check(approx, exact)?;
    let den: f64 = exact.iter().map(|e| e.modulus().powi(2)).sum();
    if den == 0.0 {
        return Err(MetricError::ZeroReference);
    }
    let num: f64 = approx
        .iter()
        .zip(exact)
        .map(|(a, e)| a.distance(*e).powi(2))
        .sum();
    Ok((num / den).sqrt())
}

/// `max|w - w^ε| / max|w|`.
pub fn rel_inf_error<T: Modulus>(approx: &[T], exact: &[T]) -> Result<f64, MetricError> {
    check(approx, exact)?;
    let den = exact.iter().map(|e| e.modulus()).fold(0.0, f64::max);
    if den == 0.0 {
        return Err(MetricError::ZeroReference);
    }
    let num = approx
        .iter()
        .zip(exact)
        .map(|(a, e)| a.distance(*e))
        .fold(0.0, f64::max);
    Ok(num / den)
}
