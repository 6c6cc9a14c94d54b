use crate::forward::{Point2, SourceField};

/// `0.3(1-x1)^2 e^{-x1^2-(x2+1)^2} - (0.2 x1 - x1^3 - x2^5) e^{-x1^2-x2^2}
///  - 0.03 e^{-(x1+1)^2-x2^2}`
pub fn test_source(p: Point2) -> f64 {
    let Point2 { x1, x2 } = p;
    0.3 * (1.0 - x1).powi(2) * (-x1 * x1 - (x2 + 1.0).powi(2)).exp()
        - (0.2 * x1 - x1.powi(3) - x2.powi(5)) * (-x1 * x1 - x2 * x2).exp()
        - 0.03 * (-(x1 + 1.0).powi(2) - x2 * x2).exp()
}

/// [`test_source`] clipped to `(-a, a)^2`.
pub fn test_source_field(a: f64) -> SourceField {
    SourceField::new(a, test_source)
}
