use gauss_quad::GaussLegendre;

use super::{ForwardError, Point2};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureScheme {
    TensorGaussLegendre,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub point: Point2,
    pub weight: f64,
}

/// Tensor-product rule over an axis-aligned rectangle.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub nodes: Vec<Node>,
    pub scheme: QuadratureScheme,
    /// Nodes per axis.
    pub resolution: usize,
}

impl QuadratureRule {
    /// Gauss–Legendre rule with `n` nodes per axis on `(-a, a)^2`.
    pub fn gauss_legendre(a: f64, n: usize) -> Result<Self, ForwardError> {
        Self::gauss_legendre_rect((-a, a), (-a, a), n)
    }

    /// Gauss–Legendre rule with `n` nodes per axis on `x1 in (lo, hi)`,
    /// `x2 in (lo, hi)`.
    pub fn gauss_legendre_rect(
        x1: (f64, f64),
        x2: (f64, f64),
        n: usize,
    ) -> Result<Self, ForwardError> {
        if !(x1.1 > x1.0 && x2.1 > x2.0) {
            return Err(ForwardError::Quadrature(format!(
                "empty rectangle {x1:?} x {x2:?}"
            )));
        }
        let rule = GaussLegendre::new(n).map_err(|e| ForwardError::Quadrature(e.to_string()))?;
        let pairs = rule.into_node_weight_pairs();
        let map = |(lo, hi): (f64, f64)| -> Vec<(f64, f64)> {
            let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
            pairs
                .iter()
                .map(|&(t, w)| (mid + half * t, half * w))
                .collect()
        };
        let (axis1, axis2) = (map(x1), map(x2));
        let nodes = axis1
            .iter()
            .flat_map(|&(p1, w1)| {
                axis2.iter().map(move |&(p2, w2)| Node {
                    point: Point2::new(p1, p2),
                    weight: w1 * w2,
                })
            })
            .collect();
        Ok(Self {
            nodes,
            scheme: QuadratureScheme::TensorGaussLegendre,
            resolution: n,
        })
    }

    pub fn total_weight(&self) -> f64 {
        self.nodes.iter().map(|n| n.weight).sum()
    }

    pub fn integrate(&self, f: impl Fn(Point2) -> f64) -> f64 {
        self.nodes.iter().map(|n| n.weight * f(n.point)).sum()
    }
}
