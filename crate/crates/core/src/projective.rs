//! Points of the projective line.

use serde::{Serialize, Serializer};

use crate::numerics::{approx_eq, Scalar, ToleranceConfig};

/// A point of P^1: either `[x:1]` or `[1:0]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LinePoint {
    Finite(Scalar),
    Infinity,
}

impl LinePoint {
    pub fn real(x: f64) -> Self {
        LinePoint::Finite(Scalar::new(x, 0.0))
    }

    /// Normalized homogeneous coordinates.
    pub fn homogeneous(&self) -> [Scalar; 2] {
        match *self {
            LinePoint::Finite(x) => [x, Scalar::new(1.0, 0.0)],
            LinePoint::Infinity => [Scalar::new(1.0, 0.0), Scalar::new(0.0, 0.0)],
        }
    }

    pub fn finite(&self) -> Option<Scalar> {
        match *self {
            LinePoint::Finite(x) => Some(x),
            LinePoint::Infinity => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, LinePoint::Infinity)
    }

    pub fn neg(&self) -> Self {
        match *self {
            LinePoint::Finite(x) => LinePoint::Finite(-x),
            LinePoint::Infinity => LinePoint::Infinity,
        }
    }

    /// Points equal within tolerance; infinity only equals infinity.
    pub fn approx_eq(&self, other: &LinePoint, cfg: &ToleranceConfig) -> bool {
        match (self, other) {
            (LinePoint::Finite(a), LinePoint::Finite(b)) => approx_eq(*a, *b, cfg),
            (LinePoint::Infinity, LinePoint::Infinity) => true,
            _ => false,
        }
    }
}

impl From<Scalar> for LinePoint {
    fn from(x: Scalar) -> Self {
        LinePoint::Finite(x)
    }
}

/// Serializes as `[re, im]` or the string `"inf"`.
impl Serialize for LinePoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            LinePoint::Finite(x) => [x.re, x.im].serialize(serializer),
            LinePoint::Infinity => serializer.serialize_str("inf"),
        }
    }
}

/// True when some pair of points coincides within tolerance.
pub fn has_collision(points: &[LinePoint], cfg: &ToleranceConfig) -> bool {
    points
        .iter()
        .enumerate()
        .any(|(i, p)| points[i + 1..].iter().any(|q| p.approx_eq(q, cfg)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shape() {
        let pts = vec![LinePoint::real(2.0), LinePoint::Infinity];
        assert_eq!(serde_json::to_string(&pts).unwrap(), r#"[[2.0,0.0],"inf"]"#);
    }

    #[test]
    fn collisions() {
        let cfg = ToleranceConfig::default();
        assert!(!has_collision(&[LinePoint::real(1.0), LinePoint::Infinity], &cfg));
        assert!(has_collision(&[LinePoint::Infinity, LinePoint::real(0.0), LinePoint::Infinity], &cfg));
        assert!(has_collision(&[LinePoint::real(1.0), LinePoint::real(1.0 + 1e-13)], &cfg));
    }
}
