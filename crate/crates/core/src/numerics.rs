//! Complex scalar policy: tolerance comparison, a stable quadratic solver and
//! a deterministic total order on complex numbers.

use std::cmp::Ordering;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// All complex values in the crate are IEEE doubles.
pub type Scalar = Complex64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("all coefficients of the quadratic are zero")]
    AllCoefficientsZero,
    #[error("non-finite value {0}")]
    NonFinite(Scalar),
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),
}

/// Two-parameter comparison tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-9,
        }
    }
}

impl ToleranceConfig {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Result<Self, NumericsError> {
        if !(abs_tol.is_finite() && rel_tol.is_finite()) || abs_tol < 0.0 || rel_tol < 0.0 {
            return Err(NumericsError::InvalidTolerance(format!(
                "abs_tol={abs_tol}, rel_tol={rel_tol}"
            )));
        }
        Ok(Self { abs_tol, rel_tol })
    }

    /// Parses `"abs,rel"`, e.g. `"1e-10,1e-9"`.
    pub fn parse(text: &str) -> Result<Self, NumericsError> {
        let bad = || NumericsError::InvalidTolerance(text.to_string());
        let (a, r) = text.split_once(',').ok_or_else(bad)?;
        let a: f64 = a.trim().parse().map_err(|_| bad())?;
        let r: f64 = r.trim().parse().map_err(|_| bad())?;
        Self::new(a, r)
    }
}

pub fn is_finite(x: Scalar) -> bool {
    x.re.is_finite() && x.im.is_finite()
}

pub fn ensure_finite(x: Scalar) -> Result<Scalar, NumericsError> {
    if is_finite(x) {
        Ok(x)
    } else {
        Err(NumericsError::NonFinite(x))
    }
}

/// `|x - y| <= max(abs_tol, rel_tol * max(|x|, |y|))`.
pub fn approx_eq(x: Scalar, y: Scalar, cfg: &ToleranceConfig) -> bool {
    let scale = x.norm().max(y.norm());
    (x - y).norm() <= cfg.abs_tol.max(cfg.rel_tol * scale)
}

/// Lexicographic order on (re, im). Uses `f64::total_cmp`, so it is total
/// even on signed zeros.
pub fn complex_total_order(x: &Scalar, y: &Scalar) -> Ordering {
    x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im))
}

/// Roots of a quadratic (or a degenerate linear) polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticRoots {
    pub roots: Vec<Scalar>,
    /// Set when the two roots of a genuine quadratic coincide exactly.
    pub double_root: bool,
}

/// Solves `a z^2 + b z + c = 0`.
///
/// For `a != 0` uses `q = -(b + sign * sqrt(b^2 - 4ac)) / 2` with the sign
/// chosen so that `b` and the square root do not cancel, then returns
/// `q / a` and `c / q`. With `a == 0` the polynomial is linear; with
/// `a == b == 0` and `c != 0` there are no roots.
pub fn solve_quadratic(a: Scalar, b: Scalar, c: Scalar) -> Result<QuadraticRoots, NumericsError> {
    let zero = Scalar::new(0.0, 0.0);
    if a == zero && b == zero && c == zero {
        return Err(NumericsError::AllCoefficientsZero);
    }
    if a == zero {
        if b == zero {
            return Ok(QuadraticRoots {
                roots: vec![],
                double_root: false,
            });
        }
        return Ok(QuadraticRoots {
            roots: vec![-c / b],
            double_root: false,
        });
    }
    let disc = (b * b - a * c * 4.0).sqrt();
    // pick the branch of the root aligned with b
    let aligned = if (b.conj() * disc).re >= 0.0 { disc } else { -disc };
    let q = -(b + aligned) * 0.5;
    if q == zero {
        // b == 0 and c == 0
        return Ok(QuadraticRoots {
            roots: vec![zero, zero],
            double_root: true,
        });
    }
    let r1 = q / a;
    let r2 = c / q;
    Ok(QuadraticRoots {
        double_root: r1 == r2,
        roots: vec![r1, r2],
    })
}
