//! The Prym map as a computable invariant.
//!
//! An ordered triple `(t1, t2, t3)` determines the pair of cross-ratios
//! `λ1 = cr(1, t1, t2, t3)` and `λ2 = cr(1, t1², t2², t3²)`. Reordering the
//! triple moves the pair along the diagonal action of S3 (the same Möbius
//! substitution on both coordinates), so the orbit of the pair labels the
//! fiber of the Prym map through the cover.

use std::cmp::Ordering;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::curves::{j_from_lambda, CurveError};
use crate::moduli::ModuliPoint;
use crate::numerics::{approx_eq, complex_total_order, is_finite, Scalar, ToleranceConfig};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PrymError {
    #[error("vanishing denominator in the cross-ratio of {0:?}")]
    DegenerateDenominator([Scalar; 3]),
    #[error("lambda = {0} is excluded (0, 1 or non-finite)")]
    ExcludedLambda(Scalar),
    #[error("lambda1 and lambda2 coincide ({0})")]
    EqualLambdas(Scalar),
    #[error(transparent)]
    Curve(#[from] CurveError),
}

impl PrymError {
    pub fn code(&self) -> &'static str {
        match self {
            PrymError::DegenerateDenominator(_) => "DegenerateDenominator",
            PrymError::ExcludedLambda(_) => "ExcludedLambda",
            PrymError::EqualLambdas(_) => "EqualLambdas",
            PrymError::Curve(CurveError::ExcludedLambda(_)) => "ExcludedLambda",
            PrymError::Curve(CurveError::DegenerateQuadruple) => "DegenerateQuadruple",
        }
    }
}

pub type LambdaPair = (Scalar, Scalar);

fn one() -> Scalar {
    Scalar::new(1.0, 0.0)
}

/// The six cross-ratio substitutions, identity first.
pub const S3_MAPS: [fn(Scalar) -> Scalar; 6] = [
    |l| l,
    |l| one() / l,
    |l| one() / (one() - l),
    |l| one() - l,
    |l| l / (l - one()),
    |l| (l - one()) / l,
];

/// `(λ1, λ2)` for an ordered triple.
pub fn lambda_pair(t: [Scalar; 3]) -> Result<LambdaPair, PrymError> {
    let [t1, t2, t3] = t;
    let zero = Scalar::new(0.0, 0.0);
    let den1 = (t2 - t1) * (t3 - one());
    let s = t.map(|x| x * x);
    let den2 = (s[1] - s[0]) * (s[2] - one());
    if den1 == zero || den2 == zero {
        return Err(PrymError::DegenerateDenominator(t));
    }
    let l1 = (t2 - one()) * (t3 - t1) / den1;
    let l2 = (s[1] - one()) * (s[2] - s[0]) / den2;
    if !is_finite(l1) || !is_finite(l2) {
        return Err(PrymError::DegenerateDenominator(t));
    }
    Ok((l1, l2))
}

fn check_lambda(l: Scalar) -> Result<(), PrymError> {
    let cfg = ToleranceConfig::default();
    if !is_finite(l) || approx_eq(l, Scalar::new(0.0, 0.0), &cfg) || approx_eq(l, one(), &cfg) {
        return Err(PrymError::ExcludedLambda(l));
    }
    Ok(())
}

fn pair_approx_eq(a: &LambdaPair, b: &LambdaPair, cfg: &ToleranceConfig) -> bool {
    approx_eq(a.0, b.0, cfg) && approx_eq(a.1, b.1, cfg)
}

/// Orbit of `(l1, l2)` under the diagonal S3 action, duplicates removed.
pub fn s3_orbit(l1: Scalar, l2: Scalar) -> Result<Vec<LambdaPair>, PrymError> {
    check_lambda(l1)?;
    check_lambda(l2)?;
    let cfg = ToleranceConfig::default();
    let mut out: Vec<LambdaPair> = Vec::with_capacity(6);
    for g in S3_MAPS {
        let pair = (g(l1), g(l2));
        if !out.iter().any(|p| pair_approx_eq(p, &pair, &cfg)) {
            out.push(pair);
        }
    }
    Ok(out)
}

/// Lexicographic (re, im) order in which components equal within the
/// tolerance count as ties.
fn tolerant_cmp(a: Scalar, b: Scalar, cfg: &ToleranceConfig) -> Ordering {
    let scale = a.norm().max(b.norm());
    let tol = cfg.abs_tol.max(cfg.rel_tol * scale);
    if (a.re - b.re).abs() > tol {
        return a.re.total_cmp(&b.re);
    }
    if (a.im - b.im).abs() > tol {
        return a.im.total_cmp(&b.im);
    }
    Ordering::Equal
}

fn pair_cmp(a: &LambdaPair, b: &LambdaPair, cfg: &ToleranceConfig) -> Ordering {
    tolerant_cmp(a.0, b.0, cfg)
        .then_with(|| tolerant_cmp(a.1, b.1, cfg))
        .then_with(|| complex_total_order(&a.0, &b.0))
        .then_with(|| complex_total_order(&a.1, &b.1))
}

/// Label of a fiber: the λ-pair, its orbit and the orbit's minimal member.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberInvariant {
    pub lambda1: Scalar,
    pub lambda2: Scalar,
    pub orbit: Vec<LambdaPair>,
    pub canonical: LambdaPair,
}

impl FiberInvariant {
    /// True when the two invariants label the same fiber.
    pub fn same_orbit(&self, other: &FiberInvariant, cfg: &ToleranceConfig) -> bool {
        other
            .orbit
            .iter()
            .any(|p| pair_approx_eq(p, &self.canonical, cfg))
    }

    pub fn contains(&self, pair: &LambdaPair, cfg: &ToleranceConfig) -> bool {
        self.orbit.iter().any(|p| pair_approx_eq(p, pair, cfg))
    }
}

pub fn canonical_invariant(
    l1: Scalar,
    l2: Scalar,
    cfg: &ToleranceConfig,
) -> Result<FiberInvariant, PrymError> {
    let orbit = s3_orbit(l1, l2)?;
    if approx_eq(l1, l2, cfg) {
        return Err(PrymError::EqualLambdas(l1));
    }
    let canonical = *orbit
        .iter()
        .min_by(|a, b| pair_cmp(a, b, cfg))
        .expect("orbit is nonempty");
    Ok(FiberInvariant {
        lambda1: l1,
        lambda2: l2,
        orbit,
        canonical,
    })
}

/// Fiber invariant of a moduli point (computed from its sorted ordering).
pub fn invariant_of(p: &ModuliPoint, cfg: &ToleranceConfig) -> Result<FiberInvariant, PrymError> {
    let (l1, l2) = lambda_pair(p.t())?;
    canonical_invariant(l1, l2, cfg)
}

/// Whether some orderings of `p` and `q` give componentwise equal λ-pairs.
pub fn same_fiber(p: &ModuliPoint, q: &ModuliPoint, cfg: &ToleranceConfig) -> bool {
    let Ok(inv) = invariant_of(p, cfg) else { return false };
    q.orderings()
        .iter()
        .filter_map(|t| lambda_pair(*t).ok())
        .any(|pair| pair_approx_eq(&pair, &inv.canonical, cfg))
}

/// `λ1 ≠ λ2` for the point, within tolerance.
pub fn lambdas_distinct(p: &ModuliPoint, cfg: &ToleranceConfig) -> bool {
    match lambda_pair(p.t()) {
        Ok((l1, l2)) => !approx_eq(l1, l2, cfg),
        Err(_) => false,
    }
}

/// Finite description of the polarized Prym threefold of a cover:
/// `(E_T × E_T × F_T) / ⟨e1+e1+f1, e2+e2+f2⟩` with `E_T`, `F_T` recorded by
/// their j-invariants and the marking recorded by the canonical λ-pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PrymDescriptor {
    pub j_e: Scalar,
    pub j_f: Scalar,
    pub invariant: FiberInvariant,
}

impl PrymDescriptor {
    pub const KERNEL_NOTE: &'static str = "<e1+e1+f1, e2+e2+f2>";

    pub fn approx_eq(&self, other: &PrymDescriptor, cfg: &ToleranceConfig) -> bool {
        approx_eq(self.j_e, other.j_e, cfg)
            && approx_eq(self.j_f, other.j_f, cfg)
            && self.invariant.same_orbit(&other.invariant, cfg)
    }
}

impl Serialize for PrymDescriptor {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire {
            #[serde(rename = "jE")]
            j_e: [f64; 2],
            #[serde(rename = "jF")]
            j_f: [f64; 2],
            canonical_lambda: [[f64; 2]; 2],
        }
        let (a, b) = self.invariant.canonical;
        Wire {
            j_e: [self.j_e.re, self.j_e.im],
            j_f: [self.j_f.re, self.j_f.im],
            canonical_lambda: [[a.re, a.im], [b.re, b.im]],
        }
        .serialize(serializer)
    }
}

pub fn prym_descriptor(p: &ModuliPoint, cfg: &ToleranceConfig) -> Result<PrymDescriptor, PrymError> {
    let invariant = invariant_of(p, cfg)?;
    let (l1, l2) = lambda_pair(p.t())?;
    Ok(PrymDescriptor {
        j_e: j_from_lambda(l1)?,
        j_f: j_from_lambda(l2)?,
        invariant,
    })
}
