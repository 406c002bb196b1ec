//! Moduli of degree-4 cyclic étale covers of genus-2 curves.
//!
//! A cover is encoded by an unordered admissible triple `{t1, t2, t3}`; the
//! six Weierstrass points of the base curve are then fixed in the frame
//! `w1..w3 = [ti:1]`, `w4 = [1:1]`, `u1 = [1:0]`, `u2 = [0:1]`. Two-torsion
//! points of the genus-2 Jacobian are even subsets of the six Weierstrass
//! points modulo complementation.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{approx_eq, complex_total_order, is_finite, Scalar, ToleranceConfig};
use crate::projective::LinePoint;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModuliError {
    #[error("t{index} = {value} is an excluded value (0, 1 or -1)")]
    ExcludedValue { index: usize, value: Scalar },
    #[error("t{i}^2 and t{j}^2 coincide")]
    SquareCollision { i: usize, j: usize },
    #[error("non-finite coordinate {0}")]
    NonFinite(Scalar),
    #[error("sign vector must have exactly 3 entries of +1/-1, got {0}")]
    SignArity(String),
    #[error("index {0} outside 1..=6")]
    IndexOutOfRange(usize),
    #[error("indices are equal ({0})")]
    EqualIndices(usize),
    #[error("subset has odd cardinality")]
    OddSubset,
}

impl ModuliError {
    /// Stable machine-readable name of the variant.
    pub fn code(&self) -> &'static str {
        match self {
            ModuliError::ExcludedValue { .. } => "ExcludedValue",
            ModuliError::SquareCollision { .. } => "SquareCollision",
            ModuliError::NonFinite(_) => "NonFinite",
            ModuliError::SignArity(_) => "SignArity",
            ModuliError::IndexOutOfRange(_) => "IndexOutOfRange",
            ModuliError::EqualIndices(_) => "EqualIndices",
            ModuliError::OddSubset => "OddSubset",
        }
    }
}

/// An admissible unordered triple, stored sorted by `complex_total_order`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModuliPoint {
    t: [Scalar; 3],
}

impl ModuliPoint {
    pub fn validate(
        t1: Scalar,
        t2: Scalar,
        t3: Scalar,
        cfg: &ToleranceConfig,
    ) -> Result<Self, ModuliError> {
        let mut t = [t1, t2, t3];
        for (i, &ti) in t.iter().enumerate() {
            if !is_finite(ti) {
                return Err(ModuliError::NonFinite(ti));
            }
            let excluded = [0.0, 1.0, -1.0]
                .iter()
                .any(|&e| approx_eq(ti, Scalar::new(e, 0.0), cfg));
            if excluded {
                return Err(ModuliError::ExcludedValue {
                    index: i + 1,
                    value: ti,
                });
            }
        }
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            if approx_eq(t[i] * t[i], t[j] * t[j], cfg) {
                return Err(ModuliError::SquareCollision { i: i + 1, j: j + 1 });
            }
        }
        t.sort_by(complex_total_order);
        Ok(Self { t })
    }

    pub fn from_real(t1: f64, t2: f64, t3: f64) -> Result<Self, ModuliError> {
        Self::validate(
            Scalar::new(t1, 0.0),
            Scalar::new(t2, 0.0),
            Scalar::new(t3, 0.0),
            &ToleranceConfig::default(),
        )
    }

    /// The sorted triple.
    pub fn t(&self) -> [Scalar; 3] {
        self.t
    }

    /// The six orderings of the triple, identity first.
    pub fn orderings(&self) -> [[Scalar; 3]; 6] {
        let [a, b, c] = self.t;
        [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]]
    }

    /// Componentwise comparison of the canonical (sorted) triples.
    pub fn approx_eq(&self, other: &ModuliPoint, cfg: &ToleranceConfig) -> bool {
        self.t
            .iter()
            .zip(other.t.iter())
            .all(|(a, b)| approx_eq(*a, *b, cfg))
    }

    /// Smallest distance between two of the eight branch values
    /// `0, ±1, ±t1, ±t2, ±t3`, relative to the largest of them.
    /// Small values flag nearly degenerate covers.
    pub fn separation(&self) -> f64 {
        let mut vals = vec![Scalar::new(0.0, 0.0), Scalar::new(1.0, 0.0), Scalar::new(-1.0, 0.0)];
        for t in self.t {
            vals.push(t);
            vals.push(-t);
        }
        let scale = vals.iter().map(|v| v.norm()).fold(1.0, f64::max);
        let mut best = f64::INFINITY;
        for i in 0..vals.len() {
            for j in i + 1..vals.len() {
                best = best.min((vals[i] - vals[j]).norm());
            }
        }
        best / scale
    }
}

impl fmt::Display for ModuliPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.t;
        write!(f, "{{{a}, {b}, {c}}}")
    }
}

/// Signs applied to `(t1, t2, t3)`; all eight patterns are distinct.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SignVector([i8; 3]);

impl SignVector {
    pub const PLUS: SignVector = SignVector([1, 1, 1]);
    pub const MINUS: SignVector = SignVector([-1, -1, -1]);

    pub fn new(s: [i8; 3]) -> Result<Self, ModuliError> {
        if s.iter().all(|&x| x == 1 || x == -1) {
            Ok(Self(s))
        } else {
            Err(ModuliError::SignArity(format!("{s:?}")))
        }
    }

    /// Parses `"+,-,+"`.
    pub fn parse(text: &str) -> Result<Self, ModuliError> {
        let parts: Vec<&str> = text.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(ModuliError::SignArity(text.to_string()));
        }
        let mut s = [0i8; 3];
        for (slot, p) in s.iter_mut().zip(parts) {
            *slot = match p {
                "+" | "+1" | "1" => 1,
                "-" | "-1" => -1,
                _ => return Err(ModuliError::SignArity(text.to_string())),
            };
        }
        Ok(Self(s))
    }

    pub fn signs(&self) -> [i8; 3] {
        self.0
    }

    pub fn negated(&self) -> Self {
        Self(self.0.map(|x| -x))
    }

    /// Applies the signs to an ordered triple.
    pub fn apply(&self, t: [Scalar; 3]) -> [Scalar; 3] {
        [0, 1, 2].map(|i| t[i] * f64::from(self.0[i]))
    }

    /// All 8 vectors of `{±1}^3`, in binary order starting at `(+,+,+)`.
    pub fn all() -> [SignVector; 8] {
        std::array::from_fn(|k| {
            SignVector([0, 1, 2].map(|bit| if (k >> (2 - bit)) & 1 == 0 { 1 } else { -1 }))
        })
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<&str> = self.0.iter().map(|&x| if x > 0 { "+" } else { "-" }).collect();
        write!(f, "{}", s.join(","))
    }
}

/// Six Weierstrass points in the normalized frame together with the sign
/// choice selecting the cover.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverDatum {
    pub w: [LinePoint; 4],
    pub u: [LinePoint; 2],
    pub signs: SignVector,
}

#[derive(Serialize)]
struct LabeledPoint {
    label: &'static str,
    point: [[f64; 2]; 2],
}

#[derive(Serialize)]
struct CoverJson {
    points: Vec<LabeledPoint>,
    signs: [i8; 3],
}

impl CoverDatum {
    /// Reads `(t1, t2, t3)` back from `w1, w2, w3`.
    pub fn triple(&self) -> [Scalar; 3] {
        self.w[..3]
            .iter()
            .map(|p| p.finite().expect("w1..w3 are finite by construction"))
            .collect::<Vec<_>>()
            .try_into()
            .unwrap()
    }

    pub fn points(&self) -> [LinePoint; 6] {
        [self.w[0], self.w[1], self.w[2], self.w[3], self.u[0], self.u[1]]
    }

    /// Labeled homogeneous coordinates: `{"points":[{"label":"w1","point":[[re,im],[re,im]]},..],"signs":[..]}`.
    pub fn to_json(&self) -> serde_json::Value {
        let labels = ["w1", "w2", "w3", "w4", "u1", "u2"];
        let points = labels
            .iter()
            .zip(self.points())
            .map(|(&label, p)| {
                let [x, y] = p.homogeneous();
                LabeledPoint {
                    label,
                    point: [[x.re, x.im], [y.re, y.im]],
                }
            })
            .collect();
        serde_json::to_value(CoverJson {
            points,
            signs: self.signs.signs(),
        })
        .expect("plain data serializes")
    }
}

pub fn cover_from_point(p: &ModuliPoint, signs: SignVector) -> CoverDatum {
    let [t1, t2, t3] = p.t();
    CoverDatum {
        w: [
            LinePoint::Finite(t1),
            LinePoint::Finite(t2),
            LinePoint::Finite(t3),
            LinePoint::real(1.0),
        ],
        u: [LinePoint::Infinity, LinePoint::real(0.0)],
        signs,
    }
}

/// The eight bundle choices over a cover datum, one per sign pattern.
///
/// Over each of `w1, w2, w3` there are two square roots `±ti` to choose
/// from; the choice over `w4 = [1:1]` is normalized to `+1`, which is why
/// three free signs parametrize the whole set.
pub fn q_set(_c: &CoverDatum) -> Vec<SignVector> {
    SignVector::all().to_vec()
}

/// A two-torsion point of the Jacobian of a genus-2 curve: an even subset
/// of the six Weierstrass points modulo complementation, stored as the
/// representative of cardinality 0 or 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TwoTorsionClass {
    mask: u8,
}

const FULL: u8 = 0b11_1111;

impl TwoTorsionClass {
    pub const ZERO: TwoTorsionClass = TwoTorsionClass { mask: 0 };

    fn from_mask(mask: u8) -> Result<Self, ModuliError> {
        let mask = mask & FULL;
        if mask.count_ones() % 2 == 1 {
            return Err(ModuliError::OddSubset);
        }
        let mask = if mask.count_ones() > 3 { FULL ^ mask } else { mask };
        Ok(Self { mask })
    }

    /// Class of an even subset of `{1..6}` (1-based indices).
    pub fn from_subset(indices: &[usize]) -> Result<Self, ModuliError> {
        let mut mask = 0u8;
        for &i in indices {
            if !(1..=6).contains(&i) {
                return Err(ModuliError::IndexOutOfRange(i));
            }
            mask ^= 1 << (i - 1);
        }
        Self::from_mask(mask)
    }

    /// The class of `w_i - w_j`.
    pub fn from_pair(i: usize, j: usize) -> Result<Self, ModuliError> {
        for k in [i, j] {
            if !(1..=6).contains(&k) {
                return Err(ModuliError::IndexOutOfRange(k));
            }
        }
        if i == j {
            return Err(ModuliError::EqualIndices(i));
        }
        Self::from_mask((1 << (i - 1)) | (1 << (j - 1)))
    }

    /// 1-based indices of the canonical representative.
    pub fn subset(&self) -> Vec<usize> {
        (1..=6).filter(|i| self.mask & (1 << (i - 1)) != 0).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.mask == 0
    }

    /// Group law: symmetric difference, reduced modulo complementation.
    pub fn add(&self, other: &TwoTorsionClass) -> TwoTorsionClass {
        Self::from_mask(self.mask ^ other.mask).expect("sum of even subsets is even")
    }

    /// The 16 classes: zero followed by the 15 pairs in lexicographic order.
    pub fn all() -> Vec<TwoTorsionClass> {
        let mut out = vec![Self::ZERO];
        for i in 1..=6 {
            for j in i + 1..=6 {
                out.push(Self::from_pair(i, j).unwrap());
            }
        }
        out
    }
}

pub fn tt_from_pair(i: usize, j: usize) -> Result<TwoTorsionClass, ModuliError> {
    TwoTorsionClass::from_pair(i, j)
}

pub fn tt_add(a: &TwoTorsionClass, b: &TwoTorsionClass) -> TwoTorsionClass {
    a.add(b)
}
