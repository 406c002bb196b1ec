//! Fibers of the Prym map as explicit solution sets.
//!
//! For a λ-pair the fiber consists of the ordered triples solving
//!
//! ```text
//! (t2-1)(t3-t1) / ((t2-t1)(t3-1)) = λ1
//! (t2+1)(t3+t1) / ((t2+t1)(t3+1)) = λ2/λ1
//! ```
//!
//! Homogenized with a fourth coordinate these are the quadrics
//! `q1 = (t2-t4)(t3-t1) - λ1 (t2-t1)(t3-t4)` and
//! `q2 = (t2+t4)(t3+t1) - λ2' (t2+t1)(t3+t4)` with `λ2' = λ2/λ1`, whose
//! intersection in P^3 is an elliptic normal curve. The fiber is its
//! affine chart `t4 = 1` minus the non-admissible points.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::moduli::ModuliPoint;
use crate::numerics::{approx_eq, is_finite, solve_quadratic, Scalar, ToleranceConfig};
use crate::prym::{canonical_invariant, FiberInvariant, LambdaPair, PrymError};

/// Relative residual accepted for a point on `Q1 ∩ Q2`.
pub const RESIDUAL_REL_TOL: f64 = 1e-7;
/// Relative threshold for the minors and entries of the Jacobian.
pub const RANK_REL_TOL: f64 = 1e-7;
/// Sampled points with `ModuliPoint::separation` below this are discarded.
pub const MIN_SEPARATION: f64 = 1e-4;
/// Annulus from which `t1` is drawn.
pub const T1_RADII: (f64, f64) = (0.2, 5.0);
/// Draw budget per requested point.
pub const DRAWS_PER_POINT: usize = 100;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FiberError {
    #[error(transparent)]
    Lambda(#[from] PrymError),
    #[error("t1 = {0} is excluded (0 or 1)")]
    ExcludedT1(Scalar),
    #[error("no admissible solution for t1 = {0}")]
    NoAdmissibleSolution(Scalar),
    #[error("elimination polynomial vanishes identically for t1 = {0}")]
    DegenerateElimination(Scalar),
    #[error("found {found} of {requested} points within {draws} draws")]
    InsufficientYield {
        found: usize,
        requested: usize,
        draws: usize,
    },
    #[error("all four homogeneous coordinates vanish")]
    ZeroPoint,
}

impl FiberError {
    pub fn code(&self) -> &'static str {
        match self {
            FiberError::Lambda(e) => e.code(),
            FiberError::ExcludedT1(_) => "ExcludedT1",
            FiberError::NoAdmissibleSolution(_) => "NoAdmissibleSolution",
            FiberError::DegenerateElimination(_) => "DegenerateElimination",
            FiberError::InsufficientYield { .. } => "InsufficientYield",
            FiberError::ZeroPoint => "ZeroPoint",
        }
    }
}

fn one() -> Scalar {
    Scalar::new(1.0, 0.0)
}

/// A point `[t1:t2:t3:t4]` of P^3, scaled so that the last nonzero
/// coordinate is 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectivePoint3 {
    coords: [Scalar; 4],
}

impl ProjectivePoint3 {
    pub fn new(coords: [Scalar; 4]) -> Result<Self, FiberError> {
        let zero = Scalar::new(0.0, 0.0);
        let k = coords.iter().rposition(|&c| c != zero).ok_or(FiberError::ZeroPoint)?;
        let pivot = coords[k];
        Ok(Self {
            coords: coords.map(|c| c / pivot),
        })
    }

    /// The affine point `[t1:t2:t3:1]`.
    pub fn affine(t: [Scalar; 3]) -> Self {
        Self {
            coords: [t[0], t[1], t[2], one()],
        }
    }

    /// Raw coordinates without normalization (used to probe degenerate
    /// inputs).
    pub fn raw(coords: [Scalar; 4]) -> Self {
        Self { coords }
    }

    pub fn coords(&self) -> [Scalar; 4] {
        self.coords
    }

    fn max_norm(&self) -> f64 {
        self.coords.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// The pencil data `(λ1, λ2, λ2' = λ2/λ1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadricPair {
    pub lambda1: Scalar,
    pub lambda2: Scalar,
    pub lambda2_prime: Scalar,
}

impl QuadricPair {
    pub fn new(l1: Scalar, l2: Scalar, cfg: &ToleranceConfig) -> Result<Self, FiberError> {
        // validates λ ∉ {0, 1} and λ1 ≠ λ2
        canonical_invariant(l1, l2, cfg)?;
        Ok(Self::unchecked(l1, l2))
    }

    /// Skips validation; lets tests reach the degenerate pencils.
    pub fn unchecked(l1: Scalar, l2: Scalar) -> Self {
        Self {
            lambda1: l1,
            lambda2: l2,
            lambda2_prime: l2 / l1,
        }
    }

    fn coefficient_scale(&self) -> f64 {
        1.0 + self.lambda1.norm().max(self.lambda2_prime.norm())
    }

    /// Scale of the largest monomial of `q1`, `q2` at `p`.
    pub fn residual_scale(&self, p: &ProjectivePoint3) -> f64 {
        let m = p.max_norm();
        (m * m * self.coefficient_scale()).max(f64::MIN_POSITIVE)
    }

    /// The 2x4 matrix of partial derivatives of `(q1, q2)`.
    pub fn jacobian(&self, p: &ProjectivePoint3) -> [[Scalar; 4]; 2] {
        let [t1, t2, t3, t4] = p.coords;
        let l = self.lambda1;
        let m = self.lambda2_prime;
        [
            [
                (t4 - t2) + l * (t3 - t4),
                (t3 - t1) + l * (t4 - t3),
                (t2 - t4) + l * (t1 - t2),
                (t1 - t3) + l * (t2 - t1),
            ],
            [
                (t2 + t4) - m * (t3 + t4),
                (t1 + t3) - m * (t3 + t4),
                (t2 + t4) - m * (t1 + t2),
                (t1 + t3) - m * (t2 + t1),
            ],
        ]
    }
}

/// `(q1(p), q2(p))`.
pub fn eval_quadrics(qp: &QuadricPair, p: &ProjectivePoint3) -> (Scalar, Scalar) {
    let [t1, t2, t3, t4] = p.coords;
    let q1 = (t2 - t4) * (t3 - t1) - qp.lambda1 * (t2 - t1) * (t3 - t4);
    let q2 = (t2 + t4) * (t3 + t1) - qp.lambda2_prime * (t2 + t1) * (t3 + t4);
    (q1, q2)
}

/// Residuals of both quadrics relative to the largest monomial.
pub fn relative_residuals(qp: &QuadricPair, p: &ProjectivePoint3) -> (f64, f64) {
    let (q1, q2) = eval_quadrics(qp, p);
    let s = qp.residual_scale(p);
    (q1.norm() / s, q2.norm() / s)
}

pub fn on_intersection(qp: &QuadricPair, p: &ProjectivePoint3) -> bool {
    let (r1, r2) = relative_residuals(qp, p);
    r1 <= RESIDUAL_REL_TOL && r2 <= RESIDUAL_REL_TOL
}

/// Numerical rank of the Jacobian at `p`.
///
/// Rank is below 2 when every 2x2 minor is at most `RANK_REL_TOL` times the
/// product of the row norms, and 0 when every entry is at most
/// `RANK_REL_TOL` times the entry scale `max|ti| (1 + max(|λ1|, |λ2'|))`.
pub fn jacobian_rank(qp: &QuadricPair, p: &ProjectivePoint3, cfg: &ToleranceConfig) -> u8 {
    let m = qp.jacobian(p);
    let entry_scale = p.max_norm() * qp.coefficient_scale();
    let entry_tol = cfg.abs_tol.max(RANK_REL_TOL * entry_scale);
    if m.iter().flatten().all(|e| e.norm() <= entry_tol) {
        return 0;
    }
    let row_norm = |r: &[Scalar; 4]| r.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt();
    let minor_tol = (cfg.abs_tol * cfg.abs_tol).max(RANK_REL_TOL * row_norm(&m[0]) * row_norm(&m[1]));
    let mut max_minor: f64 = 0.0;
    for i in 0..4 {
        for j in i + 1..4 {
            let minor = m[0][i] * m[1][j] - m[0][j] * m[1][i];
            max_minor = max_minor.max(minor.norm());
        }
    }
    if max_minor <= minor_tol {
        1
    } else {
        2
    }
}

/// What happened to one root of the elimination quadratic.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum RootOutcome {
    Accepted,
    /// Introduced by clearing denominators; fails the rational equations.
    Spurious { residual: f64 },
    /// Solves the equations but the triple is not an admissible point.
    Inadmissible { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootDiagnostic {
    pub t2: [f64; 2],
    pub t3: [f64; 2],
    #[serde(flatten)]
    pub outcome: RootOutcome,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiberSolution {
    /// Admissible `(t2, t3)` pairs.
    pub pairs: Vec<(Scalar, Scalar)>,
    pub diagnostics: Vec<RootDiagnostic>,
}

/// Linear polynomial `c1 x + c0`.
#[derive(Debug, Clone, Copy)]
struct Linear {
    c1: Scalar,
    c0: Scalar,
}

impl Linear {
    fn at(&self, x: Scalar) -> Scalar {
        self.c1 * x + self.c0
    }

    fn size(&self) -> f64 {
        self.c1.norm() + self.c0.norm()
    }
}

/// `t3` as a fractional-linear function `num(t2) / den(t2)` of `t2`, from
/// one of the two equations.
struct Moebius {
    num: Linear,
    den: Linear,
}

impl Moebius {
    /// `(t2-1)(t3-t1) = λ1 (t2-t1)(t3-1)` solved for `t3`.
    fn first(l1: Scalar, t1: Scalar) -> Self {
        Self {
            num: Linear { c1: t1 - l1, c0: l1 * t1 - t1 },
            den: Linear { c1: one() - l1, c0: l1 * t1 - one() },
        }
    }

    /// `(t2+1)(t3+t1) = μ (t2+t1)(t3+1)` solved for `t3`.
    fn second(mu: Scalar, t1: Scalar) -> Self {
        Self {
            num: Linear { c1: mu - t1, c0: mu * t1 - t1 },
            den: Linear { c1: one() - mu, c0: one() - mu * t1 },
        }
    }

    /// `|den(x)|` relative to the size of the map at `x`.
    fn conditioning(&self, x: Scalar) -> f64 {
        let d = self.den.at(x).norm();
        d / (d + self.num.at(x).norm()).max(f64::MIN_POSITIVE)
    }

    fn at(&self, x: Scalar) -> Scalar {
        self.num.at(x) / self.den.at(x)
    }
}

fn relative_equation_residuals(l1: Scalar, mu: Scalar, t: [Scalar; 3]) -> f64 {
    let [t1, t2, t3] = t;
    let e1 = (t2 - one()) * (t3 - t1) / ((t2 - t1) * (t3 - one()));
    let e2 = (t2 + one()) * (t3 + t1) / ((t2 + t1) * (t3 + one()));
    let r1 = (e1 - l1).norm() / l1.norm().max(1.0);
    let r2 = (e2 - mu).norm() / mu.norm().max(1.0);
    if r1.is_finite() && r2.is_finite() {
        r1.max(r2)
    } else {
        f64::INFINITY
    }
}

fn as_pair(x: Scalar) -> [f64; 2] {
    [x.re, x.im]
}

/// Solves the fiber system for `(t2, t3)` with `t1` fixed.
///
/// Both equations are solved for `t3` as fractional-linear functions of
/// `t2`; equating them and clearing denominators gives a quadratic in `t2`.
/// Roots are checked against the original rational equations and then
/// validated as moduli points; rejected roots are kept in the diagnostics.
pub fn solve_fiber(
    l1: Scalar,
    l2: Scalar,
    t1: Scalar,
    cfg: &ToleranceConfig,
) -> Result<FiberSolution, FiberError> {
    let qp = QuadricPair::new(l1, l2, cfg)?;
    if !is_finite(t1) || approx_eq(t1, Scalar::new(0.0, 0.0), cfg) || approx_eq(t1, one(), cfg) {
        return Err(FiberError::ExcludedT1(t1));
    }
    let mu = qp.lambda2_prime;
    let f = Moebius::first(l1, t1);
    let g = Moebius::second(mu, t1);

    // f.num * g.den - g.num * f.den
    let a = f.num.c1 * g.den.c1 - g.num.c1 * f.den.c1;
    let b = f.num.c1 * g.den.c0 + f.num.c0 * g.den.c1 - g.num.c1 * f.den.c0 - g.num.c0 * f.den.c1;
    let c = f.num.c0 * g.den.c0 - g.num.c0 * f.den.c0;
    let scale = f.num.size() * g.den.size() + g.num.size() * f.den.size();
    let tiny = 1e-13 * scale;
    if a.norm() <= tiny && b.norm() <= tiny && c.norm() <= tiny {
        return Err(FiberError::DegenerateElimination(t1));
    }
    let roots = solve_quadratic(a, b, c).map_err(|_| FiberError::DegenerateElimination(t1))?;

    let mut pairs: Vec<(Scalar, Scalar)> = vec![];
    let mut diagnostics = vec![];
    for (k, &t2) in roots.roots.iter().enumerate() {
        if roots.double_root && k > 0 {
            break;
        }
        let t3 = if f.conditioning(t2) >= g.conditioning(t2) {
            f.at(t2)
        } else {
            g.at(t2)
        };
        let residual = relative_equation_residuals(l1, mu, [t1, t2, t3]);
        let outcome = if !(is_finite(t2) && is_finite(t3)) || residual > RESIDUAL_REL_TOL {
            RootOutcome::Spurious { residual }
        } else {
            match ModuliPoint::validate(t1, t2, t3, cfg) {
                Ok(_) => RootOutcome::Accepted,
                Err(e) => RootOutcome::Inadmissible {
                    reason: e.code().to_string(),
                },
            }
        };
        if outcome == RootOutcome::Accepted && !pairs.iter().any(|&(x, y)| x == t2 && y == t3) {
            pairs.push((t2, t3));
        }
        diagnostics.push(RootDiagnostic {
            t2: as_pair(t2),
            t3: as_pair(t3),
            outcome,
        });
    }
    if pairs.is_empty() {
        return Err(FiberError::NoAdmissibleSolution(t1));
    }
    Ok(FiberSolution { pairs, diagnostics })
}

/// Per-point residuals and Jacobian rank.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointDiagnostics {
    pub residual_q1: f64,
    pub residual_q2: f64,
    pub rank: u8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiberSample {
    /// Ordered triples `(t1, t2, t3)` solving the system, i.e. the affine
    /// points `[t1:t2:t3:1]` of `Q1 ∩ Q2`.
    pub ordered: Vec<[Scalar; 3]>,
    pub points: Vec<ModuliPoint>,
    pub lambda: FiberInvariant,
    pub quadrics: QuadricPair,
    pub diagnostics: Vec<PointDiagnostics>,
    /// Number of `t1` draws consumed.
    pub draws: usize,
}

#[derive(Serialize)]
struct FiberSampleWire {
    lambda_canonical: [[f64; 2]; 2],
    lambda: [[f64; 2]; 2],
    points: Vec<[[f64; 2]; 3]>,
    residual_max: f64,
    ranks: Vec<u8>,
    draws: usize,
}

impl FiberSample {
    pub fn residual_max(&self) -> f64 {
        self.diagnostics
            .iter()
            .map(|d| d.residual_q1.max(d.residual_q2))
            .fold(0.0, f64::max)
    }

    /// `{"lambda_canonical": .., "points": [..], "residual_max": r, "ranks": [..]}`
    /// plus the requested λ-pair and the draw count.
    pub fn to_json(&self) -> serde_json::Value {
        let pair = |p: LambdaPair| [as_pair(p.0), as_pair(p.1)];
        serde_json::to_value(FiberSampleWire {
            lambda_canonical: pair(self.lambda.canonical),
            lambda: pair((self.lambda.lambda1, self.lambda.lambda2)),
            points: self.ordered.iter().map(|t| t.map(as_pair)).collect(),
            residual_max: self.residual_max(),
            ranks: self.diagnostics.iter().map(|d| d.rank).collect(),
            draws: self.draws,
        })
        .expect("plain data serializes")
    }

    /// One row per point: coordinates, residuals, rank.
    pub fn csv_rows(&self) -> Vec<[String; 9]> {
        self.ordered
            .iter()
            .zip(&self.diagnostics)
            .map(|(t, d)| {
                [
                    t[0].re.to_string(),
                    t[0].im.to_string(),
                    t[1].re.to_string(),
                    t[1].im.to_string(),
                    t[2].re.to_string(),
                    t[2].im.to_string(),
                    d.residual_q1.to_string(),
                    d.residual_q2.to_string(),
                    d.rank.to_string(),
                ]
            })
            .collect()
    }

    pub const CSV_HEADER: [&'static str; 9] = [
        "t1_re", "t1_im", "t2_re", "t2_im", "t3_re", "t3_im", "residual_q1", "residual_q2", "rank",
    ];
}

/// `t1` uniform (by area) on the annulus `T1_RADII`.
fn draw_t1(rng: &mut ChaCha8Rng) -> Scalar {
    let (r0, r1) = T1_RADII;
    let r = rng.gen_range(r0 * r0..r1 * r1).sqrt();
    let theta = rng.gen_range(0.0..TAU);
    Scalar::from_polar(r, theta)
}

/// Draws up to `DRAWS_PER_POINT * n` values of `t1` and collects at most
/// `n` admissible points, in draw order.
fn collect_points(
    l1: Scalar,
    l2: Scalar,
    n: usize,
    seed: u64,
    budget: usize,
    cfg: &ToleranceConfig,
) -> Result<FiberSample, FiberError> {
    let lambda = canonical_invariant(l1, l2, cfg)?;
    let quadrics = QuadricPair::new(l1, l2, cfg)?;
    // keep draws away from the excluded loci by a margin above the tolerance
    let guard = ToleranceConfig {
        abs_tol: 10.0 * cfg.abs_tol,
        rel_tol: cfg.rel_tol,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sample = FiberSample {
        ordered: vec![],
        points: vec![],
        lambda,
        quadrics,
        diagnostics: vec![],
        draws: 0,
    };
    while sample.points.len() < n && sample.draws < budget {
        let t1 = draw_t1(&mut rng);
        sample.draws += 1;
        let Ok(sol) = solve_fiber(l1, l2, t1, &guard) else { continue };
        for (t2, t3) in sol.pairs {
            if sample.points.len() == n {
                break;
            }
            let Ok(p) = ModuliPoint::validate(t1, t2, t3, &guard) else { continue };
            if p.separation() < MIN_SEPARATION {
                continue;
            }
            let proj = ProjectivePoint3::affine([t1, t2, t3]);
            let (r1, r2) = relative_residuals(&quadrics, &proj);
            sample.diagnostics.push(PointDiagnostics {
                residual_q1: r1,
                residual_q2: r2,
                rank: jacobian_rank(&quadrics, &proj, cfg),
            });
            sample.ordered.push([t1, t2, t3]);
            sample.points.push(p);
        }
    }
    Ok(sample)
}

/// Seeded sample of `n` points of the fiber over `(l1, l2)`.
pub fn sample_fiber(
    l1: Scalar,
    l2: Scalar,
    n: usize,
    seed: u64,
    cfg: &ToleranceConfig,
) -> Result<FiberSample, FiberError> {
    sample_with_budget(l1, l2, n, seed, DRAWS_PER_POINT * n, cfg)
}

fn sample_with_budget(
    l1: Scalar,
    l2: Scalar,
    n: usize,
    seed: u64,
    budget: usize,
    cfg: &ToleranceConfig,
) -> Result<FiberSample, FiberError> {
    let sample = collect_points(l1, l2, n, seed, budget, cfg)?;
    if sample.points.len() < n {
        return Err(FiberError::InsufficientYield {
            found: sample.points.len(),
            requested: n,
            draws: sample.draws,
        });
    }
    Ok(sample)
}

fn omega() -> Scalar {
    Scalar::from_polar(1.0, std::f64::consts::FRAC_PI_3)
}

/// Representatives of the two exceptional fibers.
pub fn exceptional_pairs() -> [LambdaPair; 2] {
    [
        (Scalar::new(-1.0, 0.0), Scalar::new(0.5, 0.0)),
        (omega(), omega().conj()),
    ]
}

/// Whether `(l1, l2)` lies in the orbit of `(-1, 1/2)` or `(ω, ω̄)`.
pub fn is_exceptional(l1: Scalar, l2: Scalar, cfg: &ToleranceConfig) -> bool {
    let Ok(inv) = canonical_invariant(l1, l2, cfg) else { return false };
    exceptional_pairs()
        .iter()
        .any(|pair| inv.contains(pair, cfg))
}

/// Values fixed by some nontrivial cross-ratio substitution.
pub fn special_lambdas() -> [Scalar; 5] {
    [
        Scalar::new(-1.0, 0.0),
        Scalar::new(0.5, 0.0),
        Scalar::new(2.0, 0.0),
        omega(),
        omega().conj(),
    ]
}

/// A non-exceptional pair with at least one coordinate among the special
/// values; for such pairs smoothness of the fiber is not guaranteed, and they
/// are not classified further.
pub fn excluded_by_hypothesis(l1: Scalar, l2: Scalar, cfg: &ToleranceConfig) -> bool {
    !is_exceptional(l1, l2, cfg)
        && special_lambdas()
            .iter()
            .any(|&s| approx_eq(l1, s, cfg) || approx_eq(l2, s, cfg))
}

/// The five nontrivial reorderings of a triple (positions read from the
/// original triple).
pub const NONTRIVIAL_PERMUTATIONS: [[usize; 3]; 5] =
    [[0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

#[derive(Debug, Clone, PartialEq)]
pub struct GluedPoint {
    pub point: ModuliPoint,
    pub ordered: [Scalar; 3],
    /// `σ` such that `[t_σ(1) : t_σ(2) : t_σ(3) : 1]` also lies on `Q1 ∩ Q2`
    /// (0-based positions).
    pub permutation: [usize; 3],
}

/// Sampled fiber points that also solve the system after a nontrivial
/// reordering.
pub fn glued_points(
    l1: Scalar,
    l2: Scalar,
    n: usize,
    seed: u64,
    cfg: &ToleranceConfig,
) -> Result<Vec<GluedPoint>, FiberError> {
    let sample = collect_points(l1, l2, n, seed, DRAWS_PER_POINT * n, cfg)?;
    let qp = sample.quadrics;
    let mut out = vec![];
    for (t, p) in sample.ordered.iter().zip(&sample.points) {
        let witness = NONTRIVIAL_PERMUTATIONS
            .iter()
            .find(|s| on_intersection(&qp, &ProjectivePoint3::affine(s.map(|i| t[i]))));
        if let Some(&permutation) = witness {
            out.push(GluedPoint {
                point: *p,
                ordered: *t,
                permutation,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prym::lambda_pair;

    fn c(re: f64, im: f64) -> Scalar {
        Scalar::new(re, im)
    }

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn sample_lambdas() -> (Scalar, Scalar) {
        (c(4.0 / 3.0, 0.0), c(32.0 / 25.0, 0.0))
    }

    #[test]
    fn projective_normalization() {
        let p = ProjectivePoint3::new([c(2.0, 0.0), c(4.0, 0.0), c(6.0, 0.0), c(2.0, 0.0)]).unwrap();
        assert_eq!(p.coords(), [c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(1.0, 0.0)]);
        let p = ProjectivePoint3::new([c(2.0, 0.0), c(4.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(p.coords()[1], c(1.0, 0.0));
        assert_eq!(ProjectivePoint3::new([c(0.0, 0.0); 4]), Err(FiberError::ZeroPoint));
    }

    #[test]
    fn eval_examples() {
        let (l1, l2) = sample_lambdas();
        let qp = QuadricPair::new(l1, l2, &cfg()).unwrap();
        let (q1, q2) = eval_quadrics(&qp, &ProjectivePoint3::affine([c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)]));
        assert!(q1.norm() < 1e-12 && q2.norm() < 1e-12);

        let (q1, q2) = eval_quadrics(&qp, &ProjectivePoint3::affine([c(1.0, 0.0); 3]));
        assert_eq!(q1, c(0.0, 0.0));
        let expected = c(4.0, 0.0) - qp.lambda2_prime * 4.0;
        assert!(approx_eq(q2, expected, &cfg()));
        assert!(q2.norm() > 1e-3);

        let (q1, q2) = eval_quadrics(&qp, &ProjectivePoint3::raw([c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]));
        // q1 = (0-1)(0-0) - λ1 (0)(0-1) = 0, q2 = (0+1)(0+0) - λ2'(0)(0+1) = 0
        assert_eq!(q1.norm(), 0.0);
        assert_eq!(q2.norm(), 0.0);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let qp = QuadricPair::unchecked(c(0.7, 0.4), c(-1.3, 2.0));
        let base = [c(0.3, -1.1), c(1.7, 0.2), c(-0.8, 0.9), c(1.0, 0.5)];
        let m = qp.jacobian(&ProjectivePoint3::raw(base));
        let h = 1e-6;
        for k in 0..4 {
            let mut plus = base;
            let mut minus = base;
            plus[k] += h;
            minus[k] -= h;
            let (a1, a2) = eval_quadrics(&qp, &ProjectivePoint3::raw(plus));
            let (b1, b2) = eval_quadrics(&qp, &ProjectivePoint3::raw(minus));
            let d1 = (a1 - b1) / (2.0 * h);
            let d2 = (a2 - b2) / (2.0 * h);
            assert!((d1 - m[0][k]).norm() < 1e-7, "row 0 col {k}");
            assert!((d2 - m[1][k]).norm() < 1e-7, "row 1 col {k}");
        }
    }

    #[test]
    fn rank_examples() {
        let (l1, l2) = sample_lambdas();
        let qp = QuadricPair::new(l1, l2, &cfg()).unwrap();
        let on = ProjectivePoint3::affine([c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)]);
        assert_eq!(jacobian_rank(&qp, &on, &cfg()), 2);

        // λ2' = 1: rows become proportional at [1:1:-1:-1] and [1:-1:1:-1]
        let degenerate = QuadricPair::unchecked(c(1.7, 0.0), c(1.7, 0.0));
        for coords in [[1.0, 1.0, -1.0, -1.0], [1.0, -1.0, 1.0, -1.0]] {
            let p = ProjectivePoint3::new(coords.map(|x| c(x, 0.0))).unwrap();
            assert!(jacobian_rank(&degenerate, &p, &cfg()) <= 1);
        }

        let off = ProjectivePoint3::affine([c(0.3, 0.2), c(-1.5, 0.1), c(2.2, -0.7)]);
        assert!(!on_intersection(&qp, &off));
        assert_eq!(jacobian_rank(&qp, &off, &cfg()), 2);

        let zero = ProjectivePoint3::raw([c(0.0, 0.0); 4]);
        assert_eq!(jacobian_rank(&qp, &zero, &cfg()), 0);
    }

    #[test]
    fn solve_recovers_known_point() {
        let (l1, l2) = sample_lambdas();
        let sol = solve_fiber(l1, l2, c(2.0, 0.0), &cfg()).unwrap();
        assert!(sol
            .pairs
            .iter()
            .any(|&(t2, t3)| approx_eq(t2, c(3.0, 0.0), &cfg()) && approx_eq(t3, c(4.0, 0.0), &cfg())));
        assert_eq!(sol.diagnostics.len(), 2);
    }

    #[test]
    fn solve_rejects_excluded_inputs() {
        let (l1, l2) = sample_lambdas();
        assert_eq!(solve_fiber(l1, l2, c(0.0, 0.0), &cfg()), Err(FiberError::ExcludedT1(c(0.0, 0.0))));
        assert!(matches!(solve_fiber(l1, l2, c(1.0, 0.0), &cfg()), Err(FiberError::ExcludedT1(_))));
        assert!(matches!(
            solve_fiber(c(0.5, 0.0), c(0.5, 0.0), c(2.0, 0.0), &cfg()),
            Err(FiberError::Lambda(PrymError::EqualLambdas(_)))
        ));
    }

    #[test]
    fn solutions_lie_on_quadrics_and_fiber() {
        let (l1, l2) = sample_lambdas();
        let qp = QuadricPair::new(l1, l2, &cfg()).unwrap();
        let target = canonical_invariant(l1, l2, &cfg()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut found = 0;
        for _ in 0..100 {
            let t1 = draw_t1(&mut rng);
            let Ok(sol) = solve_fiber(l1, l2, t1, &cfg()) else { continue };
            for (t2, t3) in sol.pairs {
                let t = [t1, t2, t3];
                assert!(on_intersection(&qp, &ProjectivePoint3::affine(t)));
                let (a, b) = lambda_pair(t).unwrap();
                let inv = canonical_invariant(a, b, &cfg()).unwrap();
                assert!(inv.same_orbit(&target, &ToleranceConfig::new(1e-9, 1e-7).unwrap()));
                found += 1;
            }
        }
        assert!(found > 100);
    }

    #[test]
    fn sample_is_deterministic_and_on_fiber() {
        let (l1, l2) = sample_lambdas();
        let s = sample_fiber(l1, l2, 50, 7, &cfg()).unwrap();
        assert_eq!(s.points.len(), 50);
        assert!(s.residual_max() < RESIDUAL_REL_TOL);
        assert!(s.diagnostics.iter().all(|d| d.rank == 2));
        let again = sample_fiber(l1, l2, 50, 7, &cfg()).unwrap();
        assert_eq!(
            serde_json::to_string(&s.to_json()).unwrap(),
            serde_json::to_string(&again.to_json()).unwrap()
        );
        let other = sample_fiber(l1, l2, 50, 8, &cfg()).unwrap();
        assert_ne!(s.ordered, other.ordered);
    }

    #[test]
    fn insufficient_yield_is_reported() {
        let (l1, l2) = sample_lambdas();
        let s = sample_fiber(l1, l2, 0, 1, &cfg()).unwrap();
        assert!(s.points.is_empty());
        // each draw yields at most two points
        assert!(matches!(
            sample_with_budget(l1, l2, 5, 1, 2, &cfg()),
            Err(FiberError::InsufficientYield { requested: 5, draws: 2, .. })
        ));
    }

    #[test]
    fn exceptional_examples() {
        assert!(is_exceptional(c(-1.0, 0.0), c(0.5, 0.0), &cfg()));
        assert!(is_exceptional(c(2.0, 0.0), c(-1.0, 0.0), &cfg()));
        assert!(is_exceptional(omega(), omega().conj(), &cfg()));
        assert!(is_exceptional(omega().conj(), omega(), &cfg()));
        let (l1, l2) = sample_lambdas();
        assert!(!is_exceptional(l1, l2, &cfg()));
        assert!(!is_exceptional(c(-1.0, 0.0), c(3.0, 0.0), &cfg()));
        assert!(excluded_by_hypothesis(c(-1.0, 0.0), c(3.0, 0.0), &cfg()));
        assert!(!excluded_by_hypothesis(l1, l2, &cfg()));
        assert!(!excluded_by_hypothesis(c(-1.0, 0.0), c(0.5, 0.0), &cfg()));
    }

    #[test]
    fn harmonic_fiber_samples_are_not_glued() {
        // No nontrivial substitution fixes both -1 and 1/2, so reordering a
        // triple always moves its λ-pair off (-1, 1/2).
        let g = glued_points(c(-1.0, 0.0), c(0.5, 0.0), 500, 1, &cfg()).unwrap();
        assert!(g.is_empty());
    }

    #[test]
    fn generic_fiber_has_no_glued_points() {
        let (l1, l2) = sample_lambdas();
        assert!(glued_points(l1, l2, 300, 3, &cfg()).unwrap().is_empty());
    }

    #[test]
    fn equianharmonic_fiber_is_glued_by_three_cycles() {
        let glued = glued_points(omega(), omega().conj(), 50, 3, &cfg()).unwrap();
        assert!(!glued.is_empty());
        for g in &glued {
            assert_ne!(g.permutation, [0, 1, 2]);
            assert!(g.permutation == [1, 2, 0] || g.permutation == [2, 0, 1]);
        }
    }
}
