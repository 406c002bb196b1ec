//! Branch-locus models of the curves in the cover tower and the
//! cross-ratio / j-invariant machinery used to compare them.
//!
//! Every curve is represented only by its branch points on P^1. An elliptic
//! curve `y^2 = (x-a)(x-b)(x-c)(x-d)` with its ordered branch points is a
//! curve with marked two-torsion; two such curves are isomorphic compatibly
//! with the marking exactly when the ordered cross-ratios agree.

use serde::Serialize;
use thiserror::Error;

use crate::moduli::{ModuliPoint, SignVector};
use crate::numerics::{approx_eq, is_finite, Scalar, ToleranceConfig};
use crate::projective::{has_collision, LinePoint};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CurveError {
    #[error("branch points are not pairwise distinct")]
    DegenerateQuadruple,
    #[error("lambda = {0} is excluded (0, 1 or non-finite)")]
    ExcludedLambda(Scalar),
}

/// Four ordered, pairwise distinct points of P^1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct BranchQuartic {
    points: [LinePoint; 4],
}

impl BranchQuartic {
    pub fn new(points: [LinePoint; 4], cfg: &ToleranceConfig) -> Result<Self, CurveError> {
        if has_collision(&points, cfg) {
            return Err(CurveError::DegenerateQuadruple);
        }
        Ok(Self { points })
    }

    pub fn from_finite(points: [Scalar; 4], cfg: &ToleranceConfig) -> Result<Self, CurveError> {
        Self::new(points.map(LinePoint::Finite), cfg)
    }

    pub fn points(&self) -> [LinePoint; 4] {
        self.points
    }

    /// Cross-ratio of the points in their stored order.
    pub fn cross_ratio(&self) -> Scalar {
        let [a, b, c, d] = self.points;
        raw_cross_ratio(a, b, c, d)
    }

    pub fn j_invariant(&self) -> Result<Scalar, CurveError> {
        j_from_lambda(self.cross_ratio())
    }

    pub fn negated(&self) -> Self {
        Self {
            points: self.points.map(|p| p.neg()),
        }
    }
}

fn det(p: LinePoint, q: LinePoint) -> Scalar {
    let [x1, y1] = p.homogeneous();
    let [x2, y2] = q.homogeneous();
    x1 * y2 - x2 * y1
}

fn raw_cross_ratio(a: LinePoint, b: LinePoint, c: LinePoint, d: LinePoint) -> Scalar {
    det(c, a) * det(d, b) / (det(c, b) * det(d, a))
}

/// `cr(a,b,c,d) = (c-a)(d-b) / ((c-b)(d-a))`, evaluated on homogeneous
/// coordinates so that a point at infinity is handled without limits.
///
/// With this convention `cr(1, t1, t2, t3) = (t2-1)(t3-t1) / ((t2-t1)(t3-1))`.
pub fn cross_ratio(
    a: LinePoint,
    b: LinePoint,
    c: LinePoint,
    d: LinePoint,
    cfg: &ToleranceConfig,
) -> Result<Scalar, CurveError> {
    Ok(BranchQuartic::new([a, b, c, d], cfg)?.cross_ratio())
}

/// `j = 256 (λ² - λ + 1)³ / (λ² (λ - 1)²)`.
pub fn j_from_lambda(lambda: Scalar) -> Result<Scalar, CurveError> {
    let cfg = ToleranceConfig::default();
    let one = Scalar::new(1.0, 0.0);
    if !is_finite(lambda) || approx_eq(lambda, Scalar::new(0.0, 0.0), &cfg) || approx_eq(lambda, one, &cfg) {
        return Err(CurveError::ExcludedLambda(lambda));
    }
    let num = lambda * lambda - lambda + one;
    let den = lambda * lambda * (lambda - one) * (lambda - one);
    Ok(num * num * num * 256.0 / den)
}

pub fn j_invariant(q: &BranchQuartic) -> Result<Scalar, CurveError> {
    q.j_invariant()
}

/// Whether an isomorphism carries the marked points of `a` to those of `b`
/// in order.
pub fn marked_iso_exists(a: &BranchQuartic, b: &BranchQuartic, cfg: &ToleranceConfig) -> bool {
    approx_eq(a.cross_ratio(), b.cross_ratio(), cfg)
}

/// Branch loci of the five curves of the tower for a cover.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveSystem {
    /// Genus-3 curve `C_{σ²}`: roots `±1, ±t1, ±t2, ±t3`.
    #[serde(rename = "C_sigma2")]
    pub c_sigma2: Vec<LinePoint>,
    /// Genus-2 base curve `H`: `0, 1, t1², t2², t3², ∞`.
    #[serde(rename = "H")]
    pub h: Vec<LinePoint>,
    #[serde(rename = "E_sigma2_jsigma")]
    pub e_s2_js: BranchQuartic,
    #[serde(rename = "E_j")]
    pub e_j: BranchQuartic,
    #[serde(rename = "E_jsigma2")]
    pub e_js2: BranchQuartic,
}

pub fn curve_system(p: &ModuliPoint, s: SignVector) -> CurveSystem {
    // Validated points keep all these lists pairwise distinct, so the
    // quartics are built without re-checking.
    let t = p.t();
    let one = Scalar::new(1.0, 0.0);
    let signed = s.apply(t);
    let sq = t.map(|x| x * x);

    let mut c_sigma2 = vec![LinePoint::Finite(one), LinePoint::Finite(-one)];
    for x in t {
        c_sigma2.push(LinePoint::Finite(x));
        c_sigma2.push(LinePoint::Finite(-x));
    }
    let mut h = vec![LinePoint::real(0.0), LinePoint::Finite(one)];
    h.extend(sq.iter().map(|&x| LinePoint::Finite(x)));
    h.push(LinePoint::Infinity);

    let quartic = |r: [Scalar; 3], lead: Scalar| BranchQuartic {
        points: [lead, r[0], r[1], r[2]].map(LinePoint::Finite),
    };
    let e_j = quartic(signed, one);
    CurveSystem {
        c_sigma2,
        h,
        e_s2_js: quartic(sq, one),
        e_js2: e_j.negated(),
        e_j,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Scalar {
        Scalar::new(re, im)
    }

    fn r(x: f64) -> LinePoint {
        LinePoint::real(x)
    }

    fn close(a: Scalar, b: Scalar) -> bool {
        approx_eq(a, b, &ToleranceConfig::default())
    }

    fn permutations4() -> Vec<[usize; 4]> {
        let mut out = vec![];
        for a in 0..4 {
            for b in 0..4 {
                for cc in 0..4 {
                    for d in 0..4 {
                        let p = [a, b, cc, d];
                        let mut seen = [false; 4];
                        p.iter().for_each(|&i| seen[i] = true);
                        if seen.iter().all(|&x| x) {
                            out.push(p);
                        }
                    }
                }
            }
        }
        out
    }

    #[test]
    fn cross_ratio_convention() {
        let cfg = ToleranceConfig::default();
        let v = cross_ratio(r(1.0), r(2.0), r(3.0), r(4.0), &cfg).unwrap();
        assert!(close(v, c(4.0 / 3.0, 0.0)));

        let (t1, t2, t3) = (c(0.3, 1.2), c(-2.0, 0.5), c(4.0, -1.0));
        let one = c(1.0, 0.0);
        let expected = (t2 - one) * (t3 - t1) / ((t2 - t1) * (t3 - one));
        let got = cross_ratio(r(1.0), t1.into(), t2.into(), t3.into(), &cfg).unwrap();
        assert!(close(got, expected));

        assert_eq!(
            cross_ratio(r(1.0), r(1.0), r(3.0), r(4.0), &cfg),
            Err(CurveError::DegenerateQuadruple)
        );
    }

    #[test]
    fn cross_ratio_orbit_over_all_orderings() {
        let pts = [r(1.0), r(2.0), r(3.0), r(4.0)];
        let mut values: Vec<Scalar> = vec![];
        for p in permutations4() {
            let q = BranchQuartic::new(p.map(|i| pts[i]), &ToleranceConfig::default()).unwrap();
            let v = q.cross_ratio();
            if !values.iter().any(|&w| close(v, w)) {
                values.push(v);
            }
        }
        let expected = [4.0 / 3.0, 3.0 / 4.0, -1.0 / 3.0, -3.0, 4.0, 0.25];
        assert_eq!(values.len(), 6);
        for e in expected {
            assert!(values.iter().any(|&v| close(v, c(e, 0.0))), "missing {e}");
        }
        // swapping the last two arguments inverts the cross-ratio
        let sw = BranchQuartic::new([r(1.0), r(2.0), r(4.0), r(3.0)], &ToleranceConfig::default()).unwrap();
        assert!(close(sw.cross_ratio(), c(0.75, 0.0)));
    }

    #[test]
    fn cross_ratio_with_infinity() {
        let cfg = ToleranceConfig::default();
        let v = cross_ratio(r(0.0), r(1.0), r(-1.0), LinePoint::Infinity, &cfg).unwrap();
        assert!(close(v, c(0.5, 0.0)));
    }

    #[test]
    fn j_examples() {
        assert!(close(j_from_lambda(c(-1.0, 0.0)).unwrap(), c(1728.0, 0.0)));
        let w = Scalar::from_polar(1.0, std::f64::consts::FRAC_PI_3);
        assert!(j_from_lambda(w).unwrap().norm() < 1e-9);
        assert!(close(j_from_lambda(c(4.0 / 3.0, 0.0)).unwrap(), c(35152.0 / 9.0, 0.0)));
        assert_eq!(j_from_lambda(c(0.0, 0.0)), Err(CurveError::ExcludedLambda(c(0.0, 0.0))));
        assert!(j_from_lambda(c(1.0, 0.0)).is_err());
    }

    #[test]
    fn j_invariant_examples() {
        let cfg = ToleranceConfig::default();
        let a = BranchQuartic::new([r(1.0), r(2.0), r(3.0), r(4.0)], &cfg).unwrap();
        let b = BranchQuartic::new([r(-1.0), r(-2.0), r(-3.0), r(-4.0)], &cfg).unwrap();
        let ja = j_invariant(&a).unwrap();
        assert!(close(ja, j_from_lambda(c(4.0 / 3.0, 0.0)).unwrap()));
        assert!(close(ja, j_invariant(&b).unwrap()));
        let h = BranchQuartic::new([r(0.0), r(1.0), r(-1.0), LinePoint::Infinity], &cfg).unwrap();
        assert!(close(j_invariant(&h).unwrap(), c(1728.0, 0.0)));
    }

    #[test]
    fn marked_iso_examples() {
        let cfg = ToleranceConfig::default();
        let a = BranchQuartic::new([r(1.0), r(2.0), r(3.0), r(4.0)], &cfg).unwrap();
        let img = BranchQuartic::new([r(3.0), r(5.0), r(7.0), r(9.0)], &cfg).unwrap();
        let swapped = BranchQuartic::new([r(1.0), r(2.0), r(4.0), r(3.0)], &cfg).unwrap();
        assert!(marked_iso_exists(&a, &img, &cfg));
        assert!(!marked_iso_exists(&a, &swapped, &cfg));
        assert!(marked_iso_exists(&a, &a, &cfg));
        // isomorphic as curves, but not compatibly with the marking
        assert!(close(a.j_invariant().unwrap(), swapped.j_invariant().unwrap()));
    }

    #[test]
    fn curve_system_examples() {
        let p = ModuliPoint::from_real(2.0, 3.0, 4.0).unwrap();
        let cs = curve_system(&p, SignVector::PLUS);
        assert_eq!(cs.e_j.points(), [r(1.0), r(2.0), r(3.0), r(4.0)]);
        assert_eq!(
            cs.h,
            vec![r(0.0), r(1.0), r(4.0), r(9.0), r(16.0), LinePoint::Infinity]
        );
        assert_eq!(
            cs.c_sigma2,
            [1.0, -1.0, 2.0, -2.0, 3.0, -3.0, 4.0, -4.0].map(r).to_vec()
        );
        assert_eq!(cs.e_s2_js.points(), [r(1.0), r(4.0), r(9.0), r(16.0)]);

        let cs = curve_system(&p, SignVector::MINUS);
        assert_eq!(cs.e_j.points(), [r(1.0), r(-2.0), r(-3.0), r(-4.0)]);
        assert_eq!(cs.e_js2.points(), [r(-1.0), r(2.0), r(3.0), r(4.0)]);
    }

    #[test]
    fn curve_system_json_shape() {
        let p = ModuliPoint::from_real(2.0, 3.0, 4.0).unwrap();
        let v = serde_json::to_value(curve_system(&p, SignVector::PLUS)).unwrap();
        assert_eq!(v["H"][5], "inf");
        assert_eq!(v["E_j"][1], serde_json::json!([2.0, 0.0]));
        assert_eq!(v.as_object().unwrap().len(), 5);
    }

    fn random_point(rng: &mut ChaCha8Rng) -> ModuliPoint {
        loop {
            let mut t = [c(0.0, 0.0); 3];
            for x in t.iter_mut() {
                *x = c(rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0));
            }
            if let Ok(p) = ModuliPoint::validate(t[0], t[1], t[2], &ToleranceConfig::default()) {
                if p.separation() > 1e-3 {
                    return p;
                }
            }
        }
    }

    #[test]
    fn j_invariant_independent_of_ordering() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let cfg = ToleranceConfig::default();
        let perms = permutations4();
        let mut done = 0;
        while done < 1000 {
            let pts: [LinePoint; 4] = std::array::from_fn(|_| {
                LinePoint::Finite(c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)))
            });
            let Ok(q) = BranchQuartic::new(pts, &cfg) else { continue };
            let lam = q.cross_ratio();
            // stay away from the j = ∞ locus where relative comparison is meaningless
            if lam.norm() < 1e-2 || (lam - 1.0).norm() < 1e-2 || lam.norm() > 1e2 {
                continue;
            }
            let j0 = q.j_invariant().unwrap();
            for p in &perms {
                let qq = BranchQuartic::new(p.map(|i| pts[i]), &cfg).unwrap();
                let j = qq.j_invariant().unwrap();
                assert!(approx_eq(j, j0, &ToleranceConfig::new(1e-10, 1e-7).unwrap()), "{j} vs {j0}");
            }
            done += 1;
        }
    }

    #[test]
    fn tower_consistency_on_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let cfg = ToleranceConfig::default();
        for _ in 0..100 {
            let p = random_point(&mut rng);
            for s in SignVector::all() {
                let cs = curve_system(&p, s);
                // E_j ≅ E_{jσ²}
                let a = cs.e_j.j_invariant().unwrap();
                let b = cs.e_js2.j_invariant().unwrap();
                assert!(approx_eq(a, b, &ToleranceConfig::new(1e-10, 1e-8).unwrap()));
                for (x, y) in cs.e_j.points().iter().zip(cs.e_js2.points()) {
                    assert_eq!(x.neg(), y);
                }
                // H's finite nonzero roots are squares of the positive roots of C_{σ²}
                for k in 0..4 {
                    let root = cs.c_sigma2[2 * k].finite().unwrap();
                    assert!(cs.h[1 + k].approx_eq(&LinePoint::Finite(root * root), &cfg));
                }
                assert_eq!(cs.h[0], LinePoint::real(0.0));
                assert!(cs.h[5].is_infinite());
                assert!(!has_collision(&cs.c_sigma2, &cfg));
                assert!(!has_collision(&cs.h, &cfg));
                for q in [cs.e_j, cs.e_js2, cs.e_s2_js] {
                    let lam = q.cross_ratio();
                    assert!(!approx_eq(lam, c(0.0, 0.0), &cfg) && !approx_eq(lam, c(1.0, 0.0), &cfg));
                }
            }
        }
    }
}
