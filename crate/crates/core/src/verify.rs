//! Seeded verification suites: the exact lattice and group-algebra
//! scenarios plus statistical checks of the fiber invariant and the fiber
//! enumeration. Output is a deterministic function of (suite, seed, samples).

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::curves::j_invariant;
use crate::fibers::{
    exceptional_pairs, excluded_by_hypothesis, glued_points, is_exceptional, sample_fiber, MIN_SEPARATION,
    T1_RADII,
};
use crate::groupalg::verify_decomposition;
use crate::lattice::scenario_prym;
use crate::moduli::{cover_from_point, q_set, ModuliPoint, SignVector, TwoTorsionClass};
use crate::numerics::{approx_eq, Scalar, ToleranceConfig};
use crate::prym::{lambda_pair, prym_descriptor, s3_orbit, same_fiber, LambdaPair};
use crate::report::{Assertion, Report};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Lattice,
    Group,
    Prym,
    Fibers,
    All,
}

impl Suite {
    pub fn parse(name: &str) -> Option<Suite> {
        match name {
            "lattice" => Some(Suite::Lattice),
            "group" => Some(Suite::Group),
            "prym" => Some(Suite::Prym),
            "fibers" => Some(Suite::Fibers),
            "all" => Some(Suite::All),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Suite::Lattice => "lattice",
            Suite::Group => "group",
            Suite::Prym => "prym",
            Suite::Fibers => "fibers",
            Suite::All => "all",
        }
    }

    fn members(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![Suite::Lattice, Suite::Group, Suite::Prym, Suite::Fibers],
            s => vec![s],
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub pass: bool,
    pub entries: Report,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyOutput {
    pub suite: &'static str,
    pub seed: u64,
    pub samples: usize,
    pub pass: bool,
    pub reports: Vec<SuiteReport>,
}

/// Runs the requested suite(s). Each member suite gets its own stream
/// derived from `seed`, so a suite's result does not depend on which other
/// suites run with it.
pub fn run(suite: Suite, seed: u64, samples: usize, cfg: &ToleranceConfig) -> VerifyOutput {
    let reports: Vec<SuiteReport> = suite
        .members()
        .into_iter()
        .map(|s| {
            let entries = match s {
                Suite::Lattice => scenario_prym(),
                Suite::Group => verify_decomposition(),
                Suite::Prym => prym_suite(seed, samples, cfg),
                Suite::Fibers => fibers_suite(seed, samples, cfg),
                Suite::All => unreachable!("expanded above"),
            };
            SuiteReport { suite: s.name(), pass: entries.all_pass(), entries }
        })
        .collect();
    VerifyOutput {
        suite: suite.name(),
        seed,
        samples,
        pass: reports.iter().all(|r| r.pass),
        reports,
    }
}

fn stream(seed: u64, tag: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tag);
    rng
}

/// Uniform-by-area draw from the annulus `T1_RADII`.
pub fn draw_annulus(rng: &mut impl Rng) -> Scalar {
    let (r0, r1) = T1_RADII;
    let r = rng.gen_range(r0 * r0..r1 * r1).sqrt();
    Scalar::from_polar(r, rng.gen_range(0.0..TAU))
}

/// Random admissible point: annulus draws, validated with a `10·abs_tol`
/// guard and rejected when its branch values are closer than
/// `MIN_SEPARATION` (relative).
pub fn random_moduli_point(rng: &mut impl Rng, cfg: &ToleranceConfig) -> ModuliPoint {
    let guard = ToleranceConfig { abs_tol: 10.0 * cfg.abs_tol, rel_tol: cfg.rel_tol };
    loop {
        let t = [draw_annulus(rng), draw_annulus(rng), draw_annulus(rng)];
        if let Ok(p) = ModuliPoint::validate(t[0], t[1], t[2], &guard) {
            if p.separation() >= MIN_SEPARATION {
                return p;
            }
        }
    }
}

/// λ-pair of a random admissible point, away from the exceptional orbits
/// and the hypothesis-excluded values.
pub fn random_generic_pair(rng: &mut impl Rng, cfg: &ToleranceConfig) -> LambdaPair {
    loop {
        let p = random_moduli_point(rng, cfg);
        let Ok((l1, l2)) = lambda_pair(p.t()) else { continue };
        if !is_exceptional(l1, l2, cfg) && !excluded_by_hypothesis(l1, l2, cfg) {
            return (l1, l2);
        }
    }
}

/// The eight members of the two exceptional orbits, written out:
/// `(−1,½)` has a full orbit of six, `(ω, ω̄)` with `ω = e^{iπ/3}` only two.
pub fn exceptional_orbit_members() -> [LambdaPair; 8] {
    let r = |x: f64| Scalar::new(x, 0.0);
    let w = Scalar::new(0.5, 3f64.sqrt() / 2.0);
    [
        (r(-1.0), r(0.5)),
        (r(-1.0), r(2.0)),
        (r(0.5), r(2.0)),
        (r(2.0), r(0.5)),
        (r(0.5), r(-1.0)),
        (r(2.0), r(-1.0)),
        (w, w.conj()),
        (w.conj(), w),
    ]
}

fn sci(x: f64) -> String {
    format!("{x:.3e}")
}

/// Statistical checks of the moduli combinatorics and the fiber invariant.
pub fn prym_suite(seed: u64, samples: usize, cfg: &ToleranceConfig) -> Report {
    let mut report = Report::default();
    let n = samples.max(1);
    let small = n.min(100);

    let mut rng = stream(seed, 1);
    let mut distinct = 0;
    let mut min_gap = f64::INFINITY;
    for _ in 0..n {
        let p = random_moduli_point(&mut rng, cfg);
        if let Ok((l1, l2)) = lambda_pair(p.t()) {
            let gap = (l1 - l2).norm();
            min_gap = min_gap.min(gap);
            if gap > 10.0 * cfg.abs_tol {
                distinct += 1;
            }
        }
    }
    report.push(Assertion::check(
        "lambda1 != lambda2 on random points (gap > 10*abs_tol)",
        format!("{n}/{n}"),
        format!("{distinct}/{n} (min gap {})", sci(min_gap)),
        distinct == n,
    ));

    let mut rng = stream(seed, 2);
    let mut consistent = 0;
    for _ in 0..small {
        let p = random_moduli_point(&mut rng, cfg);
        let Ok((l1, l2)) = lambda_pair(p.t()) else { continue };
        let Ok(orbit) = s3_orbit(l1, l2) else { continue };
        // every ordering's λ-pair lies in the orbit of the sorted ordering's pair
        let ok = p.orderings().iter().all(|t| {
            lambda_pair(*t).is_ok_and(|pair| {
                orbit.iter().any(|o| approx_eq(o.0, pair.0, cfg) && approx_eq(o.1, pair.1, cfg))
            })
        });
        if ok {
            consistent += 1;
        }
    }
    report.push(Assertion::check(
        "reordering a triple moves its lambda-pair within one S3 orbit",
        format!("{small}/{small}"),
        format!("{consistent}/{small}"),
        consistent == small,
    ));

    let all = TwoTorsionClass::all();
    let zero_count = all.iter().filter(|c| c.is_zero()).count();
    let order_two = all.iter().all(|c| c.add(c).is_zero());
    let mut from_pairs = vec![];
    for i in 1..=6 {
        for j in i + 1..=6 {
            if let Ok(c) = TwoTorsionClass::from_pair(i, j) {
                if !from_pairs.contains(&c) {
                    from_pairs.push(c);
                }
            }
        }
    }
    report.push(Assertion::check(
        "two-torsion: 16 classes of order <= 2, 15 nonzero ones from 2-subsets",
        "16 classes, 1 zero, all order <= 2, 15 from pairs",
        format!(
            "{} classes, {zero_count} zero, {}, {} from pairs",
            all.len(),
            if order_two { "all order <= 2" } else { "some order > 2" },
            from_pairs.len()
        ),
        all.len() == 16 && zero_count == 1 && order_two && from_pairs.len() == 15,
    ));

    let mut rng = stream(seed, 3);
    let mut q_ok = 0;
    let mut j_ok = 0;
    for _ in 0..small {
        let p = random_moduli_point(&mut rng, cfg);
        let signs = SignVector::all()[rng.gen_range(0..8)];
        if q_set(&cover_from_point(&p, signs)).len() == 8 {
            q_ok += 1;
        }
        let all_equal = SignVector::all().iter().all(|&s| {
            let sys = crate::curves::curve_system(&p, s);
            match (j_invariant(&sys.e_j), j_invariant(&sys.e_js2)) {
                (Ok(a), Ok(b)) => approx_eq(a, b, cfg),
                _ => false,
            }
        });
        if all_equal {
            j_ok += 1;
        }
    }
    report.push(Assertion::check(
        "|Q| = 8 for random cover data",
        format!("{small}/{small}"),
        format!("{q_ok}/{small}"),
        q_ok == small,
    ));
    report.push(Assertion::check(
        "j(E_j) = j(E_jsigma2) for all 8 sign choices",
        format!("{small}/{small}"),
        format!("{j_ok}/{small}"),
        j_ok == small,
    ));
    report
}

/// Statistical checks of fiber enumeration, smoothness and the two
/// exceptional fibers.
pub fn fibers_suite(seed: u64, samples: usize, cfg: &ToleranceConfig) -> Report {
    let mut report = Report::default();
    let n = samples.max(1);
    let bases = (n / 50).clamp(1, 100);
    let per_fiber = 20;
    let smooth_points = 50;
    let j_cfg = ToleranceConfig { abs_tol: cfg.abs_tol, rel_tol: 1e-8 };

    let mut rng = stream(seed, 4);
    let (mut good, mut total, mut worst) = (0usize, 0usize, 0.0f64);
    let mut failures = 0usize;
    for _ in 0..bases {
        let p = random_moduli_point(&mut rng, cfg);
        let (Ok((l1, l2)), Ok(desc)) = (lambda_pair(p.t()), prym_descriptor(&p, cfg)) else {
            failures += 1;
            continue;
        };
        match sample_fiber(l1, l2, per_fiber, rng.gen(), cfg) {
            Ok(sample) => {
                worst = worst.max(sample.residual_max());
                for (q, d) in sample.points.iter().zip(&sample.diagnostics) {
                    total += 1;
                    let desc_q = prym_descriptor(q, cfg);
                    let ok = same_fiber(&p, q, cfg)
                        && d.residual_q1 < 1e-7
                        && d.residual_q2 < 1e-7
                        && desc_q.is_ok_and(|dq| {
                            approx_eq(dq.j_e, desc.j_e, &j_cfg) && approx_eq(dq.j_f, desc.j_f, &j_cfg)
                        });
                    if ok {
                        good += 1;
                    }
                }
            }
            Err(_) => failures += 1,
        }
    }
    let expected = bases * per_fiber;
    report.push(Assertion::check(
        "fiber round trip: same fiber, residuals < 1e-7, equal jE and jF",
        format!("{expected}/{expected}"),
        format!("{good}/{total} (sampling failures {failures}, max residual {})", sci(worst)),
        good == expected && failures == 0,
    ));

    let mut rng = stream(seed, 5);
    let (mut rank2, mut points, mut failures) = (0usize, 0usize, 0usize);
    for _ in 0..bases {
        let (l1, l2) = random_generic_pair(&mut rng, cfg);
        match sample_fiber(l1, l2, smooth_points, rng.gen(), cfg) {
            Ok(sample) => {
                points += sample.diagnostics.len();
                rank2 += sample.diagnostics.iter().filter(|d| d.rank == 2).count();
            }
            Err(_) => failures += 1,
        }
    }
    let expected = bases * smooth_points;
    report.push(Assertion::check(
        "Jacobian rank 2 at sampled points of generic fibers",
        format!("{expected}/{expected}"),
        format!("{rank2}/{points} (sampling failures {failures})"),
        rank2 == expected && failures == 0,
    ));

    let mut rng = stream(seed, 6);
    let listed = exceptional_orbit_members();
    let orbit_flagged = listed.iter().filter(|&&(a, b)| is_exceptional(a, b, cfg)).count();
    let mut misclassified = 0;
    for _ in 0..n {
        let p = random_moduli_point(&mut rng, cfg);
        let Ok((l1, l2)) = lambda_pair(p.t()) else { continue };
        let expected = listed.iter().any(|&(a, b)| approx_eq(a, l1, cfg) && approx_eq(b, l2, cfg));
        if is_exceptional(l1, l2, cfg) != expected {
            misclassified += 1;
        }
    }
    report.push(Assertion::check(
        "is_exceptional exactly on the orbits of (-1, 1/2) and (w, w-bar)",
        format!("{0}/{0} orbit members, 0 misclassified random pairs", listed.len()),
        format!("{orbit_flagged}/{} orbit members, {misclassified} misclassified random pairs", listed.len()),
        orbit_flagged == listed.len() && misclassified == 0,
    ));

    let mut rng = stream(seed, 7);
    for (label, (l1, l2)) in ["(-1, 1/2)", "(w, w-bar)"].iter().zip(exceptional_pairs()) {
        let computed = match glued_points(l1, l2, 500, rng.gen(), cfg) {
            Ok(g) => format!("{} glued points in 500 samples", g.len()),
            Err(e) => format!("{}: {e}", e.code()),
        };
        let pass = computed.split(' ').next().and_then(|c| c.parse::<usize>().ok()).is_some_and(|c| c > 0);
        report.push(Assertion::check(
            &format!("glued points on the exceptional fiber {label}"),
            "nonempty within 500 samples",
            computed,
            pass,
        ));
    }
    let generic_pairs = 2;
    let generic_samples = n.min(1000);
    let mut glued = 0usize;
    let mut errors = 0usize;
    for _ in 0..generic_pairs {
        let (l1, l2) = random_generic_pair(&mut rng, cfg);
        match glued_points(l1, l2, generic_samples, rng.gen(), cfg) {
            Ok(g) => glued += g.len(),
            Err(_) => errors += 1,
        }
    }
    report.push(Assertion::check(
        "no glued points on generic fibers",
        "0",
        format!("{glued} (over {generic_pairs} pairs x {generic_samples} samples, {errors} errors)"),
        glued == 0 && errors == 0,
    ));
    report
}
