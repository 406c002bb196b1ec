//! The Prym pipeline on lattices: the product of the three elliptic factors,
//! its quotient by the two half-period sums, and the second quotient by the
//! two-torsion of K(Ξ).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::{
    direct_sum, enlarge, k_group, k_torsion_generators, orthogonal, polarization_type, product_lattice,
    quotient_group, restrict_to_coordinates, LatticeError, PolarizedLattice, QVec,
};
use crate::report::{Assertion, Report};

/// Assertion labels, in report order.
pub const ASSERTIONS: [&str; 5] = [
    "polarization type of the enlarged lattice",
    "K(Xi) of the enlarged lattice",
    "ker mu: enlarged lattice over the product",
    "quotient by K(Xi)[2]: type and orthogonal splitting",
    "total kernel: second quotient over the product",
];

const EXPECTED: [&str; 5] = [
    "(1,1,4)",
    "Z4 x Z4",
    "Z2 x Z2",
    "(1,1,1) = (1,1) + (1)",
    "Z2 x Z2 x Z2 x Z2",
];

/// `k₁ = (a₁ + … + a_g)/2`, `k₂ = (b₁ + … + b_g)/2` in ℚ^{2g}.
pub fn prym_kernel(g: usize) -> Vec<QVec> {
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    (0..2)
        .map(|parity| {
            (0..2 * g)
                .map(|k| if k % 2 == parity { half.clone() } else { BigRational::zero() })
                .collect()
        })
        .collect()
}

fn describe(e: &LatticeError) -> String {
    format!("{}: {e}", e.code())
}

/// Splits the lattice along the last factor's coordinates and reports
/// `type = type(first) + type(last)`, flagging non-orthogonal or
/// non-generating splittings.
fn splitting(l: &PolarizedLattice) -> Result<String, LatticeError> {
    let n = l.ambient_dim();
    let head: Vec<usize> = (0..n - 2).collect();
    let tail: Vec<usize> = (n - 2..n).collect();
    let whole = polarization_type(l)?;
    let first = restrict_to_coordinates(l, &head)?;
    let last = restrict_to_coordinates(l, &tail)?;
    let mut out = format!("{whole} = {} + {}", polarization_type(&first)?, polarization_type(&last)?);
    if !orthogonal(&first, &last) {
        out.push_str(" (not orthogonal)");
    }
    if first.rank() + last.rank() != l.rank() {
        out.push_str(&format!(" (summand ranks {} + {})", first.rank(), last.rank()));
    } else {
        let index = quotient_group(&direct_sum(&first, &last)?, l)?;
        if !index.is_trivial() {
            out.push_str(&format!(" (summands generate a sublattice with quotient {index})"));
        }
    }
    Ok(out)
}

/// Default run: types (2,2,4) and the kernel `{k₁, k₂}`.
pub fn scenario_prym() -> Report {
    scenario_prym_with(&[2, 2, 4], &prym_kernel(3))
}

/// Runs the pipeline for arbitrary factor types and kernel generators;
/// failures at any stage become report entries.
pub fn scenario_prym_with(types: &[u64], kernel: &[QVec]) -> Report {
    let mut report = Report::default();
    let mut record = |i: usize, computed: Result<String, String>| {
        let computed = computed.unwrap_or_else(|e| e);
        report.push(Assertion::compare(ASSERTIONS[i], EXPECTED[i], computed));
    };
    let skipped = |stage: &str| Err(format!("not computed: {stage} failed"));

    let product = match product_lattice(types) {
        Ok(l) => l,
        Err(e) => {
            for i in 0..5 {
                record(i, Err(describe(&e)));
            }
            return report;
        }
    };
    let enlarged = enlarge(&product, kernel);
    let Ok(enlarged) = enlarged else {
        let e = enlarged.unwrap_err();
        record(0, Err(describe(&e)));
        for i in 1..5 {
            record(i, skipped("enlargement"));
        }
        return report;
    };
    record(0, polarization_type(&enlarged).map(|t| t.to_string()).map_err(|e| describe(&e)));
    record(1, k_group(&enlarged).map(|k| k.to_string()).map_err(|e| describe(&e)));
    record(2, quotient_group(&product, &enlarged).map(|k| k.to_string()).map_err(|e| describe(&e)));

    let second = k_torsion_generators(&enlarged, 2).and_then(|gens| enlarge(&enlarged, &gens));
    match second {
        Ok(second) => {
            record(3, splitting(&second).map_err(|e| describe(&e)));
            record(4, quotient_group(&product, &second).map(|k| k.to_string()).map_err(|e| describe(&e)));
        }
        Err(e) => {
            record(3, Err(describe(&e)));
            record(4, skipped("second quotient"));
        }
    }
    report
}
