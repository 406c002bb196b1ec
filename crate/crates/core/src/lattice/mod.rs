//! Polarized integral lattices embedded in ℚ^{2g}: products of polarized
//! factors, isogenies as overlattices, polarization types via elementary
//! divisors and the finite groups attached to them. All arithmetic is exact.

pub mod linalg;
mod scenario;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use linalg::{QMat, QVec, ZMat};
use linalg::{clear_denominators, hermite, q_det, q_inverse, q_mul, q_rank, smith, solve_left, to_q, to_z};
pub use scenario::{prym_kernel, scenario_prym, scenario_prym_with, ASSERTIONS};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("invalid polarization type: {0}")]
    InvalidType(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("form matrix is not alternating")]
    NotAlternating,
    #[error("basis vectors are linearly dependent")]
    DependentBasis,
    #[error("lattice rank {0} is odd")]
    OddRank(usize),
    #[error("generator v{0} is outside the span of the lattice")]
    OutsideSpan(usize),
    #[error("pairing E({left}, {right}) = {value} is not an integer")]
    NonIntegralPolarization { left: String, right: String, value: String },
    #[error("form is degenerate on the lattice")]
    DegenerateForm,
    #[error("not a sublattice: {0}")]
    NotASublattice(String),
}

impl LatticeError {
    pub fn code(&self) -> &'static str {
        match self {
            LatticeError::InvalidType(_) => "InvalidType",
            LatticeError::DimensionMismatch { .. } => "DimensionMismatch",
            LatticeError::NotAlternating => "NotAlternating",
            LatticeError::DependentBasis => "DependentBasis",
            LatticeError::OddRank(_) => "OddRank",
            LatticeError::OutsideSpan(_) => "OutsideSpan",
            LatticeError::NonIntegralPolarization { .. } => "NonIntegralPolarization",
            LatticeError::DegenerateForm => "DegenerateForm",
            LatticeError::NotASublattice(_) => "NotASublattice",
        }
    }
}

/// Divisibility chain `d₁ | d₂ | … | d_g` of a polarization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantFactors {
    pub factors: Vec<BigInt>,
}

impl InvariantFactors {
    pub fn from_u64(ds: &[u64]) -> Self {
        InvariantFactors { factors: ds.iter().map(|&d| BigInt::from(d)).collect() }
    }

    pub fn product(&self) -> BigInt {
        self.factors.iter().product()
    }

    pub fn is_principal(&self) -> bool {
        self.factors.iter().all(One::is_one)
    }
}

impl fmt::Display for InvariantFactors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Finite abelian group `ℤ_{n₁} × … × ℤ_{n_k}` with `nᵢ ≥ 2`, `nᵢ | nᵢ₊₁`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroupDescriptor {
    pub factors: Vec<BigInt>,
}

impl FiniteGroupDescriptor {
    /// Drops unit factors from a Smith diagonal.
    fn from_diagonal(diag: &[BigInt]) -> Self {
        FiniteGroupDescriptor { factors: diag.iter().filter(|d| !d.is_one()).cloned().collect() }
    }

    pub fn from_u64(ns: &[u64]) -> Self {
        FiniteGroupDescriptor { factors: ns.iter().map(|&n| BigInt::from(n)).collect() }
    }

    pub fn order(&self) -> BigInt {
        self.factors.iter().product()
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }
}

impl fmt::Display for FiniteGroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.factors.iter().map(|n| format!("Z{n}")).collect();
        write!(f, "{}", parts.join(" x "))
    }
}

/// A lattice with exact rational basis in ℚⁿ together with an integral
/// alternating form on ℚⁿ whose restriction to the lattice is integral and
/// nondegenerate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolarizedLattice {
    basis: QMat,
    form: ZMat,
}

impl PolarizedLattice {
    pub fn new(basis: QMat, form: ZMat) -> Result<Self, LatticeError> {
        let n = form.len();
        for row in &form {
            if row.len() != n {
                return Err(LatticeError::DimensionMismatch { expected: n, found: row.len() });
            }
        }
        for v in &basis {
            if v.len() != n {
                return Err(LatticeError::DimensionMismatch { expected: n, found: v.len() });
            }
        }
        if (0..n).any(|i| (0..n).any(|j| form[i][j] != -&form[j][i])) {
            return Err(LatticeError::NotAlternating);
        }
        if basis.len() % 2 == 1 {
            return Err(LatticeError::OddRank(basis.len()));
        }
        if q_rank(&basis) < basis.len() {
            return Err(LatticeError::DependentBasis);
        }
        let l = PolarizedLattice { basis, form };
        let gram = l.rational_gram();
        for (i, row) in gram.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if !x.is_integer() {
                    return Err(LatticeError::NonIntegralPolarization {
                        left: format!("basis[{i}]"),
                        right: format!("basis[{j}]"),
                        value: x.to_string(),
                    });
                }
            }
        }
        if q_det(&gram).is_zero() {
            return Err(LatticeError::DegenerateForm);
        }
        Ok(l)
    }

    pub fn basis(&self) -> &QMat {
        &self.basis
    }

    pub fn form(&self) -> &ZMat {
        &self.form
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.form.len()
    }

    /// `E(x, y) = x F yᵀ`.
    pub fn pair(&self, x: &QVec, y: &QVec) -> BigRational {
        let mut acc = BigRational::zero();
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if !self.form[i][j].is_zero() {
                    acc += xi * yj * &self.form[i][j];
                }
            }
        }
        acc
    }

    fn rational_gram(&self) -> QMat {
        self.basis
            .iter()
            .map(|x| self.basis.iter().map(|y| self.pair(x, y)).collect())
            .collect()
    }

    /// Gram matrix of the form on the basis; integral by construction.
    pub fn gram(&self) -> ZMat {
        to_z(&self.rational_gram()).expect("validated lattice has integral Gram matrix")
    }

    /// Coordinates of `x` in the basis, if `x` lies in the rational span.
    pub fn coordinates(&self, x: &QVec) -> Option<QVec> {
        solve_left(&self.basis, x)
    }

    pub fn contains(&self, x: &QVec) -> bool {
        self.coordinates(x).is_some_and(|c| c.iter().all(BigRational::is_integer))
    }

    /// `|det|` of the basis matrix (full-rank lattices only).
    pub fn covolume(&self) -> Option<BigRational> {
        (self.rank() == self.ambient_dim()).then(|| q_det(&self.basis).abs())
    }
}

fn standard_form(types: &[BigInt]) -> ZMat {
    let n = 2 * types.len();
    let mut f = vec![vec![BigInt::zero(); n]; n];
    for (i, d) in types.iter().enumerate() {
        f[2 * i][2 * i + 1] = d.clone();
        f[2 * i + 1][2 * i] = -d;
    }
    f
}

/// Standard lattice ℤ^{2g} with `E(aᵢ, bᵢ) = dᵢ` on the basis
/// `a₁, b₁, a₂, b₂, …`.
pub fn product_lattice(types: &[u64]) -> Result<PolarizedLattice, LatticeError> {
    if types.is_empty() || types.contains(&0) {
        return Err(LatticeError::InvalidType(format!("{types:?}")));
    }
    let ds: Vec<BigInt> = types.iter().map(|&d| BigInt::from(d)).collect();
    let n = 2 * types.len();
    let basis = to_q(&linalg::identity(n));
    PolarizedLattice::new(basis, standard_form(&ds))
}

/// Overlattice generated by `l` and `vs`, with a Hermite-reduced basis.
pub fn enlarge(l: &PolarizedLattice, vs: &[QVec]) -> Result<PolarizedLattice, LatticeError> {
    let n = l.ambient_dim();
    for v in vs {
        if v.len() != n {
            return Err(LatticeError::DimensionMismatch { expected: n, found: v.len() });
        }
    }
    // Pairings of each new generator against everything generated so far;
    // by bilinearity these decide integrality on the whole overlattice.
    for (k, v) in vs.iter().enumerate() {
        for (i, b) in l.basis.iter().enumerate() {
            let e = l.pair(v, b);
            if !e.is_integer() {
                return Err(LatticeError::NonIntegralPolarization {
                    left: format!("v{k}"),
                    right: format!("basis[{i}]"),
                    value: e.to_string(),
                });
            }
        }
        for (m, w) in vs.iter().enumerate().skip(k + 1) {
            let e = l.pair(v, w);
            if !e.is_integer() {
                return Err(LatticeError::NonIntegralPolarization {
                    left: format!("v{k}"),
                    right: format!("v{m}"),
                    value: e.to_string(),
                });
            }
        }
    }
    let gens: QMat = l.basis.iter().chain(vs.iter()).cloned().collect();
    let (den, scaled) = clear_denominators(&gens);
    let h = hermite(&scaled);
    if h.rank > l.rank() {
        let k = (0..vs.len())
            .find(|&k| l.coordinates(&vs[k]).is_none())
            .unwrap_or(0);
        return Err(LatticeError::OutsideSpan(k));
    }
    let basis = h
        .basis()
        .into_iter()
        .map(|row| row.into_iter().map(|x| BigRational::new(x, den.clone())).collect())
        .collect();
    PolarizedLattice::new(basis, l.form.clone())
}

fn chain_from_pairs(diag: &[BigInt]) -> Result<InvariantFactors, LatticeError> {
    if diag.len() % 2 == 1 || diag.iter().any(Zero::is_zero) {
        return Err(LatticeError::DegenerateForm);
    }
    let factors: Vec<BigInt> = diag.chunks(2).map(|p| p[0].clone()).collect();
    if diag.chunks(2).any(|p| p[0] != p[1]) {
        return Err(LatticeError::DegenerateForm);
    }
    Ok(InvariantFactors { factors })
}

/// Elementary divisors of the Gram matrix, read off as the chain
/// `(d₁, …, d_g)` from the Smith diagonal `(d₁, d₁, …, d_g, d_g)`.
pub fn polarization_type(l: &PolarizedLattice) -> Result<InvariantFactors, LatticeError> {
    chain_from_pairs(&smith(&l.gram()).diag)
}

/// Polarization type by direct symplectic (Frobenius) reduction of the
/// Gram matrix under simultaneous row/column operations.
pub fn symplectic_type(l: &PolarizedLattice) -> Result<InvariantFactors, LatticeError> {
    let mut a = l.gram();
    let n = a.len();
    let mut out = vec![];
    let mut s = 0;
    // simultaneous row/column operation: e_dst -= q e_src
    fn cong_axpy(a: &mut ZMat, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        let row: Vec<BigInt> = a[src].clone();
        for (x, y) in a[dst].iter_mut().zip(row.iter()) {
            *x -= q * y;
        }
        for r in a.iter_mut() {
            let v = &r[src] * q;
            r[dst] -= v;
        }
    }
    fn cong_swap(a: &mut ZMat, i: usize, j: usize) {
        a.swap(i, j);
        for r in a.iter_mut() {
            r.swap(i, j);
        }
    }
    while s < n {
        let mut best: Option<(usize, usize)> = None;
        for i in s..n {
            for j in i + 1..n {
                if !a[i][j].is_zero() && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((i, j)) = best else { return Err(LatticeError::DegenerateForm) };
        cong_swap(&mut a, s, i);
        let j = if j == s { i } else { j };
        cong_swap(&mut a, s + 1, j);
        if a[s][s + 1].is_negative() {
            cong_axpy(&mut a, s + 1, s + 1, &BigInt::from(2));
        }
        let d = a[s][s + 1].clone();
        let mut clean = true;
        for k in s + 2..n {
            let q = a[s][k].div_floor(&d);
            cong_axpy(&mut a, k, s + 1, &q);
            let q = -a[s + 1][k].div_floor(&d);
            // a[s+1][s] = -d, so e_k -= q' e_s with q' = a[s+1][k] / (-d)
            cong_axpy(&mut a, k, s, &q);
            clean &= a[s][k].is_zero() && a[s + 1][k].is_zero();
        }
        if !clean {
            continue;
        }
        let offender = (s + 2..n).find(|&i| (s + 2..n).any(|j| !a[i][j].is_multiple_of(&d)));
        if let Some(i) = offender {
            cong_axpy(&mut a, s, i, &-BigInt::one());
            continue;
        }
        out.push(d);
        s += 2;
    }
    Ok(InvariantFactors { factors: out })
}

fn quotient_of_bases(sub: &QMat, sup: &QMat) -> Result<FiniteGroupDescriptor, LatticeError> {
    if sub.len() != sup.len() {
        return Err(LatticeError::NotASublattice(format!(
            "rank {} differs from rank {}",
            sub.len(),
            sup.len()
        )));
    }
    let mut coords = Vec::with_capacity(sub.len());
    for (i, v) in sub.iter().enumerate() {
        let c = solve_left(sup, v)
            .ok_or_else(|| LatticeError::NotASublattice(format!("basis[{i}] is outside the span")))?;
        if let Some(x) = c.iter().find(|x| !x.is_integer()) {
            return Err(LatticeError::NotASublattice(format!(
                "basis[{i}] has non-integral coordinate {x}"
            )));
        }
        coords.push(c);
    }
    let m = to_z(&coords).expect("coordinates checked integral");
    let diag = smith(&m).diag;
    if diag.iter().any(Zero::is_zero) {
        return Err(LatticeError::NotASublattice("infinite index".into()));
    }
    Ok(FiniteGroupDescriptor::from_diagonal(&diag))
}

/// `sup / sub` via the Smith form of the coordinate matrix of `sub` in `sup`.
pub fn quotient_group(
    sub: &PolarizedLattice,
    sup: &PolarizedLattice,
) -> Result<FiniteGroupDescriptor, LatticeError> {
    if sub.ambient_dim() != sup.ambient_dim() {
        return Err(LatticeError::DimensionMismatch { expected: sup.ambient_dim(), found: sub.ambient_dim() });
    }
    quotient_of_bases(&sub.basis, &sup.basis)
}

/// Basis `G⁻¹B` of the dual lattice `{x ∈ span : E(x, Λ) ⊆ ℤ}`.
pub fn dual_basis(l: &PolarizedLattice) -> Result<QMat, LatticeError> {
    let g_inv = q_inverse(&to_q(&l.gram())).ok_or(LatticeError::DegenerateForm)?;
    Ok(q_mul(&g_inv, &l.basis))
}

/// `K = Λ^∨ / Λ`, computed from the dual lattice rather than the type.
pub fn k_group(l: &PolarizedLattice) -> Result<FiniteGroupDescriptor, LatticeError> {
    quotient_of_bases(&l.basis, &dual_basis(l)?)
}

/// Generators of `{x ∈ Λ^∨ : n·x ∈ Λ}`, i.e. the preimage of `K[n]`.
///
/// With `U G V = S`, `x = c G⁻¹ B` satisfies `n x ∈ Λ` iff `n c V S⁻¹ ∈ ℤ`,
/// so `c' = c V` ranges over `⊕ (sᵢ / gcd(sᵢ, n)) ℤ`.
pub fn k_torsion_generators(l: &PolarizedLattice, n: u64) -> Result<Vec<QVec>, LatticeError> {
    let s = smith(&l.gram());
    if s.diag.iter().any(Zero::is_zero) {
        return Err(LatticeError::DegenerateForm);
    }
    let v_inv = linalg::z_inverse(&s.v).expect("Smith transform is unimodular");
    let n = BigInt::from(n);
    let coeffs: ZMat = s
        .diag
        .iter()
        .zip(v_inv)
        .map(|(si, row)| {
            let m = si / si.gcd(&n);
            row.into_iter().map(|x| x * &m).collect()
        })
        .collect();
    Ok(q_mul(&to_q(&coeffs), &dual_basis(l)?))
}

/// Vectors of `l` supported on the given ambient coordinates.
pub fn restrict_to_coordinates(l: &PolarizedLattice, coords: &[usize]) -> Result<PolarizedLattice, LatticeError> {
    let others: Vec<usize> = (0..l.ambient_dim()).filter(|k| !coords.contains(k)).collect();
    let m: QMat = l.basis.iter().map(|v| others.iter().map(|&k| v[k].clone()).collect()).collect();
    let (_, m) = clear_denominators(&m);
    let kernel = if others.is_empty() { linalg::identity(l.rank()) } else { hermite(&m).left_kernel() };
    PolarizedLattice::new(q_mul(&to_q(&kernel), &l.basis), l.form.clone())
}

/// Lattice spanned by the union of two bases (which must be independent).
pub fn direct_sum(a: &PolarizedLattice, b: &PolarizedLattice) -> Result<PolarizedLattice, LatticeError> {
    if a.form != b.form {
        return Err(LatticeError::NotAlternating);
    }
    let basis = a.basis.iter().chain(b.basis.iter()).cloned().collect();
    PolarizedLattice::new(basis, a.form.clone())
}

/// Whether every pairing between the two lattices vanishes.
pub fn orthogonal(a: &PolarizedLattice, b: &PolarizedLattice) -> bool {
    a.basis.iter().all(|x| b.basis.iter().all(|y| a.pair(x, y).is_zero()))
}
