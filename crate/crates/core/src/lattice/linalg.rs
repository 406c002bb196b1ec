//! Exact integer and rational matrix routines: Hermite and Smith normal
//! forms with unimodular transforms, rational inverse and rank.

#![allow(clippy::needless_range_loop)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type ZMat = Vec<Vec<BigInt>>;
pub type QVec = Vec<BigRational>;
pub type QMat = Vec<QVec>;

pub fn identity(n: usize) -> ZMat {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

pub fn q_from_int(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

pub fn q_frac(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn to_q(m: &ZMat) -> QMat {
    m.iter()
        .map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect())
        .collect()
}

/// Integer matrix if every entry is integral.
pub fn to_z(m: &QMat) -> Option<ZMat> {
    m.iter()
        .map(|r| r.iter().map(|x| x.is_integer().then(|| x.to_integer())).collect())
        .collect()
}

/// `(d, d * m)` with `d` the lcm of all denominators.
pub fn clear_denominators(m: &QMat) -> (BigInt, ZMat) {
    let d = m
        .iter()
        .flatten()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let scaled = m
        .iter()
        .map(|r| r.iter().map(|x| (x * &d).to_integer()).collect())
        .collect();
    (d, scaled)
}

pub fn q_mul(a: &QMat, b: &QMat) -> QMat {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    (0..inner).fold(BigRational::zero(), |acc, k| acc + &row[k] * &b[k][j])
                })
                .collect()
        })
        .collect()
}

pub fn q_transpose(a: &QMat) -> QMat {
    let cols = a.first().map_or(0, Vec::len);
    (0..cols).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

/// Reduced row echelon form; returns the matrix and its pivot columns.
fn q_rref(a: &QMat) -> (QMat, Vec<usize>) {
    let mut m = a.clone();
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = vec![];
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let sub = &f * &m[r][j];
                    m[i][j] -= sub;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (m, pivots)
}

/// Coordinates `c` with `c * b = x`, if `x` lies in the row span of `b`
/// (rows of `b` assumed independent).
pub fn solve_left(b: &QMat, x: &QVec) -> Option<QVec> {
    let r = b.len();
    let n = x.len();
    let aug: QMat = (0..n)
        .map(|k| {
            let mut row: QVec = b.iter().map(|bi| bi[k].clone()).collect();
            row.push(x[k].clone());
            row
        })
        .collect();
    let (m, pivots) = q_rref(&aug);
    if pivots.last() == Some(&r) {
        return None;
    }
    let mut c = vec![BigRational::zero(); r];
    for (row, &p) in pivots.iter().enumerate() {
        c[p] = m[row][r].clone();
    }
    Some(c)
}

pub fn q_rank(a: &QMat) -> usize {
    q_rref(a).1.len()
}

pub fn q_inverse(a: &QMat) -> Option<QMat> {
    let n = a.len();
    let aug: QMat = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            row
        })
        .collect();
    let (m, pivots) = q_rref(&aug);
    if pivots.len() < n || pivots[n - 1] >= n {
        return None;
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn q_det(a: &QMat) -> BigRational {
    let n = a.len();
    let mut m = a.clone();
    let mut det = BigRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return BigRational::zero();
        };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= m[c][c].clone();
        for i in c + 1..n {
            if !m[i][c].is_zero() {
                let f = &m[i][c] / &m[c][c];
                for j in c..n {
                    let sub = &f * &m[c][j];
                    m[i][j] -= sub;
                }
            }
        }
    }
    det
}

fn row_axpy(m: &mut ZMat, dst: usize, src: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    let (s, d) = if src < dst {
        let (a, b) = m.split_at_mut(dst);
        (&a[src], &mut b[0])
    } else {
        let (a, b) = m.split_at_mut(src);
        (&b[0], &mut a[dst])
    };
    for (x, y) in d.iter_mut().zip(s.iter()) {
        *x -= q * y;
    }
}

fn col_axpy(m: &mut ZMat, dst: usize, src: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    for row in m.iter_mut() {
        let v = &row[src] * q;
        row[dst] -= v;
    }
}

fn swap_cols(m: &mut ZMat, a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

fn negate_row(m: &mut ZMat, i: usize) {
    for x in m[i].iter_mut() {
        *x = -&*x;
    }
}

/// Row-style Hermite normal form.
#[derive(Debug, Clone)]
pub struct Hermite {
    /// Echelon matrix with positive pivots and entries above each pivot
    /// reduced into `[0, pivot)`.
    pub h: ZMat,
    /// Unimodular transform with `t * a = h`.
    pub t: ZMat,
    pub rank: usize,
}

impl Hermite {
    /// The nonzero rows: a basis of the row lattice.
    pub fn basis(&self) -> ZMat {
        self.h[..self.rank].to_vec()
    }

    /// Rows of `t` spanning the integer left kernel of the input.
    pub fn left_kernel(&self) -> ZMat {
        self.t[self.rank..].to_vec()
    }
}

pub fn hermite(a: &ZMat) -> Hermite {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut h = a.clone();
    let mut t = identity(rows);
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        loop {
            let pivot = (r..rows)
                .filter(|&i| !h[i][c].is_zero())
                .min_by(|&i, &j| h[i][c].abs().cmp(&h[j][c].abs()));
            let Some(p) = pivot else { break };
            h.swap(r, p);
            t.swap(r, p);
            let mut cleared = true;
            for i in r + 1..rows {
                if h[i][c].is_zero() {
                    continue;
                }
                let q = h[i][c].div_floor(&h[r][c]);
                row_axpy(&mut h, i, r, &q);
                row_axpy(&mut t, i, r, &q);
                if !h[i][c].is_zero() {
                    cleared = false;
                }
            }
            if cleared {
                break;
            }
        }
        if h[r][c].is_zero() {
            continue;
        }
        if h[r][c].is_negative() {
            negate_row(&mut h, r);
            negate_row(&mut t, r);
        }
        for i in 0..r {
            let q = h[i][c].div_floor(&h[r][c]);
            row_axpy(&mut h, i, r, &q);
            row_axpy(&mut t, i, r, &q);
        }
        r += 1;
    }
    Hermite { h, t, rank: r }
}

/// Smith normal form `u * a * v = diag(d)` with `d[i] | d[i+1]`.
#[derive(Debug, Clone)]
pub struct Smith {
    /// Nonnegative diagonal, length `min(rows, cols)`.
    pub diag: Vec<BigInt>,
    pub u: ZMat,
    pub v: ZMat,
}

pub fn smith(a: &ZMat) -> Smith {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut d = a.clone();
    let mut u = identity(rows);
    let mut v = identity(cols);
    let k = rows.min(cols);
    'outer: for t in 0..k {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if !d[i][j].is_zero()
                        && best.is_none_or(|(bi, bj)| d[i][j].abs() < d[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break 'outer };
            d.swap(t, pi);
            u.swap(t, pi);
            swap_cols(&mut d, t, pj);
            swap_cols(&mut v, t, pj);

            let mut clean = true;
            for i in t + 1..rows {
                let q = d[i][t].div_floor(&d[t][t]);
                row_axpy(&mut d, i, t, &q);
                row_axpy(&mut u, i, t, &q);
                clean &= d[i][t].is_zero();
            }
            for j in t + 1..cols {
                let q = d[t][j].div_floor(&d[t][t]);
                col_axpy(&mut d, j, t, &q);
                col_axpy(&mut v, j, t, &q);
                clean &= d[t][j].is_zero();
            }
            if !clean {
                continue;
            }
            let offender = (t + 1..rows).find(|&i| {
                (t + 1..cols).any(|j| !d[i][j].is_multiple_of(&d[t][t]))
            });
            match offender {
                Some(i) => {
                    // row t += row i brings a non-multiple into row t
                    let minus_one = -BigInt::one();
                    row_axpy(&mut d, t, i, &minus_one);
                    row_axpy(&mut u, t, i, &minus_one);
                }
                None => break,
            }
        }
        if d[t][t].is_negative() {
            negate_row(&mut d, t);
            negate_row(&mut u, t);
        }
    }
    let diag = (0..k).map(|i| d[i][i].clone()).collect();
    Smith { diag, u, v }
}

/// Inverse of a unimodular integer matrix.
pub fn z_inverse(a: &ZMat) -> Option<ZMat> {
    q_inverse(&to_q(a)).and_then(|m| to_z(&m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(rows: &[&[i64]]) -> ZMat {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    fn z_mul(a: &ZMat, b: &ZMat) -> ZMat {
        to_z(&q_mul(&to_q(a), &to_q(b))).unwrap()
    }

    fn diag_i64(s: &Smith) -> Vec<i64> {
        s.diag.iter().map(|x| i64::try_from(x).unwrap()).collect()
    }

    fn check_smith(a: &ZMat) -> Smith {
        let s = smith(a);
        let prod = z_mul(&z_mul(&s.u, a), &s.v);
        for (i, row) in prod.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if i == j {
                    assert_eq!(x, &s.diag[i]);
                } else {
                    assert!(x.is_zero(), "off-diagonal entry at ({i},{j})");
                }
            }
        }
        assert!(z_inverse(&s.u).is_some() && z_inverse(&s.v).is_some());
        for w in s.diag.windows(2) {
            assert!(w[0].is_zero() && w[1].is_zero() || w[1].is_multiple_of(&w[0]));
        }
        s
    }

    #[test]
    fn smith_of_pairing_matrix() {
        let s = check_smith(&z(&[&[2, 1, 1], &[1, 2, 0], &[1, 0, 2]]));
        assert_eq!(diag_i64(&s), vec![1, 1, 4]);
    }

    #[test]
    fn smith_small_cases() {
        assert_eq!(diag_i64(&check_smith(&z(&[&[2, 0], &[0, 3]]))), vec![1, 6]);
        assert_eq!(diag_i64(&check_smith(&z(&[&[0, 0], &[0, 0]]))), vec![0, 0]);
        assert_eq!(diag_i64(&check_smith(&z(&[&[4, 6, 8]]))), vec![2]);
        assert_eq!(
            diag_i64(&check_smith(&z(&[&[0, 2, 0, 0], &[-2, 0, 0, 0], &[0, 0, 0, 4], &[0, 0, -4, 0]]))),
            vec![2, 2, 4, 4]
        );
    }

    #[test]
    fn smith_random_matrices() {
        let mut seed = 12345u64;
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((seed >> 33) % 13) as i64 - 6
        };
        for _ in 0..200 {
            let rows = 1 + (next().unsigned_abs() as usize % 5);
            let cols = 1 + (next().unsigned_abs() as usize % 5);
            let a: ZMat = (0..rows).map(|_| (0..cols).map(|_| BigInt::from(next())).collect()).collect();
            let s = check_smith(&a);
            // product of the diagonal equals |det| for square input
            if rows == cols {
                let det = q_det(&to_q(&a)).abs();
                let prod = s.diag.iter().fold(BigInt::one(), |acc, x| acc * x);
                assert_eq!(BigRational::from_integer(prod), det);
            }
        }
    }

    #[test]
    fn hermite_basis_and_kernel() {
        let a = z(&[&[2, 4], &[3, 6], &[1, 1]]);
        let h = hermite(&a);
        assert_eq!(h.rank, 2);
        assert_eq!(z_mul(&h.t, &a), h.h);
        // (1,1), (0,2) and (0,3) generate all of Z^2
        assert_eq!(h.basis(), z(&[&[1, 0], &[0, 1]]));
        let k = h.left_kernel();
        assert_eq!(k.len(), 1);
        assert!(z_mul(&k, &a).iter().flatten().all(Zero::is_zero));
    }

    #[test]
    fn hermite_of_half_periods() {
        // 2 * Z^2 + (1,1)
        let a = z(&[&[2, 0], &[0, 2], &[1, 1]]);
        let h = hermite(&a);
        assert_eq!(h.basis(), z(&[&[1, 1], &[0, 2]]));
    }

    #[test]
    fn rational_inverse_and_det() {
        let a = vec![vec![q_frac(1, 2), q_from_int(1)], vec![q_from_int(3), q_from_int(4)]];
        let inv = q_inverse(&a).unwrap();
        let prod = q_mul(&a, &inv);
        assert_eq!(prod, vec![vec![q_from_int(1), q_from_int(0)], vec![q_from_int(0), q_from_int(1)]]);
        assert_eq!(q_det(&a), q_from_int(-1));
        let sing = vec![vec![q_from_int(1), q_from_int(2)], vec![q_from_int(2), q_from_int(4)]];
        assert!(q_inverse(&sing).is_none());
        assert_eq!(q_rank(&sing), 1);
    }
}
