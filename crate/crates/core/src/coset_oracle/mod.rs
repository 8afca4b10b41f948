//! Independent brute-force oracles for small groups over `Q_p` and tiny
//! finite fields: double coset convolution by enumeration, the `GL_2`
//! mod-p Satake sum, principal series coinvariants, and a Cauchy–Binet
//! check.

mod coinvariants;
mod lattice;
mod satake;

use itertools::Itertools;
use thiserror::Error;

use crate::matrix::Mat;

pub use coinvariants::{ps_coinvariants_oracle, weyl_orbit_multiset};
pub use lattice::{
    convolve_oracle, default_depth, enumerate_cosets, translation_structure_constant, ConvolutionTable, CosetRep, Level,
};
pub use satake::{in_y_span, satake_oracle_gl2};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("precision p^{depth} too small for the lattices involved")]
    DepthTooSmall { depth: u32 },
    #[error("field of size {0} is too large for dense enumeration")]
    FieldTooLarge(u64),
    #[error("invalid oracle input: {0}")]
    InvalidInput(String),
    #[error("oracle self-check failed: {0}")]
    Inconsistent(String),
}

pub(crate) fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

pub(crate) fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = ((acc as u128 * b as u128) % m as u128) as u64;
        }
        b = ((b as u128 * b as u128) % m as u128) as u64;
        e >>= 1;
    }
    acc
}

/// Inverse of `a` modulo the prime `p`.
pub(crate) fn inv_mod_p(a: i64, p: i64) -> i64 {
    pow_mod(a.rem_euclid(p) as u64, (p - 2) as u64, p as u64) as i64
}

/// A generator of `(Z/p^2)^x` for an odd prime `p`, which generates
/// `(Z/p^k)^x` for every `k`.
pub(crate) fn primitive_root_mod_p_squared(p: u64) -> u64 {
    let order = p - 1;
    let factors: Vec<u64> = (2..=order).filter(|d| order.is_multiple_of(*d) && is_prime(*d)).collect();
    let g = (2..p)
        .find(|&g| factors.iter().all(|&f| pow_mod(g, order / f, p) != 1))
        .expect("primitive root exists");
    if pow_mod(g, p - 1, p * p) == 1 {
        g + p
    } else {
        g
    }
}

/// Rank of an integer matrix (as rows) over `F_p`.
pub(crate) fn rank_mod_p(mut rows: Vec<Vec<i64>>, p: i64) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows.len()).find(|&r| rows[r][c].rem_euclid(p) != 0) else {
            continue;
        };
        rows.swap(rank, piv);
        let inv = inv_mod_p(rows[rank][c], p);
        for x in rows[rank].iter_mut() {
            *x = (*x * inv).rem_euclid(p);
        }
        for r in 0..rows.len() {
            if r != rank && rows[r][c].rem_euclid(p) != 0 {
                let f = rows[r][c];
                for k in 0..cols {
                    rows[r][k] = (rows[r][k] - f * rows[rank][k]).rem_euclid(p);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Checks that every `k x k` minor of `AB` equals the sum over `k`-subsets
/// `S` of the `2k x 2k` minors of `diag(A, B)` on rows `I + (n + S)` and
/// columns `S + (n + J)`.
pub fn cauchy_binet_check(a: &Mat<i128>, b: &Mat<i128>, k: usize) -> bool {
    let n = a.rows();
    assert!(a.cols() == n && b.rows() == n && b.cols() == n, "square matrices of equal size");
    if k == 0 || k > n {
        return false;
    }
    let ab = a.mul(b);
    let block = Mat::block_diag(a, b);
    let subsets: Vec<Vec<usize>> = (0..n).combinations(k).collect();
    subsets.iter().all(|rows| {
        subsets.iter().all(|cols| {
            let lhs = ab.minor(rows, cols);
            let rhs = subsets.iter().fold(0i128, |acc, s| {
                let r: Vec<usize> = rows.iter().copied().chain(s.iter().map(|x| x + n)).collect();
                let c: Vec<usize> = s.iter().copied().chain(cols.iter().map(|x| x + n)).collect();
                acc + block.minor(&r, &c)
            });
            lhs == rhs
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn number_theory_helpers() {
        assert!(is_prime(2) && is_prime(31) && !is_prime(1) && !is_prime(21));
        for p in [3u64, 5, 7, 29] {
            let g = primitive_root_mod_p_squared(p);
            let m = p * p;
            let order = (1..=m).find(|&k| pow_mod(g, k, m) == 1).unwrap();
            assert_eq!(order, p * (p - 1));
        }
        assert_eq!(inv_mod_p(3, 7) * 3 % 7, 1);
        assert_eq!(rank_mod_p(vec![vec![1, 2], vec![2, 4]], 5), 1);
        assert_eq!(rank_mod_p(vec![vec![1, 2], vec![2, 4]], 2), 1);
        assert_eq!(rank_mod_p(vec![vec![1, 1], vec![0, 3]], 3), 1);
    }

    #[test]
    fn cauchy_binet_identity_and_det() {
        let id = Mat::<i128>::identity(3);
        for k in 1..=3 {
            assert!(cauchy_binet_check(&id, &id, k));
        }
        let a = Mat::from_rows(vec![vec![1, -2, 3], vec![0, 4, -5], vec![2, 2, 1]]);
        let b = Mat::from_rows(vec![vec![-1, 0, 5], vec![3, 3, -4], vec![1, -5, 2]]);
        assert!(cauchy_binet_check(&a, &b, 3));
        assert_eq!(a.mul(&b).det(), a.det() * b.det());
    }

    proptest! {
        #[test]
        fn cauchy_binet_random(
            entries in proptest::collection::vec(-5i128..=5, 18),
            k in 1usize..=3,
        ) {
            let a = Mat::from_fn(3, 3, |i, j| entries[3 * i + j]);
            let b = Mat::from_fn(3, 3, |i, j| entries[9 + 3 * i + j]);
            prop_assert!(cauchy_binet_check(&a, &b, k));
        }
    }
}
