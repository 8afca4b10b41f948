//! Random families with prescribed elementary divisor bounds, random gauge
//! changes and random Levi families in `C`-coordinates.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::matrix::{conj_perm, Mat};
use crate::ring::Ring;
use crate::root_data::{Perm, Weight};
use crate::scalars::SymbolicScalar;
use crate::tame_types::TameInertialType;

use super::{parabolic_pattern, FrobError, FrobFamily, TruncPoly};

/// Input for [`construct_bounded`].
#[derive(Debug, Clone)]
pub struct BoundedSpec {
    pub ty: TameInertialType,
    /// Dominant weight with `e f` components; the bound is `lambda + eta`.
    pub lambda: Weight,
    /// Defaults to [`default_trunc`].
    pub trunc: Option<usize>,
    /// Use formal unit variables `u{j}_{i}` on the diagonal instead of `+-1`.
    pub unit_vars: bool,
}

/// `4 e (h + 1) f` with `h` the largest entry of `lambda + eta`.
pub fn default_trunc(e: u32, h: i64, f: usize) -> usize {
    4 * e as usize * (h.max(0) as usize + 1) * f
}

fn c(x: i128) -> SymbolicScalar {
    SymbolicScalar::int(x)
}

fn tp(x: SymbolicScalar) -> TruncPoly {
    TruncPoly::constant(x)
}

/// `L U` with `L` unit lower triangular inside the Levi blocks of `P_j` and
/// `U` unit upper triangular, integer entries in `[-2, 2]`.
fn random_parabolic_unipotent<R: Rng>(pattern: &[i64], rng: &mut R) -> Mat<TruncPoly> {
    let n = pattern.len();
    let lower = Mat::from_fn(n, n, |r, k| match r.cmp(&k) {
        std::cmp::Ordering::Equal => TruncPoly::one(),
        std::cmp::Ordering::Greater if pattern[r] == pattern[k] => tp(c(rng.gen_range(-2..=2))),
        _ => TruncPoly::zero(),
    });
    let upper = Mat::from_fn(n, n, |r, k| match r.cmp(&k) {
        std::cmp::Ordering::Equal => TruncPoly::one(),
        std::cmp::Ordering::Less => tp(c(rng.gen_range(-2..=2))),
        _ => TruncPoly::zero(),
    });
    lower.mul(&upper)
}

fn random_v_multiple<R: Rng>(n: usize, degree: usize, rng: &mut R) -> Mat<TruncPoly> {
    Mat::from_fn(n, n, |_, _| {
        let coeffs = (0..=degree).map(|k| if k == 0 { c(0) } else { c(rng.gen_range(-1..=1)) }).collect();
        TruncPoly::from_coeffs(coeffs, None)
    })
}

fn random_sign<R: Rng>(rng: &mut R) -> SymbolicScalar {
    if rng.gen_bool(0.5) {
        c(1)
    } else {
        c(-1)
    }
}

/// A family `A^{(j)} = U_1 Delta D U_2` with `D` the product over the `e`
/// embeddings above `j` of `diag((v - sigma(pi))^{k_i})`, `k` a random
/// rearrangement of `lambda + eta`, `Delta` a unit diagonal and `U_1, U_2`
/// in the parabolic loop group.
pub fn construct_bounded<R: Rng>(spec: &BoundedSpec, rng: &mut R) -> Result<FrobFamily, FrobError> {
    let ty = &spec.ty;
    let (n, f, e) = (ty.n(), ty.f(), ty.e() as usize);
    if spec.lambda.n() != n || spec.lambda.f() != e * f {
        return Err(FrobError::InvalidInput(format!("lambda needs {} components of length {n}", e * f)));
    }
    if !spec.lambda.is_dominant() {
        return Err(FrobError::InvalidInput(format!("lambda = {} is not dominant", spec.lambda)));
    }
    let bound = spec.lambda.add(&Weight::eta(n, e * f))?;
    if bound.comps().iter().flatten().any(|&x| x < 0) {
        return Err(FrobError::InvalidInput(format!("lambda + eta = {bound} has negative entries")));
    }
    let h = bound.comps().iter().flatten().copied().max().unwrap_or(0);
    let trunc = spec.trunc.unwrap_or_else(|| default_trunc(ty.e(), h, f));
    let mut mats = Vec::with_capacity(f);
    for j in 0..f {
        let pattern = parabolic_pattern(ty, j);
        let u1 = random_parabolic_unipotent(&pattern, rng).add(&random_v_multiple(n, 1, rng));
        let u2 = random_parabolic_unipotent(&pattern, rng).add(&random_v_multiple(n, 1, rng));
        let units: Vec<TruncPoly> = (0..n)
            .map(|i| tp(if spec.unit_vars { SymbolicScalar::var(&format!("u{j}_{i}")) } else { random_sign(rng) }))
            .collect();
        let mut diag = units;
        for k in 0..e {
            let mut exps = bound.comp(j * e + k).to_vec();
            exps.shuffle(rng);
            let sigma = if k == 0 {
                SymbolicScalar::pi_pow(1)
            } else {
                SymbolicScalar::pi_pow(1).mul(&SymbolicScalar::var(&format!("z{j}_{k}")))
            };
            let linear = TruncPoly::linear(sigma);
            for (d, &x) in diag.iter_mut().zip(&exps) {
                *d = d.mul(&linear.pow_u(x as u64));
            }
        }
        let a = u1.mul(&Mat::diagonal(&diag)).mul(&u2);
        if let Some(deg) = a.entries().filter_map(TruncPoly::degree).max() {
            if deg >= trunc {
                return Err(FrobError::TruncationOverflow(format!("A^({j}) has degree {deg} >= {trunc}")));
            }
        }
        mats.push(a);
    }
    FrobFamily::new(ty.clone(), mats, trunc)
}

/// Random exact gauge matrices `P_j = Delta L U + v R_1 + v^2 R_2`, one per
/// embedding, with `Delta` a diagonal of signs.
pub fn random_gauge<R: Rng>(ty: &TameInertialType, rng: &mut R) -> Vec<Mat<TruncPoly>> {
    let n = ty.n();
    (0..ty.f())
        .map(|j| {
            let signs: Vec<TruncPoly> = (0..n).map(|_| tp(random_sign(rng))).collect();
            Mat::diagonal(&signs)
                .mul(&random_parabolic_unipotent(&parabolic_pattern(ty, j), rng))
                .add(&random_v_multiple(n, 2, rng))
        })
        .collect()
}

/// Random family built from Levi `C`-coordinates: class blocks with
/// diagonal entries `+-x{j}_{i} pi^k` (`k <= 2`) and, unless `diagonal`,
/// random integers off the diagonal inside each class. A random strictly
/// upper non-Levi part and random `v`-multiples are added in
/// `A`-coordinates; neither changes the Levi part mod `v`.
pub fn random_levi_c_family<R: Rng>(ty: &TameInertialType, trunc: usize, diagonal: bool, rng: &mut R) -> Result<FrobFamily, FrobError> {
    let n = ty.n();
    let mut mats = Vec::with_capacity(ty.f());
    for j in 0..ty.f() {
        let exps = ty.a_prime_twist(j);
        let cj = Mat::from_fn(n, n, |r, k| {
            if r == k {
                let pi = SymbolicScalar::pi_pow(rng.gen_range(0..=2));
                random_sign(rng).mul(&SymbolicScalar::var(&format!("x{j}_{r}"))).mul(&pi)
            } else if !diagonal && exps[r] == exps[k] {
                c(rng.gen_range(-2..=2))
            } else {
                c(0)
            }
        });
        let pattern = parabolic_pattern(ty, j);
        let inv = ty.orientation()[j].inverse();
        let levi = conj_perm(inv.images(), &cj.map(|x| tp(x.clone())));
        let upper = Mat::from_fn(n, n, |r, k| {
            if r < k && pattern[r] != pattern[k] {
                tp(c(rng.gen_range(-2..=2)))
            } else {
                TruncPoly::zero()
            }
        });
        mats.push(levi.add(&upper).add(&random_v_multiple(n, 2, rng)));
    }
    FrobFamily::new(ty.clone(), mats, trunc)
}

/// Random permutation of `n` letters.
pub(crate) fn random_perm<R: Rng>(n: usize, rng: &mut R) -> Perm {
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(rng);
    Perm::new(v).expect("shuffled indices")
}

/// Random tame type: a random `s_tau` and one random exponent
/// per orbit, propagated by `a'_{s_tau(i)} = q^{-1} a'_i`. Retries until the
/// characters along each orbit are distinct.
pub fn random_type<R: Rng>(p: u64, e: u32, f: usize, n: usize, rng: &mut R) -> Result<TameInertialType, FrobError> {
    for _ in 0..1000 {
        let s = random_perm(n, rng);
        let r = s.order();
        let q = (p as i64).pow(f as u32);
        let modulus = q.pow(r as u32) - 1;
        let q_inv = q.pow(r as u32 - 1) % modulus;
        let mut a = vec![0i64; n];
        for cycle in s.cycles() {
            let mut x = rng.gen_range(0..modulus);
            let mut i = cycle[0];
            for _ in 0..cycle.len() {
                a[i] = x;
                x = ((x as i128 * q_inv as i128) % modulus as i128) as i64;
                i = s.apply(i);
            }
        }
        if let Ok(t) = crate::tame_types::build_type(p, e, f, n, &a, &s) {
            return Ok(t);
        }
    }
    Err(FrobError::InvalidInput(format!("no tame type found for p={p}, f={f}, n={n}")))
}
