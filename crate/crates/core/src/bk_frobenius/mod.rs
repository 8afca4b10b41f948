//! Partial Frobenius families of Breuil–Kisin modules with tame descent
//! data, in `A`-coordinates over truncated polynomials in `v`.
//!
//! A family is one matrix `A^{(j)}` per embedding `j` in `0..f`, whose
//! reduction mod `v` lies in the parabolic `P_j` cut out by equal entries of
//! `s_or,j^{-1}(a'^{(j)})`. The global functions `f_{Ibar,d}` are built from
//! the Levi parts of these reductions.

mod bounded;
mod shape;
mod trunc;

use thiserror::Error;

use crate::hecke::{lowest_sum, n_lambda_bar};
use crate::matrix::{conj_perm, perm_matrix, Mat};
use crate::ring::{elementary_symmetric, Ring};
use crate::root_data::{Perm, RootDataError, Weight};
use crate::scalars::{FieldCtx, ScalarError, ScalarMonomial, SymbolicScalar};
use crate::tame_types::{TameInertialType, TameTypeError};

pub use bounded::{construct_bounded, default_trunc, random_gauge, random_levi_c_family, random_type, BoundedSpec};
pub use shape::{
    block_diag_elt, parabolic_factorization, random_factorizable, random_shape_input, shape_of, shape_setup, ParabolicFactorization, ShapeInput,
    ShapeSetup,
};
pub use trunc::{constant_mat, inverse_mod_v_pow, mod_v, truncate_mat, unit_inverse, TruncPoly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrobError {
    #[error("truncation order exceeded: {0}")]
    TruncationOverflow(String),
    #[error("matrix leaves the parabolic: {0}")]
    NotInParabolic(String),
    #[error("matrix is not invertible: {0}")]
    NotInvertible(String),
    #[error("degree out of range: {0}")]
    DegreeOutOfRange(String),
    #[error("family is not block-scalar: {0}")]
    NotBlockScalar(String),
    #[error("matrix does not factor: {0}")]
    NotFactorizable(String),
    #[error("identity check failed: {0}")]
    AssertionFailure(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    TameType(#[from] TameTypeError),
    #[error(transparent)]
    RootData(#[from] RootDataError),
}

/// Partial Frobenius matrices `A^{(j)}`, `j` in `0..f`, for a fixed type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrobFamily {
    ty: TameInertialType,
    a: Vec<Mat<TruncPoly>>,
    trunc: usize,
}

/// `s_or,j^{-1}(a'^{(j)})`, the weakly decreasing exponents that index
/// positions of `P_j`.
pub fn parabolic_pattern(ty: &TameInertialType, j: usize) -> Vec<i64> {
    ty.orientation()[j].inverse().act(&ty.a_prime_twist(j))
}

/// Whether a scalar matrix lies in `P_j`.
pub fn in_parabolic(ty: &TameInertialType, j: usize, m: &Mat<SymbolicScalar>) -> bool {
    let pat = parabolic_pattern(ty, j);
    let n = pat.len();
    (0..n).all(|r| (0..r).all(|c| pat[r] == pat[c] || m.get(r, c).is_zero()))
}

/// Projection of a matrix in `P_j` to its Levi factor.
pub fn levi_projection(ty: &TameInertialType, j: usize, m: &Mat<SymbolicScalar>) -> Mat<SymbolicScalar> {
    let pat = parabolic_pattern(ty, j);
    Mat::from_fn(m.rows(), m.cols(), |r, c| if pat[r] == pat[c] { m.get(r, c).clone() } else { SymbolicScalar::zero() })
}

impl FrobFamily {
    /// Wraps matrices after checking shapes and that each reduction mod `v`
    /// lies in `P_j`. Entries are reduced modulo `v^trunc`.
    pub fn new(ty: TameInertialType, a: Vec<Mat<TruncPoly>>, trunc: usize) -> Result<Self, FrobError> {
        let (n, f) = (ty.n(), ty.f());
        if a.len() != f || a.iter().any(|m| m.rows() != n || m.cols() != n) {
            return Err(FrobError::InvalidInput(format!("need {f} matrices of size {n}")));
        }
        if trunc == 0 {
            return Err(FrobError::InvalidInput("truncation order must be positive".into()));
        }
        let a: Vec<Mat<TruncPoly>> = a.iter().map(|m| truncate_mat(m, trunc)).collect();
        for (j, m) in a.iter().enumerate() {
            if !in_parabolic(&ty, j, &mod_v(m)) {
                return Err(FrobError::NotInParabolic(format!("A^({j}) mod v")));
            }
        }
        Ok(FrobFamily { ty, a, trunc })
    }

    /// Family from `C`-coordinates `C^{(j)}` that are block diagonal on
    /// classes of labels: `A^{(j)} = Ad(s_or,j^{-1})(C^{(j)})`.
    pub fn from_c_levi(ty: TameInertialType, c: &[Mat<SymbolicScalar>], trunc: usize) -> Result<Self, FrobError> {
        if c.len() != ty.f() {
            return Err(FrobError::InvalidInput(format!("need {} matrices", ty.f())));
        }
        let mut a = Vec::with_capacity(c.len());
        for (j, cj) in c.iter().enumerate() {
            let exps = ty.a_prime_twist(j);
            let n = ty.n();
            for r in 0..n {
                for k in 0..n {
                    if exps[r] != exps[k] && !cj.get(r, k).is_zero() {
                        return Err(FrobError::InvalidInput(format!("C^({j}) has an entry across classes at ({r},{k})")));
                    }
                }
            }
            let inv = ty.orientation()[j].inverse();
            a.push(constant_mat(&conj_perm(inv.images(), cj)));
        }
        FrobFamily::new(ty, a, trunc)
    }

    /// Family with diagonal `C`-coordinates, one vector of entries per `j`.
    pub fn from_c_diagonal(ty: TameInertialType, diag: &[Vec<SymbolicScalar>], trunc: usize) -> Result<Self, FrobError> {
        let c: Vec<Mat<SymbolicScalar>> = diag.iter().map(|d| Mat::diagonal(d)).collect();
        FrobFamily::from_c_levi(ty, &c, trunc)
    }

    pub fn ty(&self) -> &TameInertialType {
        &self.ty
    }

    pub fn matrices(&self) -> &[Mat<TruncPoly>] {
        &self.a
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    /// The same matrices read against another orientation of the type.
    pub fn with_type(&self, ty: TameInertialType) -> Result<Self, FrobError> {
        FrobFamily::new(ty, self.a.clone(), self.trunc)
    }
}

/// Full product `Ad(s_or,f-1)(A^{(f-1)}) ... Ad(s_or,0)(A^{(0)})` modulo
/// `v^trunc`.
pub fn frob_product(fam: &FrobFamily) -> Mat<TruncPoly> {
    let n = fam.ty.n();
    let mut acc = Mat::identity(n);
    for j in (0..fam.ty.f()).rev() {
        let moved = conj_perm(fam.ty.orientation()[j].images(), &fam.a[j]);
        acc = truncate_mat(&acc.mul(&moved), fam.trunc);
    }
    acc
}

/// Product of the Levi parts mod `v`, in label coordinates; block diagonal
/// on classes.
pub fn levi_frob_product(fam: &FrobFamily) -> Mat<SymbolicScalar> {
    let n = fam.ty.n();
    let mut acc = Mat::identity(n);
    for j in (0..fam.ty.f()).rev() {
        let levi = levi_projection(&fam.ty, j, &mod_v(&fam.a[j]));
        acc = acc.mul(&conj_perm(fam.ty.orientation()[j].images(), &levi));
    }
    acc
}

/// `P_{s_tau}^{-1}` times the Levi product: the Frobenius on the
/// reduction mod `v`, in label coordinates.
pub fn frob_matrix(fam: &FrobFamily) -> Mat<SymbolicScalar> {
    let s_inv = fam.ty.s_tau().inverse();
    perm_matrix::<SymbolicScalar>(s_inv.images()).mul(&levi_frob_product(fam))
}

/// The class of labels used to read off `f` for an orbit group, and the
/// orbit size `#I`.
fn group_block(ty: &TameInertialType, group: usize) -> Result<(Vec<usize>, usize), FrobError> {
    let groups = ty.orbit_groups();
    let g = groups
        .get(group)
        .ok_or_else(|| FrobError::DegreeOutOfRange(format!("no orbit group {group} (have {})", groups.len())))?;
    let orbit = &ty.orbits()[g[0]];
    let first = orbit[0];
    let class = ty
        .classes()
        .iter()
        .find(|c| c.contains(&first))
        .expect("every label has a class")
        .clone();
    Ok((class, orbit.len()))
}

/// `f_{Ibar,d}`: the degree-`d` principal minor sum of the `#I`-th power of
/// the Frobenius, restricted to one class of `Ibar`.
pub fn f_function(fam: &FrobFamily, group: usize, d: usize) -> Result<SymbolicScalar, FrobError> {
    let (class, size) = group_block(&fam.ty, group)?;
    if d == 0 || d > class.len() {
        return Err(FrobError::DegreeOutOfRange(format!("degree {d} for a class of {} labels", class.len())));
    }
    let frob = frob_matrix(fam);
    let mut power = Mat::identity(frob.rows());
    for _ in 0..size {
        power = power.mul(&frob);
    }
    Ok(power.submatrix(&class, &class).principal_minor_sum(d))
}

/// `prod_Ibar f_{Ibar, d_Ibar}`.
pub fn f_product(fam: &FrobFamily, groups: &[usize], d: &[usize]) -> Result<SymbolicScalar, FrobError> {
    check_degrees(groups, d)?;
    groups.iter().zip(d).try_fold(SymbolicScalar::one(), |acc, (&g, &dg)| Ok(acc.mul(&f_function(fam, g, dg)?)))
}

fn check_degrees(groups: &[usize], d: &[usize]) -> Result<(), FrobError> {
    if groups.len() != d.len() {
        return Err(FrobError::DegreeOutOfRange("one degree per chosen group".into()));
    }
    let mut seen = groups.to_vec();
    seen.sort_unstable();
    seen.dedup();
    if seen.len() != groups.len() {
        return Err(FrobError::DegreeOutOfRange("groups must be distinct".into()));
    }
    Ok(())
}

/// `D = sum d_Ibar #I`, the total number of labels picked.
pub fn total_degree(ty: &TameInertialType, groups: &[usize], d: &[usize]) -> Result<usize, FrobError> {
    groups.iter().zip(d).try_fold(0usize, |acc, (&g, &dg)| {
        let (_, size) = group_block(ty, g)?;
        Ok(acc + dg * size)
    })
}

/// `pi^{-<lambda, w_0 omega_D>} q^{-D(D-1)/2} prod f_{Ibar, d_Ibar}`, where
/// `lambda` has one component per embedding of `K` (`e f` of them).
pub fn f_tilde(fam: &FrobFamily, groups: &[usize], d: &[usize], lambda: &Weight) -> Result<SymbolicScalar, FrobError> {
    let prod = f_product(fam, groups, d)?;
    let big_d = total_degree(&fam.ty, groups, d)?;
    Ok(prod.mul_monomial(&normalizer(lambda, big_d)))
}

fn normalizer(lambda: &Weight, big_d: usize) -> ScalarMonomial {
    ScalarMonomial {
        pi_exp: -lowest_sum(lambda, big_d),
        q_exp_doubled: -((big_d * big_d.saturating_sub(1)) as i64),
        ..Default::default()
    }
}

/// Whether `prod f_{Ibar,d_Ibar}` has valuation at least `n_lambda(D)`.
pub fn divisibility_check(fam: &FrobFamily, groups: &[usize], d: &[usize], lambda: &Weight) -> Result<bool, FrobError> {
    let ty = &fam.ty;
    if lambda.f() != ty.f() * ty.e() as usize || lambda.n() != ty.n() {
        return Err(FrobError::InvalidInput(format!("lambda needs {} components of length {}", ty.f() * ty.e() as usize, ty.n())));
    }
    let prod = f_product(fam, groups, d)?;
    let big_d = total_degree(ty, groups, d)?;
    let ctx = FieldCtx::new(ty.p(), ty.e(), ty.f() as u32);
    Ok(match prod.valuation(&ctx) {
        None => true,
        Some(v) => v.doubled() >= 2 * n_lambda_bar(big_d, lambda),
    })
}

/// Apply a gauge change `P_j` in the parabolic loop group.
///
/// The new matrices are `P_j A^{(j)} X_j` where `X_j` is
/// `Ad(s_or,j^{-1}) Ad(v^{c^{(j)}}) Ad(s_or,j-1)(phi(P_{j-1})^{-1})` with
/// `c^{(j)} = (p a'^{(j-1)} - a'^{(j)}) / (p^{f'} - 1)`, and `j - 1` read as
/// `f' - 1` (orientation and exponents) and `f - 1` (matrix) for `j = 0`.
pub fn change_eigenbasis(fam: &FrobFamily, p_mats: &[Mat<TruncPoly>]) -> Result<FrobFamily, FrobError> {
    let ty = &fam.ty;
    let (n, f, fp) = (ty.n(), ty.f(), ty.f_prime());
    if p_mats.len() != f || p_mats.iter().any(|m| m.rows() != n || m.cols() != n) {
        return Err(FrobError::InvalidInput(format!("need {f} gauge matrices of size {n}")));
    }
    for (j, pj) in p_mats.iter().enumerate() {
        if !in_parabolic(ty, j, &mod_v(pj)) {
            return Err(FrobError::NotInParabolic(format!("P_{j} mod v")));
        }
    }
    let p = ty.p() as usize;
    let modulus = ty.modulus();
    let trunc = fam.trunc;
    let mut out = Vec::with_capacity(f);
    for j in 0..f {
        let prev_or = if j == 0 { fp - 1 } else { j - 1 };
        let prev_mat = if j == 0 { f - 1 } else { j - 1 };
        let prev_exps = ty.a_prime_twist(prev_or);
        let exps = ty.a_prime_twist(j);
        let carries: Vec<i64> = prev_exps
            .iter()
            .zip(&exps)
            .map(|(&a_prev, &a)| {
                let num = p as i64 * a_prev - a;
                debug_assert_eq!(num % modulus, 0, "twists differ by a multiple of the modulus");
                num / modulus
            })
            .collect();
        let max_shift = carries.iter().max().unwrap_or(&0) - carries.iter().min().unwrap_or(&0);
        let phi_p = p_mats[prev_mat].map(|x| x.phi(p));
        let inv = inverse_mod_v_pow(&phi_p, trunc + max_shift as usize)?;
        let labelled = conj_perm(ty.orientation()[prev_or].images(), &inv);
        let mut scaled = Mat::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                scaled.set(r, c, labelled.get(r, c).shift(carries[r] - carries[c])?);
            }
        }
        let x = conj_perm(ty.orientation()[j].inverse().images(), &scaled);
        if !in_parabolic(ty, j, &mod_v(&x)) {
            return Err(FrobError::NotInParabolic(format!("twisted inverse gauge at j={j}")));
        }
        out.push(truncate_mat(&p_mats[j].mul(&fam.a[j]).mul(&x), trunc));
    }
    FrobFamily::new(ty.clone(), out, trunc)
}

/// Frobenius data of a block-scalar family or of a chosen lift: one
/// `det(phi_I(Frob))` per orbit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WDDatum {
    orbit_sizes: Vec<usize>,
    groups: Vec<Vec<usize>>,
    det_frob: Vec<SymbolicScalar>,
}

impl WDDatum {
    pub fn new(ty: &TameInertialType, det_frob: Vec<SymbolicScalar>) -> Result<Self, FrobError> {
        if det_frob.len() != ty.orbits().len() {
            return Err(FrobError::InvalidInput(format!("need one determinant per orbit ({})", ty.orbits().len())));
        }
        Ok(WDDatum {
            orbit_sizes: ty.orbits().iter().map(Vec::len).collect(),
            groups: ty.orbit_groups().to_vec(),
            det_frob,
        })
    }

    /// The lift with `phi_i(Frob) = q^{i} t~_i` (0-based `i`) on a principal
    /// series type, variables named `tt{i+1}`.
    pub fn principal_series_lift(ty: &TameInertialType) -> Result<Self, FrobError> {
        if !ty.is_principal_series() {
            return Err(FrobError::InvalidInput("lift data is defined for principal series types".into()));
        }
        let dets = (0..ty.n()).map(|i| SymbolicScalar::q_pow(i as i64).mul(&lift_var(i))).collect();
        WDDatum::new(ty, dets)
    }

    pub fn det_frob(&self) -> &[SymbolicScalar] {
        &self.det_frob
    }

    /// Eigenvalue of `Frob^{#I}` on the orbit line, `(-1)^{#I-1} det`.
    pub fn frob_power_eigenvalue(&self, orbit: usize) -> SymbolicScalar {
        let det = &self.det_frob[orbit];
        if self.orbit_sizes[orbit].is_multiple_of(2) {
            det.neg()
        } else {
            det.clone()
        }
    }

    /// `prod_Ibar sym_{d_Ibar}` of the Frobenius-power eigenvalues.
    pub fn sym_value(&self, groups: &[usize], d: &[usize]) -> Result<SymbolicScalar, FrobError> {
        self.sym_with(groups, d, |i| self.frob_power_eigenvalue(i))
    }

    /// Same product with the determinants taken literally.
    pub fn literal_sym_value(&self, groups: &[usize], d: &[usize]) -> Result<SymbolicScalar, FrobError> {
        self.sym_with(groups, d, |i| self.det_frob[i].clone())
    }

    fn sym_with(&self, groups: &[usize], d: &[usize], value: impl Fn(usize) -> SymbolicScalar) -> Result<SymbolicScalar, FrobError> {
        check_degrees(groups, d)?;
        let mut acc = SymbolicScalar::one();
        for (&g, &dg) in groups.iter().zip(d) {
            let orbits = self
                .groups
                .get(g)
                .ok_or_else(|| FrobError::DegreeOutOfRange(format!("no orbit group {g}")))?;
            if dg == 0 || dg > orbits.len() {
                return Err(FrobError::DegreeOutOfRange(format!("degree {dg} for {} orbits", orbits.len())));
            }
            let vals: Vec<SymbolicScalar> = orbits.iter().map(|&i| value(i)).collect();
            acc = acc.mul(&elementary_symmetric(&vals, dg));
        }
        Ok(acc)
    }

    /// Total number of labels picked by `(groups, d)`.
    pub fn total_degree(&self, groups: &[usize], d: &[usize]) -> usize {
        groups.iter().zip(d).map(|(&g, &dg)| dg * self.orbit_sizes[self.groups[g][0]]).sum()
    }
}

/// Name of the `i`-th lift variable (0-based `i`).
pub fn lift_var(i: usize) -> SymbolicScalar {
    SymbolicScalar::var(&format!("tt{}", i + 1))
}

/// Per-orbit determinants of a family whose Levi product is diagonal.
pub fn wd_datum(fam: &FrobFamily) -> Result<WDDatum, FrobError> {
    let m = levi_frob_product(fam);
    let n = m.rows();
    for r in 0..n {
        for c in 0..n {
            if r != c && !m.get(r, c).is_zero() {
                return Err(FrobError::NotBlockScalar(format!("Levi product has entry ({r},{c})")));
            }
        }
    }
    let dets = fam
        .ty
        .orbits()
        .iter()
        .map(|orbit| {
            let prod = orbit.iter().fold(SymbolicScalar::one(), |acc, &i| acc.mul(m.get(i, i)));
            if orbit.len() % 2 == 0 {
                prod.neg()
            } else {
                prod
            }
        })
        .collect();
    WDDatum::new(&fam.ty, dets)
}

/// Whether the normalized product of symmetric functions of the WD datum
/// is a unit: `pi^{-<lambda, w_0 omega_D>} q^{-D(D-1)/2} prod sym_d` must
/// have valuation exactly 0 and reduce to a nonzero value.
pub fn reducibility_check(wd: &WDDatum, groups: &[usize], d: &[usize], lambda: &Weight, ctx: &FieldCtx) -> Result<bool, FrobError> {
    let value = wd.sym_value(groups, d)?;
    let big_d = wd.total_degree(groups, d);
    let scaled = value.mul_monomial(&normalizer(lambda, big_d));
    match scaled.valuation(ctx) {
        Some(v) if v.doubled() == 0 => match scaled.reduce_mod_varpi(ctx) {
            Ok(r) => Ok(!r.is_zero()),
            Err(ScalarError::UnitAmbiguity(_)) => Ok(false),
            Err(e) => Err(e.into()),
        },
        _ => Ok(false),
    }
}

/// Relabel a permutation-indexed family under another orientation: the
/// same `C`-coordinates give `A^{(j)} = Ad(s'_or,j^{-1} s_or,j)(A^{(j)})`.
pub fn reorient(fam: &FrobFamily, orientation: Vec<Perm>) -> Result<FrobFamily, FrobError> {
    let ty = fam.ty.with_orientation(orientation)?;
    let a = (0..fam.ty.f())
        .map(|j| {
            let change = ty.orientation()[j].inverse().compose(&fam.ty.orientation()[j]);
            conj_perm(change.images(), &fam.a[j])
        })
        .collect();
    FrobFamily::new(ty, a, fam.trunc)
}

#[cfg(test)]
mod tests;
