//! Integral and mod-p Hecke algebras of tame types in Laurent coordinates.
//!
//! A level is the ordered list of `s_tau`-orbits (consecutive blocks of
//! `1..n`) grouped into equivalence classes. Hecke elements are Laurent
//! polynomials in one variable `x_I` per orbit, normalized so that the operator
//! `T_{-eps_S}` for a set `S` of orbits of total size `d` is
//! `pi^{-<lambda, w_0 omega_d>} q^{-d(d-1)/2} prod_{I in S} x_I`.
//!
//! Scalars relating operators are powers of `q` tracked with doubled exponents.
//! The scalar `c(mu)` with `t_P(t_mu) = c(mu) T_mu` is computed from the
//! convolution formula after splitting `mu` into a dominant and an antidominant
//! part; all other normalizations are derived from it.

use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::laurent::LaurentPoly;
use crate::root_data::Weight;
use crate::scalars::{FieldCtx, ScalarError, ScalarMonomial, SymbolicScalar};
use crate::tame_types::TameInertialType;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HeckeError {
    #[error("cocharacter {0:?} is not central in the Levi")]
    NotCentral(Vec<i64>),
    #[error("order is not compatible with the exponents: {0}")]
    InvalidOrder(String),
    #[error("degree out of range: {0}")]
    DegreeOutOfRange(String),
    #[error("element is not symmetric under the class permutations")]
    NotSymmetric,
    #[error("element is not integral: {0}")]
    NotIntegral(String),
    #[error("level is not regular (some class contains several orbits)")]
    NotRegular,
    #[error("invalid level: {0}")]
    InvalidLevel(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Orbit sizes (in block order) and equivalence classes of orbits.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LevelData {
    sizes: Vec<usize>,
    groups: Vec<Vec<usize>>,
}

impl LevelData {
    pub fn new(sizes: Vec<usize>, groups: Vec<Vec<usize>>) -> Result<Self, HeckeError> {
        if sizes.is_empty() || sizes.contains(&0) {
            return Err(HeckeError::InvalidLevel(format!("bad orbit sizes {sizes:?}")));
        }
        let mut seen: Vec<usize> = groups.iter().flatten().copied().collect();
        seen.sort_unstable();
        if seen != (0..sizes.len()).collect::<Vec<_>>() {
            return Err(HeckeError::InvalidLevel(format!("{groups:?} does not partition the orbits")));
        }
        if groups.iter().any(|g| g.iter().any(|&k| sizes[k] != sizes[g[0]])) {
            return Err(HeckeError::InvalidLevel("equivalent orbits must have equal size".into()));
        }
        Ok(LevelData { sizes, groups })
    }

    /// Regular principal series level: `n` singleton orbits, each its own class.
    pub fn principal_series(n: usize) -> Self {
        LevelData { sizes: vec![1; n], groups: (0..n).map(|k| vec![k]).collect() }
    }

    pub fn from_type(t: &TameInertialType) -> Result<Self, HeckeError> {
        let orbits = t.orbits();
        let mut order: Vec<usize> = (0..orbits.len()).collect();
        order.sort_by_key(|&k| orbits[k][0]);
        let mut start = 0;
        for &k in &order {
            if orbits[k][0] != start || orbits[k].iter().enumerate().any(|(x, &i)| i != start + x) {
                return Err(HeckeError::InvalidLevel("orbits are not consecutive blocks".into()));
            }
            start += orbits[k].len();
        }
        let position = |k: usize| order.iter().position(|&x| x == k).expect("orbit listed");
        let sizes = order.iter().map(|&k| orbits[k].len()).collect();
        let groups = t.orbit_groups().iter().map(|g| g.iter().map(|&k| position(k)).collect()).collect();
        Self::new(sizes, groups)
    }

    pub fn n(&self) -> usize {
        self.sizes.iter().sum()
    }

    pub fn num_orbits(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn is_regular(&self) -> bool {
        self.groups.iter().all(|g| g.len() == 1)
    }

    fn block_of(&self) -> Vec<usize> {
        self.sizes.iter().enumerate().flat_map(|(b, &s)| std::iter::repeat_n(b, s)).collect()
    }

    /// The cocharacter `sum_I c_I eps_I` as an `n`-vector.
    pub fn expand(&self, c: &[i64]) -> Vec<i64> {
        self.block_of().iter().map(|&b| c[b]).collect()
    }

    fn check_central(&self, mu: &[i64]) -> Result<(), HeckeError> {
        let blocks = self.block_of();
        if mu.len() != blocks.len() || (1..mu.len()).any(|i| blocks[i] == blocks[i - 1] && mu[i] != mu[i - 1]) {
            return Err(HeckeError::NotCentral(mu.to_vec()));
        }
        Ok(())
    }

    /// Every permutation of orbit labels preserving the classes.
    pub fn symmetries(&self) -> Vec<Vec<usize>> {
        let mut out = vec![(0..self.num_orbits()).collect::<Vec<_>>()];
        for g in &self.groups {
            let mut next = Vec::new();
            for base in &out {
                for perm in g.iter().permutations(g.len()) {
                    let mut v = base.clone();
                    for (&from, &to) in g.iter().zip(perm) {
                        v[from] = to;
                    }
                    next.push(v);
                }
            }
            out = next;
        }
        out
    }
}

fn is_dominant(v: &[i64]) -> bool {
    v.windows(2).all(|w| w[0] >= w[1])
}

fn is_antidominant(v: &[i64]) -> bool {
    v.windows(2).all(|w| w[0] <= w[1])
}

/// Pairs `(i, k)`, `i < k`, in different blocks.
fn unipotent_roots(level: &LevelData) -> Vec<(usize, usize)> {
    let blocks = level.block_of();
    let n = blocks.len();
    (0..n).flat_map(|i| (i + 1..n).map(move |k| (i, k))).filter(|&(i, k)| blocks[i] != blocks[k]).collect()
}

/// `2 <rho_N, mu>`.
fn rho_n_doubled(level: &LevelData, mu: &[i64]) -> i64 {
    unipotent_roots(level).iter().map(|&(i, k)| mu[i] - mu[k]).sum()
}

/// Exponent of `q` in `T_{mu1} T_{mu2}` for `mu1` dominant and `mu2` antidominant.
fn dom_antidom_exponent(level: &LevelData, mu1: &[i64], mu2: &[i64]) -> i64 {
    unipotent_roots(level)
        .iter()
        .map(|&(i, k)| (mu1[i] - mu1[k]) - (mu1[i] + mu2[i] - mu1[k] - mu2[k]).max(0))
        .sum()
}

/// Split `mu = mu_+ + mu_-` with `mu_+` dominant, `mu_-` antidominant, both
/// central in the Levi, along the fundamental coweights at block boundaries.
fn split(level: &LevelData, mu: &[i64]) -> (Vec<i64>, Vec<i64>) {
    let n = mu.len();
    let mut plus = vec![0i64; n];
    let mut minus = vec![0i64; n];
    for i in 0..n {
        let d = if i + 1 < n { mu[i] - mu[i + 1] } else { mu[i] };
        let target = if d >= 0 || i + 1 == n { &mut plus } else { &mut minus };
        for t in target.iter_mut().take(i + 1) {
            *t += d;
        }
    }
    debug_assert!(level.check_central(&plus).is_ok());
    (plus, minus)
}

/// Doubled exponent of `c(mu)`, where `t_P(t_mu) = c(mu) T_mu`.
fn tp_doubled(level: &LevelData, mu: &[i64]) -> i64 {
    let (plus, minus) = split(level, mu);
    -rho_n_doubled(level, &plus) + rho_n_doubled(level, &minus) + 2 * dom_antidom_exponent(level, &plus, &minus)
}

/// `c(mu)` with `t_P(t_mu) = c(mu) T_mu`, for `mu` central in the Levi.
pub fn tp_scalar(level: &LevelData, mu: &[i64]) -> Result<SymbolicScalar, HeckeError> {
    level.check_central(mu)?;
    Ok(SymbolicScalar::q_half_pow(tp_doubled(level, mu)))
}

/// `T_{mu1} T_{mu2} = scalar * T_{mu1 + mu2}` for `mu1, mu2` central in the Levi.
pub fn conv_tt(mu1: &Weight, mu2: &Weight, level: &LevelData) -> Result<(SymbolicScalar, Weight), HeckeError> {
    let (a, b) = (mu1.comp(0), mu2.comp(0));
    level.check_central(a)?;
    level.check_central(b)?;
    let sum: Vec<i64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
    let doubled = tp_doubled(level, &sum) - tp_doubled(level, a) - tp_doubled(level, b);
    Ok((SymbolicScalar::q_half_pow(doubled), Weight::single(sum)))
}

/// The scalar of the convolution formula for a covered pair, or `None` when
/// neither case of the formula applies.
pub fn conv_formula_direct(mu1: &[i64], mu2: &[i64], level: &LevelData) -> Option<SymbolicScalar> {
    if (is_dominant(mu1) && is_dominant(mu2)) || (is_antidominant(mu1) && is_antidominant(mu2)) {
        Some(SymbolicScalar::one())
    } else if is_dominant(mu1) && is_antidominant(mu2) {
        Some(SymbolicScalar::q_pow(dom_antidom_exponent(level, mu1, mu2)))
    } else {
        None
    }
}

/// `q^{-#I (n - #I)}`, the scalar with `T_{eps_I}^{-1} = scalar * T_{-eps_I}`.
pub fn t_inverse_scalar(size: usize, n: usize) -> SymbolicScalar {
    SymbolicScalar::q_pow(-((size * (n - size)) as i64))
}

/// `q^{-#I (n - #I) / 2}`, the scalar with `t_P(t_{eps_I}) = scalar * T_{eps_I}`.
pub fn tp_image_scalar(size: usize, n: usize) -> SymbolicScalar {
    SymbolicScalar::q_half_pow(-((size * (n - size)) as i64))
}

/// `q^{sum_I c_I #I sum_{I < J} #J}` relating `prod T_{-eps_I}^{c_I}` to
/// `T_{-mu}`. `order` lists orbit indices from smallest to largest.
pub fn product_formula_scalar(level: &LevelData, c: &[u64], order: &[usize]) -> Result<SymbolicScalar, HeckeError> {
    let k = level.num_orbits();
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if c.len() != k || sorted != (0..k).collect::<Vec<_>>() {
        return Err(HeckeError::InvalidOrder(format!("{order:?} is not an order on {k} orbits")));
    }
    if order.windows(2).any(|w| c[w[0]] > c[w[1]]) {
        return Err(HeckeError::InvalidOrder(format!("{order:?} does not increase the exponents {c:?}")));
    }
    let sizes = level.sizes();
    let exp: u64 = order
        .iter()
        .enumerate()
        .map(|(pos, &i)| c[i] * sizes[i] as u64 * order[pos + 1..].iter().map(|&j| sizes[j] as u64).sum::<u64>())
        .sum();
    Ok(SymbolicScalar::q_pow(exp as i64))
}

/// The same scalar computed from `c(mu)`: `prod c(-eps_I)^{-c_I} * c(-mu)`.
pub fn product_scalar_by_iteration(level: &LevelData, c: &[i64]) -> SymbolicScalar {
    let mu: Vec<i64> = level.expand(c).iter().map(|x| -x).collect();
    let mut doubled = tp_doubled(level, &mu);
    for (i, &ci) in c.iter().enumerate() {
        let mut e = vec![0i64; level.num_orbits()];
        e[i] = -1;
        doubled -= ci * tp_doubled(level, &level.expand(&e));
    }
    SymbolicScalar::q_half_pow(doubled)
}

/// `n(S) = N(N-1)/2 - sum_{I in S} #I(#I-1)/2` with `N = sum #I`.
pub fn n_of(sizes: &[usize]) -> i64 {
    let total: i64 = sizes.iter().map(|&s| s as i64).sum();
    total * (total - 1) / 2 - sizes.iter().map(|&s| (s * s.saturating_sub(1) / 2) as i64).sum::<i64>()
}

/// Sum over embeddings of the sum of the `d` smallest entries of `lambda_j`,
/// i.e. `sum_j <lambda_j, w_0 omega_d>` for dominant `lambda`.
pub fn lowest_sum(lambda: &Weight, d: usize) -> i64 {
    lambda
        .comps()
        .iter()
        .map(|c| {
            let mut v = c.clone();
            v.sort_unstable();
            v.iter().take(d).sum::<i64>()
        })
        .sum()
}

/// `n_lambda(S) = sum_j <lambda_j, w_0 omega_N> - sum_{I in S} <lambda_j, w_0 omega_{#I}>`.
pub fn n_lambda_of(sizes: &[usize], lambda: &Weight) -> i64 {
    let total: usize = sizes.iter().sum();
    lowest_sum(lambda, total) - sizes.iter().map(|&s| lowest_sum(lambda, s)).sum::<i64>()
}

/// `sum_j sum_{k<d} (lambda_{j, n-k} + k)`, the exponent of `pi` in the
/// normalization of a degree-`d` Frobenius invariant.
pub fn n_lambda_bar(d: usize, lambda: &Weight) -> i64 {
    let eta_part = (d * d.saturating_sub(1) / 2) as i64 * lambda.f() as i64;
    lowest_sum(lambda, d) + eta_part
}

/// Minimum of `<lambda, w mu>` over the Weyl group, summed over embeddings.
fn min_pairing(lambda: &Weight, mu: &[i64]) -> i64 {
    let mut m = mu.to_vec();
    m.sort_unstable();
    lambda
        .comps()
        .iter()
        .map(|c| {
            let mut l = c.clone();
            l.sort_unstable_by(|a, b| b.cmp(a));
            l.iter().zip(&m).map(|(a, b)| a * b).sum::<i64>()
        })
        .sum()
}

/// Coefficient `kappa` with `B_c = kappa * x^c`, where `B_c` is the integral
/// basis operator `T_{-mu}` for `mu = sum_I c_I eps_I`.
pub fn basis_coefficient(level: &LevelData, lambda: &Weight, c: &[i64]) -> ScalarMonomial {
    let mu = level.expand(c);
    let neg: Vec<i64> = mu.iter().map(|x| -x).collect();
    let mut doubled = -tp_doubled(level, &neg);
    for (i, &ci) in c.iter().enumerate() {
        let mut e = vec![0i64; level.num_orbits()];
        e[i] = -1;
        doubled += ci * tp_doubled(level, &level.expand(&e));
        let s = level.sizes()[i] as i64;
        doubled -= ci * s * (s - 1);
    }
    ScalarMonomial { pi_exp: -min_pairing(lambda, &mu), q_exp_doubled: doubled, ..Default::default() }
}

/// An element of the Hecke algebra of a tame type, possibly twisted by an
/// algebraic weight `lambda`, in normalized orbit variables.
#[derive(Debug, Clone, PartialEq)]
pub struct HeckeElt {
    level: LevelData,
    lambda: Weight,
    poly: LaurentPoly<SymbolicScalar>,
}

impl HeckeElt {
    pub fn zero(level: &LevelData, lambda: &Weight) -> Self {
        HeckeElt { level: level.clone(), lambda: lambda.clone(), poly: LaurentPoly::zero(level.num_orbits()) }
    }

    pub fn from_poly(level: &LevelData, lambda: &Weight, poly: LaurentPoly<SymbolicScalar>) -> Self {
        assert_eq!(poly.nvars(), level.num_orbits());
        HeckeElt { level: level.clone(), lambda: lambda.clone(), poly }
    }

    /// The basis operator `T_{-mu}`, `mu = sum c_I eps_I`.
    pub fn basis(level: &LevelData, lambda: &Weight, c: &[i64]) -> Self {
        let coeff = SymbolicScalar::term(1, basis_coefficient(level, lambda, c));
        Self::from_poly(level, lambda, LaurentPoly::monomial(coeff, c.to_vec()))
    }

    pub fn level(&self) -> &LevelData {
        &self.level
    }

    pub fn lambda(&self) -> &Weight {
        &self.lambda
    }

    pub fn poly(&self) -> &LaurentPoly<SymbolicScalar> {
        &self.poly
    }

    pub fn add(&self, other: &Self) -> Self {
        HeckeElt { poly: self.poly.add(&other.poly), ..self.clone() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        HeckeElt { poly: self.poly.mul(&other.poly), ..self.clone() }
    }

    pub fn scale(&self, c: &SymbolicScalar) -> Self {
        HeckeElt { poly: self.poly.scale(c), ..self.clone() }
    }

    /// Invariance under every class-preserving permutation of orbits.
    pub fn is_symmetric(&self) -> bool {
        self.level.symmetries().iter().all(|s| self.poly.permute_vars(s) == self.poly)
    }
}

impl fmt::Display for HeckeElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .poly
            .terms()
            .map(|(e, c)| {
                let mut parts = vec![format!("({c})")];
                for (i, &x) in e.iter().enumerate() {
                    match x {
                        0 => {}
                        1 => parts.push(format!("x{i}")),
                        _ => parts.push(format!("x{i}^{x}")),
                    }
                }
                parts.join("*")
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// The normalized generator `T_{Ibar, (d)}`: the sum of `T_{-eps_S}` over sets
/// `S` of orbits meeting each chosen class `Ibar` in `d_Ibar` orbits.
pub fn generator(level: &LevelData, lambda: &Weight, classes: &[usize], d: &[usize]) -> Result<HeckeElt, HeckeError> {
    if classes.len() != d.len() || classes.iter().any(|&g| g >= level.groups().len()) {
        return Err(HeckeError::DegreeOutOfRange("one degree per chosen class".into()));
    }
    for (&g, &dg) in classes.iter().zip(d) {
        if dg == 0 || dg > level.groups()[g].len() {
            return Err(HeckeError::DegreeOutOfRange(format!("degree {dg} for a class of {} orbits", level.groups()[g].len())));
        }
    }
    let choices: Vec<Vec<Vec<usize>>> =
        classes.iter().zip(d).map(|(&g, &dg)| level.groups()[g].iter().copied().combinations(dg).collect()).collect();
    let mut acc = HeckeElt::zero(level, lambda);
    for pick in choices.iter().multi_cartesian_product() {
        let mut c = vec![0i64; level.num_orbits()];
        for &i in pick.iter().copied().flatten() {
            c[i] = 1;
        }
        acc = acc.add(&HeckeElt::basis(level, lambda, &c));
    }
    if classes.is_empty() {
        acc = HeckeElt::basis(level, lambda, &vec![0; level.num_orbits()]);
    }
    Ok(acc)
}

/// The closed form `pi^{-<lambda, w_0 omega_d>} q^{-d(d-1)/2} prod sym_{d_Ibar}`.
pub fn generator_closed_form(level: &LevelData, lambda: &Weight, classes: &[usize], d: &[usize]) -> HeckeElt {
    let k = level.num_orbits();
    let d_tot: usize = classes.iter().zip(d).map(|(&g, &dg)| dg * level.sizes()[level.groups()[g][0]]).sum();
    let scalar = SymbolicScalar::term(
        1,
        ScalarMonomial {
            pi_exp: -lowest_sum(lambda, d_tot),
            q_exp_doubled: -((d_tot * d_tot.saturating_sub(1)) as i64),
            ..Default::default()
        },
    );
    let mut poly = LaurentPoly::constant(k, scalar);
    for (&g, &dg) in classes.iter().zip(d) {
        let vars: Vec<LaurentPoly<SymbolicScalar>> = level.groups()[g].iter().map(|&i| LaurentPoly::var(k, i)).collect();
        let mut e = LaurentPoly::zero(k);
        for subset in vars.iter().combinations(dg) {
            e = e.add(&subset.into_iter().fold(LaurentPoly::one(k), |a, b| a.mul(b)));
        }
        poly = poly.mul(&e);
    }
    HeckeElt::from_poly(level, lambda, poly)
}

/// The inverse of the full generator, `T_{eps_all}`.
pub fn inverse_generator(level: &LevelData, lambda: &Weight) -> HeckeElt {
    HeckeElt::basis(level, lambda, &vec![-1; level.num_orbits()])
}

/// Coordinates of `h` in the basis of operators `T_{-mu}`: one entry per
/// monomial `x^c`, holding the coefficient of `B_c`.
pub fn basis_coordinates(h: &HeckeElt) -> Vec<(Vec<i64>, SymbolicScalar)> {
    h.poly
        .terms()
        .map(|(e, a)| {
            let inv = basis_coefficient(&h.level, &h.lambda, e).inverse();
            (e.clone(), a.mul_monomial(&inv))
        })
        .collect()
}

/// Whether a symmetric `h` lies in the integral Hecke algebra: every basis
/// coordinate has nonnegative `pi` and `q` exponents.
pub fn integral_membership(h: &HeckeElt) -> Result<bool, HeckeError> {
    if !h.is_symmetric() {
        return Err(HeckeError::NotSymmetric);
    }
    Ok(basis_coordinates(h)
        .iter()
        .all(|(_, a)| a.terms().all(|(m, _)| m.pi_exp >= 0 && m.q_exp_doubled >= 0)))
}

/// An element of `F_p[y_1, ..., y_{n-1}, y_n^{+-1}]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModPHeckeElt {
    p: u64,
    poly: LaurentPoly<i128>,
}

impl ModPHeckeElt {
    pub fn new(p: u64, poly: LaurentPoly<i128>) -> Result<Self, HeckeError> {
        let n = poly.nvars();
        if poly.terms().any(|(e, _)| e[..n.saturating_sub(1)].iter().any(|&x| x < 0)) {
            return Err(HeckeError::InvalidLevel("only y_n may have negative exponent".into()));
        }
        Ok(Self::reduced(p, poly))
    }

    fn reduced(p: u64, poly: LaurentPoly<i128>) -> Self {
        ModPHeckeElt { p, poly: poly.map_coeffs(|c| c.rem_euclid(p as i128)) }
    }

    pub fn zero(p: u64, n: usize) -> Self {
        ModPHeckeElt { p, poly: LaurentPoly::zero(n) }
    }

    /// `y^d` for an exponent vector `d`.
    pub fn monomial(p: u64, d: Vec<i64>) -> Result<Self, HeckeError> {
        Self::new(p, LaurentPoly::monomial(1, d))
    }

    pub fn n(&self) -> usize {
        self.poly.nvars()
    }

    pub fn poly(&self) -> &LaurentPoly<i128> {
        &self.poly
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::reduced(self.p, self.poly.add(&other.poly))
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::reduced(self.p, self.poly.mul(&other.poly))
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }
}

impl fmt::Display for ModPHeckeElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .poly
            .terms()
            .map(|(e, c)| {
                let mut parts = vec![c.to_string()];
                for (i, &x) in e.iter().enumerate() {
                    match x {
                        0 => {}
                        1 => parts.push(format!("y{}", i + 1)),
                        _ => parts.push(format!("y{}^{x}", i + 1)),
                    }
                }
                parts.join("*")
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// `[y_1, ..., y_n]`, the Satake images of `T_{-omega_i}`.
pub fn satake_generators(p: u64, n: usize) -> Vec<ModPHeckeElt> {
    (0..n)
        .map(|i| {
            let mut d = vec![0; n];
            d[i] = 1;
            ModPHeckeElt::monomial(p, d).expect("nonnegative exponents")
        })
        .collect()
}

/// Reduction to the mod-p Hecke algebra of a weight in the constituent set.
///
/// The basis operator `T_{-mu}` goes to `prod y_i^{d_i}` when
/// `mu = sum d_i omega_i` is dominant and to zero otherwise; coefficients are
/// reduced modulo the maximal ideal.
pub fn reduction_map(h: &HeckeElt, ctx: &FieldCtx) -> Result<ModPHeckeElt, HeckeError> {
    if !h.level.is_regular() {
        return Err(HeckeError::NotRegular);
    }
    let n = h.level.n();
    let mut out = LaurentPoly::zero(n);
    for (c, a) in basis_coordinates(h) {
        let reduced = a.reduce_mod_varpi(ctx).map_err(|e| match e {
            ScalarError::NegativeValuation(_) => HeckeError::NotIntegral(a.to_string()),
            other => HeckeError::Scalar(other),
        })?;
        let mu = h.level.expand(&c);
        if !is_dominant(&mu) || reduced.is_zero() {
            continue;
        }
        let value = reduced.as_int().ok_or_else(|| ScalarError::UnitAmbiguity(reduced.to_string()))?;
        let d: Vec<i64> = (0..n).map(|i| if i + 1 < n { mu[i] - mu[i + 1] } else { mu[i] }).collect();
        out.add_term(d, value);
    }
    ModPHeckeElt::new(ctx.p, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(v: &[i64]) -> Weight {
        Weight::single(v.to_vec())
    }

    #[test]
    fn convolution_examples() {
        let ps2 = LevelData::principal_series(2);
        let (s, sum) = conv_tt(&w(&[1, 0]), &w(&[-1, 0]), &ps2).unwrap();
        assert_eq!(s, SymbolicScalar::q_pow(1));
        assert_eq!(sum, w(&[0, 0]));
        let (s, _) = conv_tt(&w(&[2, 1]), &w(&[2, 1]), &ps2).unwrap();
        assert_eq!(s, SymbolicScalar::one());
        let ps3 = LevelData::principal_series(3);
        let (s, _) = conv_tt(&w(&[-1, 0, 0]), &w(&[0, -1, 0]), &ps3).unwrap();
        assert_eq!(s, SymbolicScalar::q_pow(1));
        let lvl = LevelData::new(vec![2, 1], vec![vec![0], vec![1]]).unwrap();
        assert!(matches!(conv_tt(&w(&[1, 0, 0]), &w(&[0, 0, 0]), &lvl), Err(HeckeError::NotCentral(_))));
    }

    #[test]
    fn inverse_and_tp_scalars() {
        assert_eq!(t_inverse_scalar(1, 2), SymbolicScalar::q_pow(-1));
        assert_eq!(t_inverse_scalar(3, 3), SymbolicScalar::one());
        assert_eq!(t_inverse_scalar(1, 3), SymbolicScalar::q_pow(-2));
        assert_eq!(tp_image_scalar(1, 2), SymbolicScalar::q_half_pow(-1));
        assert_eq!(tp_image_scalar(4, 4), SymbolicScalar::one());
        assert_eq!(tp_image_scalar(2, 4), SymbolicScalar::q_pow(-2));
    }

    #[test]
    fn orbit_formulas_follow_from_convolution() {
        for sizes in [vec![1, 1], vec![1, 2], vec![2, 1, 1], vec![1, 1, 1, 1], vec![2, 2]] {
            let k = sizes.len();
            let level = LevelData::new(sizes.clone(), (0..k).map(|i| vec![i]).collect()).unwrap();
            let n = level.n();
            for i in 0..k {
                for sign in [1i64, -1] {
                    let mut c = vec![0; k];
                    c[i] = sign;
                    let mu = level.expand(&c);
                    assert_eq!(SymbolicScalar::q_half_pow(tp_doubled(&level, &mu)), tp_image_scalar(sizes[i], n));
                    // T_{eps_I} T_{-eps_I} = q^{#I(n-#I)} T_0
                    let neg: Vec<i64> = mu.iter().map(|x| -x).collect();
                    let (s, _) = conv_tt(&Weight::single(mu), &Weight::single(neg), &level).unwrap();
                    assert_eq!(s.inverse().unwrap(), t_inverse_scalar(sizes[i], n));
                }
            }
        }
    }

    #[test]
    fn product_formula_examples() {
        let ps3 = LevelData::principal_series(3);
        assert_eq!(product_formula_scalar(&ps3, &[1, 1, 0], &[2, 0, 1]).unwrap(), SymbolicScalar::q_pow(1));
        assert_eq!(product_formula_scalar(&ps3, &[0, 0, 0], &[0, 1, 2]).unwrap(), SymbolicScalar::one());
        assert!(matches!(product_formula_scalar(&ps3, &[1, 0, 0], &[0, 1, 2]), Err(HeckeError::InvalidOrder(_))));
    }

    #[test]
    fn n_examples() {
        assert_eq!(n_of(&[1, 1]), 1);
        assert_eq!(n_of(&[3]), 0);
        assert_eq!(n_lambda_of(&[1, 1], &Weight::zero(3, 2)), 0);
        assert_eq!(n_lambda_bar(2, &Weight::zero(3, 1)), 1);
    }

    #[test]
    fn generator_examples() {
        // one class of two singleton orbits
        let level = LevelData::new(vec![1, 1], vec![vec![0, 1]]).unwrap();
        let zero = Weight::zero(2, 1);
        let g1 = generator(&level, &zero, &[0], &[1]).unwrap();
        let x0 = LaurentPoly::<SymbolicScalar>::var(2, 0);
        let x1 = LaurentPoly::<SymbolicScalar>::var(2, 1);
        assert_eq!(g1.poly(), &x0.add(&x1));
        let g2 = generator(&level, &zero, &[0], &[2]).unwrap();
        assert_eq!(g2.poly(), &x0.mul(&x1).scale(&SymbolicScalar::q_pow(-1)));
        let ps3 = LevelData::principal_series(3);
        let g = generator(&ps3, &Weight::zero(3, 1), &[0, 1, 2], &[1, 1, 1]).unwrap();
        let expected = LaurentPoly::monomial(SymbolicScalar::q_pow(-3), vec![1, 1, 1]);
        assert_eq!(g.poly(), &expected);
        assert!(matches!(generator(&level, &zero, &[0], &[3]), Err(HeckeError::DegreeOutOfRange(_))));
    }

    #[test]
    fn generators_match_closed_form() {
        let lambda = Weight::new(4, vec![vec![5, 3, 2, 0], vec![1, 1, 0, 0]]).unwrap();
        let levels = [
            LevelData::principal_series(4),
            LevelData::new(vec![1, 1, 1, 1], vec![vec![0, 2], vec![1, 3]]).unwrap(),
            LevelData::new(vec![2, 2], vec![vec![0, 1]]).unwrap(),
            LevelData::new(vec![2, 1, 1], vec![vec![0], vec![1, 2]]).unwrap(),
        ];
        for level in &levels {
            let ng = level.groups().len();
            for classes in (0..ng).powerset().filter(|s| !s.is_empty()) {
                let ranges: Vec<Vec<usize>> = classes.iter().map(|&g| (1..=level.groups()[g].len()).collect()).collect();
                for d in ranges.iter().multi_cartesian_product() {
                    let d: Vec<usize> = d.into_iter().copied().collect();
                    let g = generator(level, &lambda, &classes, &d).unwrap();
                    assert_eq!(g, generator_closed_form(level, &lambda, &classes, &d));
                    assert!(integral_membership(&g).unwrap());
                }
            }
            assert!(integral_membership(&inverse_generator(level, &lambda)).unwrap());
        }
    }

    #[test]
    fn integral_membership_examples() {
        let ps2 = LevelData::principal_series(2);
        let zero = Weight::zero(2, 1);
        let bad = HeckeElt::from_poly(&ps2, &zero, LaurentPoly::monomial(SymbolicScalar::q_pow(-1), vec![1, 0]));
        assert!(!integral_membership(&bad).unwrap());
        let inv = inverse_generator(&ps2, &zero);
        assert_eq!(inv.poly(), &LaurentPoly::monomial(SymbolicScalar::q_pow(1), vec![-1, -1]));
        assert!(integral_membership(&inv).unwrap());
        let level = LevelData::new(vec![1, 1], vec![vec![0, 1]]).unwrap();
        let lopsided = HeckeElt::from_poly(&level, &zero, LaurentPoly::var(2, 0));
        assert_eq!(integral_membership(&lopsided), Err(HeckeError::NotSymmetric));
    }

    #[test]
    fn reduction_examples() {
        let ps3 = LevelData::principal_series(3);
        let zero = Weight::zero(3, 1);
        let ctx = FieldCtx::new(7, 1, 1);
        let t1 = generator(&ps3, &zero, &[0], &[1]).unwrap();
        let y = satake_generators(7, 3);
        assert_eq!(reduction_map(&t1, &ctx).unwrap(), y[0]);
        let t2 = generator(&ps3, &zero, &[1], &[1]).unwrap();
        assert!(reduction_map(&t2, &ctx).unwrap().is_zero());
        let all = generator(&ps3, &zero, &[0, 1, 2], &[1, 1, 1]).unwrap();
        assert_eq!(reduction_map(&all, &ctx).unwrap(), y[2]);
        let y1_over_y3 = ModPHeckeElt::monomial(7, vec![1, 0, -1]).unwrap();
        assert_eq!(y1_over_y3.n(), 3);
        assert!(ModPHeckeElt::monomial(7, vec![-1, 0, 0]).is_err());
    }

    fn small_weight(n: usize) -> impl Strategy<Value = Vec<i64>> {
        prop::collection::vec(-3i64..=3, n)
    }

    fn random_integral(level: &LevelData, lambda: &Weight, picks: &[(usize, i64)]) -> HeckeElt {
        let k = level.num_orbits();
        let mut gens: Vec<HeckeElt> = Vec::new();
        for (g, members) in level.groups().iter().enumerate() {
            for d in 1..=members.len() {
                gens.push(generator(level, lambda, &[g], &[d]).unwrap());
            }
        }
        gens.push(inverse_generator(level, lambda));
        let mut acc = HeckeElt::basis(level, lambda, &vec![0; k]);
        for &(g, coeff) in picks {
            let term = gens[g % gens.len()].scale(&SymbolicScalar::int(coeff as i128));
            acc = acc.mul(&term.add(&HeckeElt::basis(level, lambda, &vec![0; k])));
        }
        acc
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn convolution_commutes(n in 2usize..=4, a in small_weight(4), b in small_weight(4)) {
            let level = LevelData::principal_series(n);
            let (s1, _) = conv_tt(&w(&a[..n]), &w(&b[..n]), &level).unwrap();
            let (s2, _) = conv_tt(&w(&b[..n]), &w(&a[..n]), &level).unwrap();
            prop_assert_eq!(s1, s2);
        }

        #[test]
        fn convolution_matches_covered_cases(n in 2usize..=4, a in small_weight(4), b in small_weight(4)) {
            let level = LevelData::principal_series(n);
            let (a, b) = (&a[..n], &b[..n]);
            if let Some(direct) = conv_formula_direct(a, b, &level) {
                prop_assert_eq!(conv_tt(&w(a), &w(b), &level).unwrap().0, direct);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn product_formula_matches_iteration(
            sizes in prop::collection::vec(1usize..=2, 1..=4),
            c in prop::collection::vec(0u64..=3, 4),
        ) {
            let k = sizes.len();
            let level = LevelData::new(sizes, (0..k).map(|i| vec![i]).collect()).unwrap();
            let c = &c[..k];
            let ci: Vec<i64> = c.iter().map(|&x| x as i64).collect();
            let iterated = product_scalar_by_iteration(&level, &ci);
            for order in (0..k).permutations(k) {
                if let Ok(s) = product_formula_scalar(&level, c, &order) {
                    prop_assert_eq!(&s, &iterated);
                }
            }
        }

        #[test]
        fn products_of_generators_stay_integral(picks in prop::collection::vec((0usize..5, -2i64..=2), 1..4)) {
            let level = LevelData::new(vec![1, 1, 1], vec![vec![0, 2], vec![1]]).unwrap();
            let lambda = Weight::single(vec![3, 1, 0]);
            let h = random_integral(&level, &lambda, &picks);
            prop_assert!(integral_membership(&h).unwrap());
        }

        #[test]
        fn reduction_is_multiplicative(
            a in prop::collection::vec((0usize..4, -2i64..=2), 1..3),
            b in prop::collection::vec((0usize..4, -2i64..=2), 1..3),
        ) {
            let level = LevelData::principal_series(3);
            let lambda = Weight::zero(3, 1);
            let ctx = FieldCtx::new(5, 1, 1);
            let h1 = random_integral(&level, &lambda, &a);
            let h2 = random_integral(&level, &lambda, &b);
            let lhs = reduction_map(&h1.mul(&h2), &ctx).unwrap();
            let rhs = reduction_map(&h1, &ctx).unwrap().mul(&reduction_map(&h2, &ctx).unwrap());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn multiplication_is_associative(
            a in prop::collection::vec((0usize..4, -2i64..=2), 1..3),
            b in prop::collection::vec((0usize..4, -2i64..=2), 1..3),
            c in prop::collection::vec((0usize..4, -2i64..=2), 1..3),
        ) {
            let level = LevelData::principal_series(3);
            let lambda = Weight::zero(3, 1);
            let (x, y, z) = (random_integral(&level, &lambda, &a), random_integral(&level, &lambda, &b), random_integral(&level, &lambda, &c));
            prop_assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
        }
    }
}
