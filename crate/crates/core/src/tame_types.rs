//! Tame inertial types and Serre weights.
//!
//! A type of level `r` is a tuple of exponents `a'_i` in `[0, p^{fr} - 1)`
//! together with a permutation `s_tau` of order `r` permuting the characters
//! `chi_i = omega^{a'_i}` by `q`-th power Frobenius twists. Labels are 0-based
//! and put into a canonical order by [`build_type`].

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::root_data::{dot_action, ExtAffWeylElt, Perm, Presentation, RootDataError, Weight};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TameTypeError {
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("invalid exponent: {0}")]
    InvalidExponent(String),
    #[error("invalid weight: {0}")]
    InvalidWeight(String),
    #[error("weight is not p-restricted: {0}")]
    NotRestricted(String),
    #[error("top twist a'^(f'-1) is not dominant in the canonical order")]
    NotDominantTop,
    #[error(transparent)]
    RootData(#[from] RootDataError),
}

fn checked_pow(p: i64, k: usize) -> Result<i64, TameTypeError> {
    let mut acc: i64 = 1;
    for _ in 0..k {
        acc = acc
            .checked_mul(p)
            .ok_or_else(|| TameTypeError::InvalidExponent(format!("{p}^{k} overflows")))?;
    }
    Ok(acc)
}

fn mul_mod(a: i64, b: i64, m: i64) -> i64 {
    ((a as i128 * b as i128).rem_euclid(m as i128)) as i64
}

/// Stable permutation `s` with `s^{-1}(v)` weakly decreasing.
fn stable_sorter(v: &[i64]) -> Perm {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[b].cmp(&v[a]));
    Perm::new(order).expect("sorted indices form a permutation")
}

/// Every permutation `s` with `s^{-1}(v)` weakly decreasing.
fn all_sorters(v: &[i64]) -> Vec<Perm> {
    let base = stable_sorter(v);
    Perm::all(v.len())
        .into_iter()
        .filter(|s| base.images().iter().zip(s.images()).all(|(&a, &b)| v[a] == v[b]))
        .collect()
}

fn is_interval(set: &[usize]) -> bool {
    let lo = set.iter().min();
    let hi = set.iter().max();
    match (lo, hi) {
        (Some(&lo), Some(&hi)) => hi - lo + 1 == set.len(),
        _ => true,
    }
}

/// A tame inertial type in canonical label order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TameInertialType {
    p: i64,
    e: u32,
    f: usize,
    n: usize,
    r: usize,
    a_prime: Vec<i64>,
    s_tau: Perm,
    digits: Vec<Vec<i64>>,
    orientation: Vec<Perm>,
    orbits: Vec<Vec<usize>>,
    classes: Vec<Vec<usize>>,
    orbit_groups: Vec<Vec<usize>>,
    relabel: Perm,
}

/// Validate and canonicalize a type.
///
/// `s_tau` must satisfy `a'_i = q a'_{s_tau(i)} mod p^{fr} - 1` and distinct
/// characters along every orbit. The labels are then reordered so that orbits
/// and unions of equivalent orbits are intervals, preferring an order in which
/// `a'^{(f'-1)}` is dominant.
pub fn build_type(p: u64, e: u32, f: usize, n: usize, a_prime: &[i64], s_tau: &Perm) -> Result<TameInertialType, TameTypeError> {
    if p < 2 || f == 0 || n == 0 {
        return Err(TameTypeError::InvalidExponent(format!("need p >= 2, f >= 1, n >= 1 (got p={p}, f={f}, n={n})")));
    }
    if a_prime.len() != n || s_tau.n() != n {
        return Err(TameTypeError::InvalidExponent(format!("expected {n} exponents and a permutation of {n} letters")));
    }
    let p = p as i64;
    let r = s_tau.order();
    let modulus = checked_pow(p, f * r)? - 1;
    if let Some(bad) = a_prime.iter().find(|&&a| a < 0 || a >= modulus) {
        return Err(TameTypeError::InvalidExponent(format!("{bad} not in [0, {modulus})")));
    }
    let q = checked_pow(p, f)?;
    for i in 0..n {
        if a_prime[i] != mul_mod(q, a_prime[s_tau.apply(i)], modulus) {
            return Err(TameTypeError::InvalidPermutation(format!(
                "a'_{i} = {} is not q * a'_{} mod {modulus}",
                a_prime[i],
                s_tau.apply(i)
            )));
        }
    }
    for cyc in s_tau.cycles() {
        for (x, &i) in cyc.iter().enumerate() {
            if cyc[x + 1..].iter().any(|&k| a_prime[k] == a_prime[i]) {
                return Err(TameTypeError::InvalidPermutation(format!("orbit {cyc:?} repeats a character")));
            }
        }
    }
    let fp = f * r;
    let shift = checked_pow(p, fp - 1)?;
    let top: Vec<i64> = a_prime.iter().map(|&a| mul_mod(a, shift, modulus)).collect();
    let order = canonical_order(a_prime, s_tau, &top);
    let relabel = Perm::new(order)?.inverse();
    let a_new = relabel.act(a_prime);
    let s_new = relabel.compose(s_tau).compose(&relabel.inverse());
    let mut t = TameInertialType {
        p,
        e,
        f,
        n,
        r,
        a_prime: a_new,
        s_tau: s_new,
        digits: Vec::new(),
        orientation: Vec::new(),
        orbits: Vec::new(),
        classes: Vec::new(),
        orbit_groups: Vec::new(),
        relabel,
    };
    t.fill_derived();
    Ok(t)
}

/// Old labels listed in their new order.
fn canonical_order(a: &[i64], s: &Perm, top: &[i64]) -> Vec<usize> {
    let n = a.len();
    let mut by_top: Vec<usize> = (0..n).collect();
    by_top.sort_by(|&x, &y| top[y].cmp(&top[x]));
    let orbits = s.cycles();
    let key = |orb: &Vec<usize>| {
        let mut v: Vec<i64> = orb.iter().map(|&i| a[i]).collect();
        v.sort_unstable();
        v
    };
    let position = |i: usize| by_top.iter().position(|&x| x == i).expect("label present");
    let intervals_ok = |pos: &dyn Fn(usize) -> usize| {
        let groups_ok = orbits.iter().all(|o| is_interval(&o.iter().map(|&i| pos(i)).collect::<Vec<_>>()));
        let unions_ok = orbits.iter().all(|o| {
            let union: Vec<usize> = orbits.iter().filter(|o2| key(o2) == key(o)).flatten().map(|&i| pos(i)).collect();
            is_interval(&union)
        });
        groups_ok && unions_ok
    };
    if intervals_ok(&position) {
        return by_top;
    }
    // group equivalent orbits, then orbits, then labels, each by top exponent
    let mut groups: Vec<Vec<Vec<usize>>> = Vec::new();
    for o in &orbits {
        match groups.iter_mut().find(|g| key(&g[0]) == key(o)) {
            Some(g) => g.push(o.clone()),
            None => groups.push(vec![o.clone()]),
        }
    }
    let max_top = |o: &Vec<usize>| o.iter().map(|&i| top[i]).max().unwrap_or(0);
    for g in &mut groups {
        for o in g.iter_mut() {
            o.sort_by(|&x, &y| top[y].cmp(&top[x]).then(x.cmp(&y)));
        }
        g.sort_by(|x, y| max_top(y).cmp(&max_top(x)).then(x[0].cmp(&y[0])));
    }
    groups.sort_by(|x, y| max_top(&y[0]).cmp(&max_top(&x[0])).then(x[0][0].cmp(&y[0][0])));
    groups.into_iter().flatten().flatten().collect()
}

impl TameInertialType {
    fn fill_derived(&mut self) {
        let fp = self.f * self.r;
        self.digits = (0..fp)
            .map(|jp| {
                let pj = self.p.pow(jp as u32);
                self.a_prime.iter().map(|&a| (a / pj) % self.p).collect()
            })
            .collect();
        let mut orbits = self.s_tau.cycles();
        for o in &mut orbits {
            o.sort_unstable();
        }
        orbits.sort();
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for i in 0..self.n {
            match classes.iter_mut().find(|c| self.a_prime[c[0]] == self.a_prime[i]) {
                Some(c) => c.push(i),
                None => classes.push(vec![i]),
            }
        }
        let key = |o: &Vec<usize>| {
            let mut v: Vec<i64> = o.iter().map(|&i| self.a_prime[i]).collect();
            v.sort_unstable();
            v
        };
        let mut orbit_groups: Vec<Vec<usize>> = Vec::new();
        for (k, o) in orbits.iter().enumerate() {
            match orbit_groups.iter_mut().find(|g| key(&orbits[g[0]]) == key(o)) {
                Some(g) => g.push(k),
                None => orbit_groups.push(vec![k]),
            }
        }
        self.orbits = orbits;
        self.classes = classes;
        self.orbit_groups = orbit_groups;
        let base: Vec<Perm> = (0..self.f).map(|rho| stable_sorter(&self.a_prime_twist(rho + (self.r - 1) * self.f))).collect();
        self.orientation = self.extend_orientation(&base);
    }

    /// Extends choices at `j' = rho + (r-1) f` by `s_or,{j'+f} = s_tau s_or,j'`.
    fn extend_orientation(&self, base: &[Perm]) -> Vec<Perm> {
        (0..self.f * self.r)
            .map(|jp| {
                let rho = jp % self.f;
                let k = (jp / self.f) as i64;
                self.s_tau.pow(k + 1).compose(&base[rho])
            })
            .collect()
    }

    pub fn p(&self) -> u64 {
        self.p as u64
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn f(&self) -> usize {
        self.f
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Level `r`, the order of `s_tau`.
    pub fn level(&self) -> usize {
        self.r
    }

    /// `f' = f r`.
    pub fn f_prime(&self) -> usize {
        self.f * self.r
    }

    /// `p^{fr} - 1`.
    pub fn modulus(&self) -> i64 {
        self.p.pow((self.f * self.r) as u32) - 1
    }

    pub fn a_prime(&self) -> &[i64] {
        &self.a_prime
    }

    pub fn s_tau(&self) -> &Perm {
        &self.s_tau
    }

    /// Digit vectors `alpha'_{j'}` for `j'` in `0..f'`.
    pub fn digits(&self) -> &[Vec<i64>] {
        &self.digits
    }

    /// Orientation `s_or,j'` for `j'` in `0..f'`.
    pub fn orientation(&self) -> &[Perm] {
        &self.orientation
    }

    /// Map from input labels to canonical labels.
    pub fn relabel(&self) -> &Perm {
        &self.relabel
    }

    /// `s_tau`-orbits, each sorted, in increasing order of first element.
    pub fn orbits(&self) -> &[Vec<usize>] {
        &self.orbits
    }

    /// Classes of labels with isomorphic characters.
    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    /// Orbits grouped by equivalence, as indices into [`Self::orbits`].
    pub fn orbit_groups(&self) -> &[Vec<usize>] {
        &self.orbit_groups
    }

    /// `a'^{(j')} = a' p^{j'} mod p^{fr} - 1`, computed from the digits.
    pub fn a_prime_twist(&self, jp: usize) -> Vec<i64> {
        let fp = self.f * self.r;
        (0..self.n)
            .map(|i| {
                (0..fp)
                    .rev()
                    .fold(0i64, |acc, k| acc * self.p + self.digits[(k + fp - jp % fp) % fp][i])
            })
            .collect()
    }

    /// Whether `a'^{(f'-1)}` is dominant, so that `s_or,{f'-1} = 1`.
    pub fn top_is_dominant(&self) -> bool {
        self.orientation[self.f * self.r - 1].is_identity()
    }

    /// Whether every digit vector has pairwise distinct entries.
    pub fn has_regular_digits(&self) -> bool {
        self.digits.iter().all(|d| (0..self.n).all(|i| (i + 1..self.n).all(|k| d[i] != d[k])))
    }

    pub fn is_principal_series(&self) -> bool {
        self.r == 1
    }

    /// Every valid orientation: one free sorter at each `j' = rho + (r-1) f`.
    pub fn all_orientations(&self) -> Vec<Vec<Perm>> {
        let mut out: Vec<Vec<Perm>> = vec![Vec::new()];
        for rho in 0..self.f {
            let choices = all_sorters(&self.a_prime_twist(rho + (self.r - 1) * self.f));
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    choices.iter().map(move |c| {
                        let mut v = prefix.clone();
                        v.push(c.clone());
                        v
                    })
                })
                .collect();
        }
        out.into_iter().map(|base| self.extend_orientation(&base)).collect()
    }

    /// Same type with a different valid orientation.
    pub fn with_orientation(&self, orientation: Vec<Perm>) -> Result<Self, TameTypeError> {
        let fp = self.f * self.r;
        if orientation.len() != fp {
            return Err(TameTypeError::InvalidPermutation(format!("need {fp} orientation entries")));
        }
        for jp in 0..fp {
            let sorted = orientation[jp].inverse().act(&self.a_prime_twist(jp));
            if sorted.windows(2).any(|w| w[0] < w[1]) {
                return Err(TameTypeError::InvalidPermutation(format!("s_or,{jp} does not sort a'^({jp})")));
            }
            let next = orientation[(jp + self.f) % fp].clone();
            if next != self.s_tau.compose(&orientation[jp]) {
                return Err(TameTypeError::InvalidPermutation(format!("s_or,{} != s_tau s_or,{jp}", jp + self.f)));
            }
        }
        Ok(TameInertialType { orientation, ..self.clone() })
    }

    /// Every `s` satisfying the Frobenius congruence and orbit condition for
    /// the given exponents, listed in lexicographic order.
    pub fn valid_s_taus(p: u64, f: usize, a_prime: &[i64]) -> Vec<Perm> {
        Perm::all(a_prime.len())
            .into_iter()
            .filter(|s| build_type(p, 1, f, a_prime.len(), a_prime, s).is_ok())
            .collect()
    }
}

/// `(s, mu)` with `s_0 = s_or,0`, `s_j = s_or,{j-1}^{-1} s_or,j`, `mu_0 + eta =
/// alpha'_0` and `mu_j + eta = s_or,{j-1}^{-1} s_tau (alpha'_{f-j})`.
///
/// The boolean is false when some digit vector is not regular, in which case
/// the result need not lie in the lowest alcove.
pub fn lowest_alcove_presentation(t: &TameInertialType) -> Result<(Presentation, bool), TameTypeError> {
    if !t.top_is_dominant() {
        return Err(TameTypeError::NotDominantTop);
    }
    let n = t.n;
    let f = t.f;
    let eta: Vec<i64> = (0..n as i64).rev().collect();
    let mut s = Vec::with_capacity(f);
    let mut comps = Vec::with_capacity(f);
    for j in 0..f {
        let shifted = if j == 0 {
            s.push(t.orientation[0].clone());
            t.digits[0].clone()
        } else {
            let prev_inv = t.orientation[j - 1].inverse();
            s.push(prev_inv.compose(&t.orientation[j]));
            prev_inv.compose(&t.s_tau).act(&t.digits[f - j])
        };
        comps.push(shifted.iter().zip(&eta).map(|(a, b)| a - b).collect());
    }
    let mu = Weight::new(n, comps)?;
    Ok((Presentation { s, mu }, t.has_regular_digits()))
}

/// `m`-genericity of the canonical lowest alcove presentation.
pub fn is_m_generic(t: &TameInertialType, m: i64) -> bool {
    match lowest_alcove_presentation(t) {
        Ok((pres, _)) => pres.is_m_generic(m, t.p()),
        Err(_) => false,
    }
}

/// The dual type, with exponents negated and labels recanonicalized.
pub fn dual(t: &TameInertialType) -> TameInertialType {
    let m = t.modulus();
    let a: Vec<i64> = t.a_prime.iter().map(|&x| (-x).rem_euclid(m)).collect();
    build_type(t.p(), t.e, t.f, t.n, &a, &t.s_tau).expect("dual of a valid type is valid")
}

/// A Serre weight `F(lambda)` stored by its `p`-restricted tuple `lambda`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SerreWeight {
    p: u64,
    lambda: Weight,
}

impl SerreWeight {
    pub fn new(p: u64, lambda: Weight) -> Result<Self, TameTypeError> {
        let pi = p as i64;
        for (j, c) in lambda.comps().iter().enumerate() {
            if c.windows(2).any(|w| w[0] - w[1] < 0 || w[0] - w[1] > pi - 1) {
                return Err(TameTypeError::NotRestricted(format!("embedding {j}: {c:?}")));
            }
        }
        Ok(SerreWeight { p, lambda })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn f(&self) -> usize {
        self.lambda.f()
    }

    pub fn n(&self) -> usize {
        self.lambda.n()
    }

    /// The tuple `lambda_j`, also the highest weight `mu` of the weight.
    pub fn lambda(&self) -> &Weight {
        &self.lambda
    }

    /// The `q`-restricted weight `sum_j lambda_j p^{(f-j) mod f}`.
    pub fn lambda_f(&self) -> Vec<i128> {
        let f = self.f();
        let mut out = vec![0i128; self.n()];
        for j in 0..f {
            let pw = (self.p as i128).pow(((f - j) % f) as u32);
            for (o, &x) in out.iter_mut().zip(self.lambda.comp(j)) {
                *o += pw * x as i128;
            }
        }
        out
    }
}

/// Flags of the Serre weight genericity conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwPredicates {
    pub non_steinberg: bool,
    pub m_regular: bool,
    pub regular: bool,
    pub m_deep: bool,
}

/// Evaluate non-Steinberg, `M`-regularity for the standard Levi with the given
/// block sizes, regularity and `m`-deepness.
///
/// Regularity is measured on characters of `T(k)`, so two entries of
/// `lambda` count as equal when they agree modulo `q - 1`.
pub fn sw_predicates(sigma: &SerreWeight, m_blocks: &[usize], m: i64) -> Result<SwPredicates, TameTypeError> {
    let n = sigma.n();
    if m_blocks.iter().sum::<usize>() != n || m_blocks.contains(&0) {
        return Err(RootDataError::InvalidPartition(format!("{m_blocks:?} is not a composition of {n}")).into());
    }
    let lam = sigma.lambda_f();
    let q = (sigma.p as i128).pow(sigma.f() as u32);
    let non_steinberg = lam.windows(2).all(|w| w[0] - w[1] < q - 1);
    let mut block_of = Vec::with_capacity(n);
    for (b, &size) in m_blocks.iter().enumerate() {
        block_of.extend(std::iter::repeat_n(b, size));
    }
    let clash = |i: usize, k: usize| (lam[i] - lam[k]).rem_euclid(q - 1) == 0;
    let m_regular = (0..n).all(|i| (i + 1..n).all(|k| !clash(i, k) || block_of[i] == block_of[k]));
    let regular = (0..n).all(|i| (i + 1..n).all(|k| !clash(i, k)));
    let p = sigma.p as i64;
    let shifted = sigma.lambda.add(&Weight::eta(n, sigma.f()))?;
    let m_deep = shifted.comps().iter().all(|c| {
        (0..n).all(|i| {
            (i + 1..n).all(|k| {
                let r = (c[i] - c[k]).rem_euclid(p);
                m < r && r < p - m
            })
        })
    });
    Ok(SwPredicates { non_steinberg, m_regular, regular, m_deep })
}

/// The principal series type `tau(1, mu)` for the highest weight `mu` of
/// `sigma`, with digits `alpha'_0 = mu_0 + eta` and `alpha'_k = mu_{f-k} + eta`.
pub fn principal_series_type_of(sigma: &SerreWeight, e: u32) -> Result<TameInertialType, TameTypeError> {
    let f = sigma.f();
    let n = sigma.n();
    let p = sigma.p as i64;
    let modulus = checked_pow(p, f)? - 1;
    let shifted = sigma.lambda.add(&Weight::eta(n, f))?;
    let mut a = vec![0i64; n];
    for k in 0..f {
        let comp = shifted.comp((f - k) % f);
        let pk = checked_pow(p, k)?;
        for (x, &v) in a.iter_mut().zip(comp) {
            *x += pk * v;
        }
    }
    let a: Vec<i64> = a.iter().map(|x| x.rem_euclid(modulus)).collect();
    build_type(sigma.p, e, f, n, &a, &Perm::identity(n))
}

/// `F(mu) -> F(w_0 . (mu - p eta))`.
pub fn r_operator(sigma: &SerreWeight) -> Result<SerreWeight, TameTypeError> {
    let n = sigma.n();
    let f = sigma.f();
    let moved = sigma.lambda.sub(&Weight::eta(n, f).scale(sigma.p as i64))?;
    let w0 = ExtAffWeylElt::finite(vec![Perm::longest(n); f]);
    let image = dot_action(&w0, &moved)?;
    SerreWeight::new(sigma.p, image)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn perm(v: &[usize]) -> Perm {
        Perm::new(v.to_vec()).unwrap()
    }

    #[test]
    fn rank_one_digits() {
        let t = build_type(5, 1, 2, 1, &[7], &perm(&[0])).unwrap();
        assert_eq!(t.digits(), &[vec![2], vec![1]]);
        assert_eq!(t.a_prime_twist(1), vec![11]);
        assert_eq!(11, 7 * 5 % 24);
    }

    #[test]
    fn dominant_principal_series() {
        let t = build_type(5, 1, 1, 2, &[3, 1], &perm(&[0, 1])).unwrap();
        assert!(t.orientation()[0].is_identity());
        let (pres, regular) = lowest_alcove_presentation(&t).unwrap();
        assert!(regular);
        assert_eq!(pres.mu, Weight::single(vec![2, 1]));
        assert!(pres.s[0].is_identity());
    }

    #[test]
    fn level_two_orbit() {
        let s = perm(&[1, 0]);
        let t = build_type(3, 1, 1, 2, &[1, 3], &s).unwrap();
        assert_eq!(t.level(), 2);
        assert_eq!(t.orbits(), &[vec![0, 1]]);
        // brute force: every a with (a, q^{-1} a) valid for this s_tau
        let valid: Vec<i64> = (0..8).filter(|&a| build_type(3, 1, 1, 2, &[a, (3 * a) % 8], &s).is_ok()).collect();
        assert!(valid.contains(&1));
        assert!(!valid.contains(&0) && !valid.contains(&4));
        // the literal -q congruence is not satisfied by this example
        assert_ne!(-3i64.rem_euclid(8), 3);
    }

    #[test]
    fn rejects_bad_congruence_and_range() {
        assert!(matches!(build_type(3, 1, 1, 2, &[1, 5], &perm(&[1, 0])), Err(TameTypeError::InvalidPermutation(_))));
        assert!(matches!(build_type(5, 1, 1, 2, &[24, 1], &perm(&[0, 1])), Err(TameTypeError::InvalidExponent(_))));
    }

    #[test]
    fn two_embedding_presentation() {
        // alpha'_0 = (3,1), alpha'_1 = (2,0), p = 7
        let a = vec![3 + 7 * 2, 1];
        let t = build_type(7, 1, 2, 2, &a, &perm(&[0, 1])).unwrap();
        assert!(t.orientation().iter().all(|s| s.is_identity()));
        let (pres, _) = lowest_alcove_presentation(&t).unwrap();
        assert_eq!(pres.mu.comp(0), &[2, 1]);
        assert_eq!(pres.mu.comp(1), &[1, 0]);
    }

    #[test]
    fn genericity_examples() {
        let t = build_type(5, 1, 1, 2, &[3, 1], &perm(&[0, 1])).unwrap();
        assert!(is_m_generic(&t, 1));
        assert!(!is_m_generic(&t, 2));
        let t = build_type(23, 1, 1, 2, &[12, 4], &perm(&[0, 1])).unwrap();
        assert!(is_m_generic(&t, 7));
        let t = build_type(23, 1, 1, 1, &[5], &perm(&[0])).unwrap();
        assert!((0..23).all(|m| is_m_generic(&t, m)));
    }

    #[test]
    fn dual_examples() {
        let t = build_type(5, 1, 1, 2, &[3, 1], &perm(&[0, 1])).unwrap();
        let d = dual(&t);
        assert_eq!(d.a_prime(), &[3, 1]);
        assert_eq!(d.relabel(), &perm(&[1, 0]));
        let back = dual(&d);
        assert_eq!((back.a_prime(), back.s_tau()), (t.a_prime(), t.s_tau()));
        let z = build_type(5, 1, 1, 1, &[0], &perm(&[0])).unwrap();
        assert_eq!(dual(&z).a_prime(), &[0]);
    }

    #[test]
    fn serre_weight_predicates() {
        let s = SerreWeight::new(5, Weight::single(vec![4, 0])).unwrap();
        assert!(!sw_predicates(&s, &[1, 1], 0).unwrap().non_steinberg);
        let s = SerreWeight::new(23, Weight::single(vec![12, 4])).unwrap();
        // <lambda + eta, alpha> = 9
        for m in 0..=8 {
            assert!(sw_predicates(&s, &[1, 1], m).unwrap().m_deep);
        }
        assert!(!sw_predicates(&s, &[1, 1], 9).unwrap().m_deep);
        let s = SerreWeight::new(23, Weight::single(vec![3, 3])).unwrap();
        let flags = sw_predicates(&s, &[2], 0).unwrap();
        assert!(!flags.regular && flags.m_regular);
        assert!(!sw_predicates(&s, &[1, 1], 0).unwrap().m_regular);
    }

    #[test]
    fn principal_series_of_weight() {
        let s = SerreWeight::new(23, Weight::single(vec![14, 7, 0])).unwrap();
        let t = principal_series_type_of(&s, 1).unwrap();
        assert_eq!(t.a_prime(), &[16, 8, 0]);
        let z = SerreWeight::new(23, Weight::zero(3, 1)).unwrap();
        assert_eq!(principal_series_type_of(&z, 1).unwrap().a_prime(), &[2, 1, 0]);
    }

    #[test]
    fn r_operator_example() {
        let s = SerreWeight::new(23, Weight::single(vec![12, 4])).unwrap();
        let r = r_operator(&s).unwrap();
        assert_eq!(r.lambda(), &Weight::single(vec![3, -10]));
        // central twists commute with R
        let c = SerreWeight::new(23, Weight::single(vec![15, 7])).unwrap();
        assert_eq!(r_operator(&c).unwrap().lambda(), &Weight::single(vec![6, -7]));
    }

    #[test]
    fn lambda_f_uses_cyclic_exponents() {
        let s = SerreWeight::new(5, Weight::new(2, vec![vec![1, 0], vec![3, 0]]).unwrap()).unwrap();
        assert_eq!(s.lambda_f(), vec![1 + 3 * 5, 0]);
    }

    #[test]
    fn interleaved_orbits_fall_back_to_grouped_order() {
        // p = 3, f = 1, level 2 orbit {a, 3a} plus a fixed character
        let s = perm(&[1, 0, 2]);
        let a = [2, 6, 4];
        let t = build_type(3, 1, 1, 3, &a, &s).unwrap();
        for o in t.orbits() {
            assert!(is_interval(o));
        }
        for jp in 0..t.f_prime() {
            let sorted = t.orientation()[jp].inverse().act(&t.a_prime_twist(jp));
            assert!(sorted.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    fn random_type() -> impl Strategy<Value = TameInertialType> {
        (prop::sample::select(vec![3u64, 5, 7]), 1usize..=2, 1usize..=3, any::<u64>()).prop_filter_map(
            "valid type",
            |(p, f, n, seed)| {
                // split n into orbits of size 1 or 2 and draw exponents
                let mut rng = seed;
                let mut next = || {
                    rng = rng.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    rng >> 33
                };
                let r = if n >= 2 && next() % 2 == 0 { 2 } else { 1 };
                let q = (p as i64).pow(f as u32);
                let modulus = (p as i64).pow((f * r) as u32) - 1;
                let mut a = Vec::new();
                let mut s = Vec::new();
                let mut i = 0;
                while i < n {
                    let x = (next() as i64) % modulus;
                    if r == 2 && i + 1 < n {
                        // a_i = q a_{i+1}, a_{i+1} = q a_i
                        a.push(x);
                        a.push((x * q) % modulus);
                        s.push(i + 1);
                        s.push(i);
                        i += 2;
                    } else {
                        // fixed point: exponent divisible by (q^r - 1)/(q - 1)
                        let unit = modulus / (q - 1);
                        a.push(((x % (q - 1)) * unit) % modulus);
                        s.push(i);
                        i += 1;
                    }
                }
                build_type(p, 1, f, n, &a, &Perm::new(s).ok()?).ok()
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn digits_round_trip(t in random_type()) {
            let fp = t.f_prime();
            for i in 0..t.n() {
                let rebuilt: i64 = (0..fp).map(|j| t.p().pow(j as u32) as i64 * t.digits()[j][i]).sum();
                prop_assert_eq!(rebuilt, t.a_prime()[i]);
                prop_assert!((0..fp).any(|j| t.digits()[j][i] != t.p() as i64 - 1));
            }
            for jp in 0..fp {
                let next = &t.digits()[(jp + t.f()) % fp];
                prop_assert_eq!(&t.s_tau().inverse().act(&t.digits()[jp]), next);
            }
        }

        #[test]
        fn orientations_sort_and_are_compatible(t in random_type()) {
            for o in t.all_orientations() {
                let t2 = t.with_orientation(o);
                prop_assert!(t2.is_ok());
            }
            prop_assert!(t.with_orientation(t.orientation().to_vec()).is_ok());
        }

        #[test]
        fn canonical_intervals(t in random_type()) {
            for o in t.orbits() {
                prop_assert!(is_interval(o));
            }
            for g in t.orbit_groups() {
                let union: Vec<usize> = g.iter().flat_map(|&k| t.orbits()[k].clone()).collect();
                prop_assert!(is_interval(&union));
            }
        }

        #[test]
        fn dual_is_involution(t in random_type()) {
            let back = dual(&dual(&t));
            prop_assert_eq!(back.a_prime(), t.a_prime());
        }

        #[test]
        fn genericity_is_monotone(t in random_type(), m in 0i64..4) {
            if is_m_generic(&t, m + 1) {
                prop_assert!(is_m_generic(&t, m));
            }
        }

        #[test]
        fn principal_series_round_trip(
            p in prop::sample::select(vec![7u64, 11, 13]),
            f in 1usize..=2,
            seed in prop::collection::vec((0i64..3, 0i64..3), 2),
        ) {
            // mu + eta strictly decreasing with entries in [0, p-1]
            let comps: Vec<Vec<i64>> = seed.iter().take(f).map(|&(a, b)| vec![a + b + 1, b]).collect();
            let mu = Weight::new(2, comps.iter().map(|c| vec![c[0] - 1, c[1]]).collect()).unwrap();
            let sigma = SerreWeight::new(p, mu.clone()).unwrap();
            let t = principal_series_type_of(&sigma, 1).unwrap();
            let (pres, _) = lowest_alcove_presentation(&t).unwrap();
            prop_assert_eq!(pres.mu, mu);
            prop_assert!(pres.s.iter().all(|s| s.is_identity()));
        }
    }
}
