//! Root datum of `GL_n` with `f` embeddings: weights, permutations, the
//! extended affine Weyl group, the dot action and presentation twists.
//!
//! Indices are 0-based throughout. A permutation acts on positions, so
//! `(w mu)_i = mu_{w^{-1}(i)}`, and `(w1 w2)(i) = w1(w2(i))`. The rotation `pi`
//! sends a tuple `(x_0, ..., x_{f-1})` to `(x_1, ..., x_{f-1}, x_0)`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RootDataError {
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("not a permutation: {0:?}")]
    InvalidPermutation(Vec<usize>),
}

/// A permutation of `{0, ..., n-1}` stored as its image vector.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Perm(Vec<usize>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n).collect())
    }

    pub fn new(images: Vec<usize>) -> Result<Self, RootDataError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || seen[x] {
                return Err(RootDataError::InvalidPermutation(images));
            }
            seen[x] = true;
        }
        Ok(Perm(images))
    }

    /// Simple transposition swapping `i` and `i+1`.
    pub fn simple(n: usize, i: usize) -> Self {
        let mut v: Vec<usize> = (0..n).collect();
        v.swap(i, i + 1);
        Perm(v)
    }

    pub fn transposition(n: usize, i: usize, k: usize) -> Self {
        let mut v: Vec<usize> = (0..n).collect();
        v.swap(i, k);
        Perm(v)
    }

    /// Longest element `i -> n-1-i`.
    pub fn longest(n: usize) -> Self {
        Perm((0..n).rev().collect())
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    /// `self * other`, i.e. apply `other` first.
    pub fn compose(&self, other: &Perm) -> Perm {
        assert_eq!(self.n(), other.n(), "permutation size mismatch");
        Perm(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.n()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x] = i;
        }
        Perm(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// `(w v)_i = v_{w^{-1}(i)}`.
    pub fn act<T: Clone>(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.n(), "vector length mismatch");
        let mut out = v.to_vec();
        for (i, x) in v.iter().enumerate() {
            out[self.0[i]] = x.clone();
        }
        out
    }

    /// Image of a set of indices.
    pub fn image_set(&self, set: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = set.iter().map(|&i| self.0[i]).collect();
        out.sort_unstable();
        out
    }

    /// Number of inversions.
    pub fn length(&self) -> usize {
        let n = self.n();
        let mut l = 0;
        for i in 0..n {
            for k in i + 1..n {
                if self.0[i] > self.0[k] {
                    l += 1;
                }
            }
        }
        l
    }

    pub fn order(&self) -> usize {
        let mut k = 1;
        let mut cur = self.clone();
        while !cur.is_identity() {
            cur = cur.compose(self);
            k += 1;
        }
        k
    }

    pub fn pow(&self, k: i64) -> Perm {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut acc = Perm::identity(self.n());
        for _ in 0..k.unsigned_abs() {
            acc = acc.compose(&base);
        }
        acc
    }

    /// Cycles, each starting at its smallest element, sorted by that element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cyc = vec![start];
            seen[start] = true;
            let mut x = self.0[start];
            while x != start {
                seen[x] = true;
                cyc.push(x);
                x = self.0[x];
            }
            out.push(cyc);
        }
        out
    }

    /// All permutations of `{0..n-1}` in lexicographic order.
    pub fn all(n: usize) -> Vec<Perm> {
        use itertools::Itertools;
        (0..n).permutations(n).map(Perm).collect()
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| (x + 1).to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// An `f`-tuple of integer `n`-vectors.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Weight {
    n: usize,
    comps: Vec<Vec<i64>>,
}

impl Weight {
    pub fn new(n: usize, comps: Vec<Vec<i64>>) -> Result<Self, RootDataError> {
        if comps.is_empty() {
            return Err(RootDataError::DimensionMismatch("weight needs at least one embedding".into()));
        }
        if let Some(bad) = comps.iter().find(|c| c.len() != n) {
            return Err(RootDataError::DimensionMismatch(format!("component {bad:?} has length != {n}")));
        }
        Ok(Weight { n, comps })
    }

    /// Single-embedding weight.
    pub fn single(v: Vec<i64>) -> Self {
        Weight { n: v.len(), comps: vec![v] }
    }

    pub fn zero(n: usize, f: usize) -> Self {
        Weight { n, comps: vec![vec![0; n]; f] }
    }

    /// `eta = (n-1, ..., 1, 0)` in every embedding.
    pub fn eta(n: usize, f: usize) -> Self {
        let v: Vec<i64> = (0..n as i64).rev().collect();
        Weight { n, comps: vec![v; f] }
    }

    /// Constant vector `(c, ..., c)` in every embedding.
    pub fn central(n: usize, f: usize, c: i64) -> Self {
        Weight { n, comps: vec![vec![c; n]; f] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn f(&self) -> usize {
        self.comps.len()
    }

    pub fn comp(&self, j: usize) -> &[i64] {
        &self.comps[j]
    }

    pub fn comps(&self) -> &[Vec<i64>] {
        &self.comps
    }

    fn check_same_shape(&self, other: &Weight) -> Result<(), RootDataError> {
        if self.n != other.n || self.f() != other.f() {
            return Err(RootDataError::DimensionMismatch(format!(
                "(n, f) = ({}, {}) vs ({}, {})",
                self.n,
                self.f(),
                other.n,
                other.f()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Weight) -> Result<Weight, RootDataError> {
        self.check_same_shape(other)?;
        let comps = self.comps.iter().zip(&other.comps).map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect()).collect();
        Ok(Weight { n: self.n, comps })
    }

    pub fn sub(&self, other: &Weight) -> Result<Weight, RootDataError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Weight {
        Weight { n: self.n, comps: self.comps.iter().map(|c| c.iter().map(|x| -x).collect()).collect() }
    }

    pub fn scale(&self, k: i64) -> Weight {
        Weight { n: self.n, comps: self.comps.iter().map(|c| c.iter().map(|x| k * x).collect()).collect() }
    }

    /// Weakly decreasing in every embedding.
    pub fn is_dominant(&self) -> bool {
        self.comps.iter().all(|c| c.windows(2).all(|w| w[0] >= w[1]))
    }

    /// Weakly increasing in every embedding.
    pub fn is_antidominant(&self) -> bool {
        self.comps.iter().all(|c| c.windows(2).all(|w| w[0] <= w[1]))
    }

    /// Componentwise action of an `f`-tuple of permutations.
    pub fn act(&self, w: &[Perm]) -> Result<Weight, RootDataError> {
        if w.len() != self.f() || w.iter().any(|p| p.n() != self.n) {
            return Err(RootDataError::DimensionMismatch("permutation tuple does not match weight".into()));
        }
        Ok(Weight { n: self.n, comps: self.comps.iter().zip(w).map(|(c, p)| p.act(c)).collect() })
    }

    /// `pi(lambda)_j = lambda_{j+1 mod f}`.
    pub fn rotate(&self) -> Weight {
        let f = self.f();
        Weight { n: self.n, comps: (0..f).map(|j| self.comps[(j + 1) % f].clone()).collect() }
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .comps
            .iter()
            .map(|c| format!("({})", c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")))
            .collect();
        write!(f, "{}", parts.join(""))
    }
}

/// Rotation of a permutation tuple, `pi(w)_j = w_{j+1 mod f}`.
pub fn rotate_perms(w: &[Perm]) -> Vec<Perm> {
    let f = w.len();
    (0..f).map(|j| w[(j + 1) % f].clone()).collect()
}

fn compose_tuples(a: &[Perm], b: &[Perm]) -> Vec<Perm> {
    a.iter().zip(b).map(|(x, y)| x.compose(y)).collect()
}

fn invert_tuple(a: &[Perm]) -> Vec<Perm> {
    a.iter().map(Perm::inverse).collect()
}

/// `t_nu w` with `nu` a cocharacter and `w` an `f`-tuple of permutations.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExtAffWeylElt {
    pub translation: Weight,
    pub finite_part: Vec<Perm>,
}

impl ExtAffWeylElt {
    pub fn new(translation: Weight, finite_part: Vec<Perm>) -> Result<Self, RootDataError> {
        if finite_part.len() != translation.f() || finite_part.iter().any(|p| p.n() != translation.n()) {
            return Err(RootDataError::DimensionMismatch("translation and finite part disagree".into()));
        }
        Ok(ExtAffWeylElt { translation, finite_part })
    }

    pub fn identity(n: usize, f: usize) -> Self {
        ExtAffWeylElt { translation: Weight::zero(n, f), finite_part: vec![Perm::identity(n); f] }
    }

    pub fn translation_by(nu: Weight) -> Self {
        let (n, f) = (nu.n(), nu.f());
        ExtAffWeylElt { translation: nu, finite_part: vec![Perm::identity(n); f] }
    }

    pub fn finite(w: Vec<Perm>) -> Self {
        let n = w[0].n();
        let f = w.len();
        ExtAffWeylElt { translation: Weight::zero(n, f), finite_part: w }
    }

    pub fn n(&self) -> usize {
        self.translation.n()
    }

    pub fn f(&self) -> usize {
        self.translation.f()
    }

    /// `(t_nu w)(t_nu' w') = t_{nu + w(nu')} w w'`.
    pub fn mul(&self, other: &Self) -> Result<Self, RootDataError> {
        let moved = other.translation.act(&self.finite_part)?;
        Ok(ExtAffWeylElt {
            translation: self.translation.add(&moved)?,
            finite_part: compose_tuples(&self.finite_part, &other.finite_part),
        })
    }

    /// `(t_nu w)^{-1} = t_{-w^{-1} nu} w^{-1}`.
    pub fn inverse(&self) -> Self {
        let winv = invert_tuple(&self.finite_part);
        let t = self.translation.act(&winv).expect("shapes agree").neg();
        ExtAffWeylElt { translation: t, finite_part: winv }
    }

    pub fn rotate(&self) -> Self {
        ExtAffWeylElt { translation: self.translation.rotate(), finite_part: rotate_perms(&self.finite_part) }
    }

    pub fn is_identity(&self) -> bool {
        self.translation.comps().iter().all(|c| c.iter().all(|&x| x == 0)) && self.finite_part.iter().all(Perm::is_identity)
    }
}

impl fmt::Display for ExtAffWeylElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w: Vec<String> = self.finite_part.iter().map(|p| p.to_string()).collect();
        write!(f, "t_{} {}", self.translation, w.join(""))
    }
}

/// A pair `(s, mu)`: an `f`-tuple of permutations and a weight.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Presentation {
    pub s: Vec<Perm>,
    pub mu: Weight,
}

impl Presentation {
    /// `m < <mu+eta, alpha> < p - m` for every positive root and embedding.
    pub fn is_m_generic(&self, m: i64, p: u64) -> bool {
        let n = self.mu.n();
        let shifted = self.mu.add(&Weight::eta(n, self.mu.f())).expect("shape");
        shifted.comps().iter().all(|c| {
            (0..n).all(|i| (i + 1..n).all(|k| {
                let v = c[i] - c[k];
                m < v && v < p as i64 - m
            }))
        })
    }
}

/// `<lambda_j, e_i - e_k>`.
pub fn pairing(lambda: &Weight, alpha: (usize, usize), embedding: usize) -> Result<i64, RootDataError> {
    let (i, k) = alpha;
    if embedding >= lambda.f() || i >= lambda.n() || k >= lambda.n() {
        return Err(RootDataError::IndexOutOfRange(format!("root ({i},{k}) embedding {embedding}")));
    }
    let c = lambda.comp(embedding);
    Ok(c[i] - c[k])
}

/// `t_nu w . mu = nu + w(mu + eta) - eta`.
pub fn dot_action(w: &ExtAffWeylElt, mu: &Weight) -> Result<Weight, RootDataError> {
    let eta = Weight::eta(mu.n(), mu.f());
    let moved = mu.add(&eta)?.act(&w.finite_part)?;
    w.translation.add(&moved)?.sub(&eta)
}

/// Strict inequalities `0 < <mu+eta, alpha> < p` for every positive root.
pub fn is_in_c0(mu: &Weight, p: u64) -> bool {
    let pres = Presentation { s: vec![Perm::identity(mu.n()); mu.f()], mu: mu.clone() };
    pres.is_m_generic(0, p)
}

/// `^{w~}(s, mu) = (w s pi(w)^{-1}, w~.mu - w s pi(w)^{-1} pi(nu))`.
pub fn twist_presentation(w: &ExtAffWeylElt, pres: &Presentation) -> Result<Presentation, RootDataError> {
    if pres.s.len() != w.f() || pres.mu.f() != w.f() || pres.mu.n() != w.n() {
        return Err(RootDataError::DimensionMismatch("twist data".into()));
    }
    let pw_inv = invert_tuple(&rotate_perms(&w.finite_part));
    let s_new = compose_tuples(&compose_tuples(&w.finite_part, &pres.s), &pw_inv);
    let correction = w.translation.rotate().act(&s_new)?;
    let mu_new = dot_action(w, &pres.mu)?.sub(&correction)?;
    Ok(Presentation { s: s_new, mu: mu_new })
}

/// Simple roots `alpha_i = e_i - e_{i+1}` lying inside one block.
fn levi_simple_roots(blocks: &[usize]) -> Vec<usize> {
    let mut out = Vec::new();
    let mut start = 0;
    for &b in blocks {
        for i in start..start + b - 1 {
            out.push(i);
        }
        start += b;
    }
    out
}

fn check_blocks(n: usize, blocks: &[usize]) -> Result<(), RootDataError> {
    if blocks.contains(&0) || blocks.iter().sum::<usize>() != n {
        return Err(RootDataError::InvalidPartition(format!("{blocks:?} is not a composition of {n}")));
    }
    Ok(())
}

/// Minimal-length representatives of `W_M \ W` for the standard Levi with
/// the given consecutive block sizes.
pub fn wm_reps(n: usize, levi_blocks: &[usize]) -> Result<Vec<Perm>, RootDataError> {
    check_blocks(n, levi_blocks)?;
    let simple = levi_simple_roots(levi_blocks);
    Ok(Perm::all(n)
        .into_iter()
        .filter(|w| {
            let l = w.length();
            simple.iter().all(|&i| Perm::simple(n, i).compose(w).length() > l)
        })
        .collect())
}

/// Factor `w = w_M w^M` with `w_M` in the Levi Weyl group and `w^M` a
/// minimal-length representative of `W_M w`.
pub fn levi_factorization(w: &Perm, levi_blocks: &[usize]) -> Result<(Perm, Perm), RootDataError> {
    let n = w.n();
    for rep in wm_reps(n, levi_blocks)? {
        let wm = w.compose(&rep.inverse());
        if in_levi(&wm, levi_blocks) {
            return Ok((wm, rep));
        }
    }
    unreachable!("every coset has a minimal representative")
}

/// Whether a permutation preserves each block.
pub fn in_levi(w: &Perm, levi_blocks: &[usize]) -> bool {
    let mut start = 0;
    for &b in levi_blocks {
        if (start..start + b).any(|i| w.apply(i) < start || w.apply(i) >= start + b) {
            return false;
        }
        start += b;
    }
    true
}

/// Antidominant element of the `W`-orbit, with a permutation tuple carrying
/// `mu` to it. Ties are broken by a stable sort.
pub fn antidominant_orbit_rep(mu: &Weight) -> (Weight, Vec<Perm>) {
    let mut comps = Vec::new();
    let mut perms = Vec::new();
    for c in mu.comps() {
        let mut order: Vec<usize> = (0..c.len()).collect();
        order.sort_by_key(|&i| c[i]);
        // (w mu)_i = mu_{order[i]} means w^{-1}(i) = order[i]
        let w = Perm(order).inverse();
        comps.push(w.act(c));
        perms.push(w);
    }
    (Weight { n: mu.n(), comps }, perms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(v: &[usize]) -> Perm {
        Perm::new(v.to_vec()).unwrap()
    }

    #[test]
    fn pairing_examples() {
        let eta = Weight::eta(3, 1);
        assert_eq!(pairing(&eta, (0, 2), 0).unwrap(), 2);
        assert_eq!(pairing(&Weight::single(vec![5, 5, 5]), (0, 1), 0).unwrap(), 0);
        assert_eq!(pairing(&Weight::single(vec![3, 1]), (0, 1), 0).unwrap(), 2);
        assert!(pairing(&eta, (0, 3), 0).is_err());
    }

    #[test]
    fn dot_action_examples() {
        let mu = Weight::single(vec![4, -2]);
        assert_eq!(dot_action(&ExtAffWeylElt::identity(2, 1), &mu).unwrap(), mu);
        let t = ExtAffWeylElt::translation_by(Weight::single(vec![1, 0]));
        assert_eq!(dot_action(&t, &Weight::single(vec![0, 0])).unwrap(), Weight::single(vec![1, 0]));
        let s = ExtAffWeylElt::finite(vec![Perm::simple(2, 0)]);
        // s(2,0) - (1,0) = (0,2) - (1,0)
        assert_eq!(dot_action(&s, &Weight::single(vec![1, 0])).unwrap(), Weight::single(vec![-1, 2]));
    }

    #[test]
    fn c0_examples() {
        assert!(is_in_c0(&Weight::single(vec![1, 0]), 5));
        assert!(!is_in_c0(&Weight::single(vec![4, 0]), 5));
        assert!(is_in_c0(&Weight::single(vec![0, 0, 0]), 7));
    }

    #[test]
    fn twist_examples() {
        let pres = Presentation { s: vec![Perm::simple(2, 0)], mu: Weight::single(vec![3, 1]) };
        assert_eq!(twist_presentation(&ExtAffWeylElt::identity(2, 1), &pres).unwrap(), pres);
        let nu = Weight::single(vec![2, -1]);
        let t = ExtAffWeylElt::translation_by(nu.clone());
        let got = twist_presentation(&t, &pres).unwrap();
        let expect = pres.mu.add(&nu).unwrap().sub(&nu.act(&pres.s).unwrap()).unwrap();
        assert_eq!(got, Presentation { s: pres.s.clone(), mu: expect });
    }

    #[test]
    fn wm_reps_examples() {
        assert_eq!(wm_reps(2, &[1, 1]).unwrap().len(), 2);
        assert_eq!(wm_reps(2, &[2]).unwrap(), vec![Perm::identity(2)]);
        assert_eq!(wm_reps(3, &[2, 1]).unwrap().len(), 3);
        assert_eq!(wm_reps(4, &[2, 2]).unwrap().len(), 6);
        assert!(wm_reps(3, &[2, 2]).is_err());
    }

    #[test]
    fn wm_reps_biject_with_cosets() {
        for (n, blocks) in [(3usize, vec![1usize, 2]), (4, vec![2, 1, 1]), (4, vec![1, 3]), (4, vec![2, 2])] {
            let reps = wm_reps(n, &blocks).unwrap();
            let levi: Vec<Perm> = Perm::all(n).into_iter().filter(|w| in_levi(w, &blocks)).collect();
            let mut covered = std::collections::BTreeSet::new();
            for r in &reps {
                for u in &levi {
                    assert!(covered.insert(u.compose(r)), "cosets overlap");
                }
            }
            assert_eq!(covered.len(), Perm::all(n).len());
        }
    }

    #[test]
    fn levi_factorization_examples() {
        let w = p(&[1, 0, 2]);
        let (wm, rep) = levi_factorization(&w, &[2, 1]).unwrap();
        assert_eq!(wm, w);
        assert!(rep.is_identity());
    }

    #[test]
    fn antidominant_examples() {
        let (rep, w) = antidominant_orbit_rep(&Weight::single(vec![3, 1, 2]));
        assert_eq!(rep, Weight::single(vec![1, 2, 3]));
        assert_eq!(Weight::single(vec![3, 1, 2]).act(&w).unwrap(), rep);
        let anti = Weight::single(vec![-1, 0, 4]);
        assert_eq!(antidominant_orbit_rep(&anti), (anti.clone(), vec![Perm::identity(3)]));
    }

    #[test]
    fn antidominant_unique_for_regular() {
        let mu = Weight::single(vec![5, -2, 7, 0]);
        let (rep, _) = antidominant_orbit_rep(&mu);
        let hits: Vec<Perm> = Perm::all(4).into_iter().filter(|w| w.act(mu.comp(0)) == rep.comp(0)).collect();
        assert_eq!(hits.len(), 1);
        let orbit: std::collections::BTreeSet<Vec<i64>> = Perm::all(4).iter().map(|w| w.act(mu.comp(0))).collect();
        assert_eq!(orbit.len(), 24);
        assert_eq!(antidominant_orbit_rep(&rep).0, rep);
    }

    fn arb_elt(n: usize, f: usize) -> impl Strategy<Value = ExtAffWeylElt> {
        let perms = proptest::collection::vec(Just((0..n).collect::<Vec<usize>>()).prop_shuffle().prop_map(Perm), f);
        let trans = proptest::collection::vec(proptest::collection::vec(-4i64..5, n), f);
        (trans, perms).prop_map(move |(t, w)| ExtAffWeylElt::new(Weight::new(n, t).unwrap(), w).unwrap())
    }

    fn arb_case() -> impl Strategy<Value = (ExtAffWeylElt, ExtAffWeylElt, Weight, Vec<Perm>)> {
        (1usize..5, 1usize..4).prop_flat_map(|(n, f)| {
            let mu = proptest::collection::vec(proptest::collection::vec(-6i64..7, n), f).prop_map(move |c| Weight::new(n, c).unwrap());
            (arb_elt(n, f), arb_elt(n, f), mu, arb_elt(n, f).prop_map(|e| e.finite_part))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn dot_is_group_action((w1, w2, mu, _) in arb_case()) {
            let lhs = dot_action(&w1, &dot_action(&w2, &mu).unwrap()).unwrap();
            let rhs = dot_action(&w1.mul(&w2).unwrap(), &mu).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn twist_cocycle((w1, w2, mu, s) in arb_case()) {
            let pres = Presentation { s, mu };
            let lhs = twist_presentation(&w1.mul(&w2).unwrap(), &pres).unwrap();
            let rhs = twist_presentation(&w1, &twist_presentation(&w2, &pres).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn inverse_is_inverse((w1, _, _, _) in arb_case()) {
            prop_assert!(w1.mul(&w1.inverse()).unwrap().is_identity());
            prop_assert!(w1.inverse().mul(&w1).unwrap().is_identity());
        }
    }
}
