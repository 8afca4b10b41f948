//! Exact coefficient ring: integer combinations of monomials
//! `pi^a * q^(b/2) * t1^e1 * ...` with formal Frobenius variables.
//!
//! `pi` and `q` are independent symbols. They only interact through the
//! valuation, where `v(pi) = 1` and `v(q) = e*f`.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ring::Ring;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("negative valuation {0}")]
    NegativeValuation(HalfInt),
    #[error("valuation-zero term `{0}` carries a pi or q exponent")]
    UnitAmbiguity(String),
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("parse error: {0}")]
    Parse(String),
}

/// The field data the valuation depends on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldCtx {
    pub p: u64,
    pub e: u32,
    pub f: u32,
}

impl FieldCtx {
    pub fn new(p: u64, e: u32, f: u32) -> Self {
        FieldCtx { p, e, f }
    }

    /// `q = p^f`.
    pub fn q(&self) -> u64 {
        self.p.pow(self.f)
    }
}

/// A half-integer stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HalfInt(pub i64);

impl HalfInt {
    pub fn from_int(v: i64) -> Self {
        HalfInt(2 * v)
    }
    pub fn doubled(&self) -> i64 {
        self.0
    }
    pub fn is_integer(&self) -> bool {
        self.0 % 2 == 0
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct ScalarMonomial {
    pub pi_exp: i64,
    /// Twice the exponent of `q`.
    pub q_exp_doubled: i64,
    pub frob_exps: BTreeMap<String, i64>,
}

impl ScalarMonomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn is_one(&self) -> bool {
        self.pi_exp == 0 && self.q_exp_doubled == 0 && self.frob_exps.is_empty()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut frob = self.frob_exps.clone();
        for (k, e) in &other.frob_exps {
            let slot = frob.entry(k.clone()).or_insert(0);
            *slot += e;
            if *slot == 0 {
                frob.remove(k);
            }
        }
        ScalarMonomial {
            pi_exp: self.pi_exp + other.pi_exp,
            q_exp_doubled: self.q_exp_doubled + other.q_exp_doubled,
            frob_exps: frob,
        }
    }

    pub fn inverse(&self) -> Self {
        ScalarMonomial {
            pi_exp: -self.pi_exp,
            q_exp_doubled: -self.q_exp_doubled,
            frob_exps: self.frob_exps.iter().map(|(k, e)| (k.clone(), -e)).collect(),
        }
    }

    pub fn pow(&self, k: i64) -> Self {
        ScalarMonomial {
            pi_exp: self.pi_exp * k,
            q_exp_doubled: self.q_exp_doubled * k,
            frob_exps: if k == 0 {
                BTreeMap::new()
            } else {
                self.frob_exps.iter().map(|(n, e)| (n.clone(), e * k)).collect()
            },
        }
    }

    /// Doubled valuation `2*pi_exp + q_exp_doubled*e*f`.
    pub fn valuation_doubled(&self, ctx: &FieldCtx) -> i64 {
        2 * self.pi_exp + self.q_exp_doubled * (ctx.e as i64) * (ctx.f as i64)
    }

    fn fmt_factors(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.pi_exp != 0 {
            out.push(format!("pi^{}", self.pi_exp));
        }
        if self.q_exp_doubled != 0 {
            out.push(format!("q^({}/2)", self.q_exp_doubled));
        }
        for (k, e) in &self.frob_exps {
            if *e == 1 {
                out.push(k.clone());
            } else {
                out.push(format!("{k}^{e}"));
            }
        }
        out
    }
}

impl fmt::Display for ScalarMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts = self.fmt_factors();
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join(" * "))
        }
    }
}

/// Finite integer combination of [`ScalarMonomial`]s in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct SymbolicScalar {
    terms: BTreeMap<ScalarMonomial, i128>,
}

impl SymbolicScalar {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::int(1)
    }

    pub fn int(c: i128) -> Self {
        Self::term(c, ScalarMonomial::one())
    }

    pub fn term(c: i128, m: ScalarMonomial) -> Self {
        let mut terms = BTreeMap::new();
        if c != 0 {
            terms.insert(m, c);
        }
        SymbolicScalar { terms }
    }

    pub fn pi_pow(a: i64) -> Self {
        Self::term(1, ScalarMonomial { pi_exp: a, ..Default::default() })
    }

    /// `q^(b/2)`.
    pub fn q_half_pow(b: i64) -> Self {
        Self::term(1, ScalarMonomial { q_exp_doubled: b, ..Default::default() })
    }

    pub fn q_pow(c: i64) -> Self {
        Self::q_half_pow(2 * c)
    }

    pub fn var(name: &str) -> Self {
        Self::var_pow(name, 1)
    }

    pub fn var_pow(name: &str, e: i64) -> Self {
        let mut frob = BTreeMap::new();
        if e != 0 {
            frob.insert(name.to_string(), e);
        }
        Self::term(1, ScalarMonomial { frob_exps: frob, ..Default::default() })
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ScalarMonomial, &i128)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// The single `(coefficient, monomial)` pair, if there is exactly one.
    pub fn as_monomial(&self) -> Option<(i128, &ScalarMonomial)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(m, c)| (*c, m))
        } else {
            None
        }
    }

    /// Integer value if the scalar is a constant.
    pub fn as_int(&self) -> Option<i128> {
        if self.is_zero() {
            return Some(0);
        }
        match self.as_monomial() {
            Some((c, m)) if m.is_one() => Some(c),
            _ => None,
        }
    }

    fn insert(&mut self, m: ScalarMonomial, c: i128) {
        if c == 0 {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(slot) => {
                slot.insert(c);
            }
            Entry::Occupied(mut slot) => {
                let sum = slot.get().checked_add(c).expect("coefficient overflow");
                if sum == 0 {
                    slot.remove();
                } else {
                    *slot.get_mut() = sum;
                }
            }
        }
    }

    pub fn scale(&self, c: i128) -> Self {
        if c == 0 {
            return Self::zero();
        }
        SymbolicScalar {
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (m.clone(), v.checked_mul(c).expect("coefficient overflow")))
                .collect(),
        }
    }

    pub fn mul_monomial(&self, m: &ScalarMonomial) -> Self {
        SymbolicScalar {
            terms: self.terms.iter().map(|(k, v)| (k.mul(m), *v)).collect(),
        }
    }

    /// Inverse of a single monomial with coefficient `+-1`.
    pub fn inverse(&self) -> Result<Self, ScalarError> {
        match self.as_monomial() {
            Some((c, m)) if c == 1 || c == -1 => Ok(Self::term(c, m.inverse())),
            _ => Err(ScalarError::NotInvertible(self.to_string())),
        }
    }

    /// Integer power; negative exponents need [`SymbolicScalar::inverse`].
    pub fn pow(&self, k: i64) -> Result<Self, ScalarError> {
        if k >= 0 {
            Ok(self.pow_u(k as u64))
        } else {
            Ok(self.inverse()?.pow_u(k.unsigned_abs()))
        }
    }

    /// Formal valuation; `None` stands for `+infinity`.
    ///
    /// Integer coefficients count as units, so `3` has valuation 0 even when
    /// `p = 3`. Callers that need p-content must track it themselves.
    pub fn valuation(&self, ctx: &FieldCtx) -> Option<HalfInt> {
        self.terms.keys().map(|m| HalfInt(m.valuation_doubled(ctx))).min()
    }

    /// Reduction modulo the maximal ideal.
    pub fn reduce_mod_varpi(&self, ctx: &FieldCtx) -> Result<SymbolicScalar, ScalarError> {
        let Some(v) = self.valuation(ctx) else {
            return Ok(Self::zero());
        };
        if v.0 < 0 {
            return Err(ScalarError::NegativeValuation(v));
        }
        let p = ctx.p as i128;
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            if m.valuation_doubled(ctx) != 0 {
                continue;
            }
            if m.pi_exp != 0 || m.q_exp_doubled != 0 {
                return Err(ScalarError::UnitAmbiguity(Self::term(*c, m.clone()).to_string()));
            }
            out.insert(m.clone(), c.rem_euclid(p));
        }
        Ok(out)
    }

    /// Coefficients reduced into `[0, p)`.
    pub fn coeffs_mod(&self, p: u64) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            out.insert(m.clone(), c.rem_euclid(p as i128));
        }
        out
    }

    /// Substitute Frobenius variables. Variables missing from `map` are kept.
    pub fn substitute(&self, map: &BTreeMap<String, SymbolicScalar>) -> Result<Self, ScalarError> {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut base = ScalarMonomial { pi_exp: m.pi_exp, q_exp_doubled: m.q_exp_doubled, ..Default::default() };
            let mut acc = Self::int(*c);
            for (name, e) in &m.frob_exps {
                match map.get(name) {
                    Some(val) => acc = acc.mul(&val.pow(*e)?),
                    None => base = base.mul(&ScalarMonomial { frob_exps: [(name.clone(), *e)].into(), ..Default::default() }),
                }
            }
            out = out.add(&acc.mul_monomial(&base));
        }
        Ok(out)
    }

    /// Rename Frobenius variables.
    pub fn rename(&self, map: &BTreeMap<String, String>) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut nm = ScalarMonomial { pi_exp: m.pi_exp, q_exp_doubled: m.q_exp_doubled, ..Default::default() };
            for (name, e) in &m.frob_exps {
                let target = map.get(name).cloned().unwrap_or_else(|| name.clone());
                nm = nm.mul(&ScalarMonomial { frob_exps: [(target, *e)].into(), ..Default::default() });
            }
            out.insert(nm, *c);
        }
        out
    }

    /// True if no term carries a pi or q exponent.
    pub fn is_pure_frobenius(&self) -> bool {
        self.terms.keys().all(|m| m.pi_exp == 0 && m.q_exp_doubled == 0)
    }
}

impl Ring for SymbolicScalar {
    fn zero() -> Self {
        SymbolicScalar::zero()
    }
    fn one() -> Self {
        SymbolicScalar::one()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert(m.clone(), *c);
        }
        out
    }
    fn neg(&self) -> Self {
        self.scale(-1)
    }
    fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.insert(m1.mul(m2), c1.checked_mul(*c2).expect("coefficient overflow"));
            }
        }
        out
    }
    fn from_int(c: i64) -> Self {
        Self::int(c as i128)
    }
}

impl std::ops::Add for SymbolicScalar {
    type Output = SymbolicScalar;
    fn add(self, rhs: Self) -> Self {
        Ring::add(&self, &rhs)
    }
}

impl std::ops::Sub for SymbolicScalar {
    type Output = SymbolicScalar;
    fn sub(self, rhs: Self) -> Self {
        Ring::sub(&self, &rhs)
    }
}

impl std::ops::Mul for SymbolicScalar {
    type Output = SymbolicScalar;
    fn mul(self, rhs: Self) -> Self {
        Ring::mul(&self, &rhs)
    }
}

impl std::ops::Neg for SymbolicScalar {
    type Output = SymbolicScalar;
    fn neg(self) -> Self {
        Ring::neg(&self)
    }
}

impl fmt::Display for SymbolicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let rendered: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut parts = vec![c.to_string()];
                parts.extend(m.fmt_factors());
                parts.join(" * ")
            })
            .collect();
        write!(f, "{}", rendered.join(" + "))
    }
}

fn parse_factor(tok: &str) -> Result<SymbolicScalar, ScalarError> {
    let tok = tok.trim();
    let err = || ScalarError::Parse(format!("bad factor `{tok}`"));
    if tok.is_empty() {
        return Err(err());
    }
    if let Ok(c) = tok.parse::<i128>() {
        return Ok(SymbolicScalar::int(c));
    }
    let (base, exp) = match tok.split_once('^') {
        Some((b, e)) => (b.trim(), Some(e.trim())),
        None => (tok, None),
    };
    if base == "q" {
        let doubled = match exp {
            None => 2,
            Some(e) => {
                let inner = e.trim_start_matches('(').trim_end_matches(')');
                match inner.split_once('/') {
                    Some((num, "2")) => num.trim().parse::<i64>().map_err(|_| err())?,
                    Some(_) => return Err(err()),
                    None => 2 * inner.parse::<i64>().map_err(|_| err())?,
                }
            }
        };
        return Ok(SymbolicScalar::q_half_pow(doubled));
    }
    let e = match exp {
        None => 1,
        Some(e) => e.trim_start_matches('(').trim_end_matches(')').parse::<i64>().map_err(|_| err())?,
    };
    if base == "pi" {
        return Ok(SymbolicScalar::pi_pow(e));
    }
    let valid = base.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && base.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    if !valid {
        return Err(err());
    }
    Ok(SymbolicScalar::var_pow(base, e))
}

impl FromStr for SymbolicScalar {
    type Err = ScalarError;

    /// Parses the canonical text form, e.g. `3 * pi^2 * q^(-1/2) * t1^2 + -1 * t2`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(ScalarError::Parse("empty scalar".into()));
        }
        let mut out = SymbolicScalar::zero();
        for term in s.split(" + ") {
            let mut acc = SymbolicScalar::one();
            for factor in term.split('*') {
                acc = Ring::mul(&acc, &parse_factor(factor)?);
            }
            out = Ring::add(&out, &acc);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ctx(e: u32, f: u32) -> FieldCtx {
        FieldCtx::new(5, e, f)
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(SymbolicScalar::pi_pow(2).valuation(&ctx(1, 1)), Some(HalfInt::from_int(2)));
        assert_eq!(SymbolicScalar::q_pow(-1).valuation(&ctx(1, 2)), Some(HalfInt::from_int(-2)));
        let s = Ring::mul(
            &SymbolicScalar::q_pow(-1),
            &Ring::mul(&SymbolicScalar::q_pow(1), &Ring::mul(&SymbolicScalar::var("t1"), &SymbolicScalar::var("t3"))),
        );
        assert_eq!(s.valuation(&ctx(1, 1)), Some(HalfInt::from_int(0)));
        assert_eq!(SymbolicScalar::zero().valuation(&ctx(1, 1)), None);
        assert_eq!(SymbolicScalar::q_half_pow(1).valuation(&ctx(1, 1)), Some(HalfInt(1)));
    }

    #[test]
    fn reduction_examples() {
        let c = ctx(1, 1);
        let t12 = Ring::mul(&SymbolicScalar::var("t1"), &SymbolicScalar::var("t2"));
        let s = Ring::mul(&Ring::mul(&SymbolicScalar::q_pow(-1), &SymbolicScalar::q_pow(1)), &t12);
        assert_eq!(s.reduce_mod_varpi(&c).unwrap(), t12);
        let s = Ring::mul(&SymbolicScalar::q_pow(1), &SymbolicScalar::var("t1"));
        assert!(s.reduce_mod_varpi(&c).unwrap().is_zero());
        let s = Ring::mul(&SymbolicScalar::pi_pow(1), &SymbolicScalar::q_pow(-1));
        assert!(matches!(s.reduce_mod_varpi(&c), Err(ScalarError::UnitAmbiguity(_))));
        assert!(matches!(SymbolicScalar::pi_pow(-1).reduce_mod_varpi(&c), Err(ScalarError::NegativeValuation(_))));
        assert_eq!(SymbolicScalar::int(7).reduce_mod_varpi(&c).unwrap(), SymbolicScalar::int(2));
    }

    #[test]
    fn text_round_trip() {
        let s: SymbolicScalar = "3 * pi^2 * q^(-1/2) * t1^2 + -1 * t2".parse().unwrap();
        assert_eq!(s.to_string().parse::<SymbolicScalar>().unwrap(), s);
        assert_eq!("0".parse::<SymbolicScalar>().unwrap(), SymbolicScalar::zero());
        assert_eq!(SymbolicScalar::q_pow(1).to_string(), "1 * q^(2/2)");
        assert!("3 * %".parse::<SymbolicScalar>().is_err());
    }

    #[test]
    fn substitute_and_inverse() {
        let s: SymbolicScalar = "2 * x^-1 * y".parse().unwrap();
        let map = [("x".to_string(), SymbolicScalar::q_pow(1))].into();
        let out = s.substitute(&map).unwrap();
        assert_eq!(out, "2 * q^(-2/2) * y".parse().unwrap());
        assert!(SymbolicScalar::int(2).inverse().is_err());
        let m = SymbolicScalar::var("t");
        assert_eq!(Ring::mul(&m, &m.inverse().unwrap()), SymbolicScalar::one());
    }

    fn arb_scalar() -> impl Strategy<Value = SymbolicScalar> {
        let mono = (-2i64..3, -3i64..4, proptest::collection::btree_map(prop_oneof!["t1", "t2", "t3"], -2i64..3, 0..3));
        proptest::collection::vec((-4i128..5, mono), 0..4).prop_map(|v| {
            let mut s = SymbolicScalar::zero();
            for (c, (a, b, fr)) in v {
                let fr: BTreeMap<String, i64> = fr.into_iter().filter(|(_, e)| *e != 0).collect();
                let m = ScalarMonomial { pi_exp: a, q_exp_doubled: b, frob_exps: fr };
                s = Ring::add(&s, &SymbolicScalar::term(c, m));
            }
            s
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_scalar(), b in arb_scalar(), c in arb_scalar()) {
            prop_assert_eq!(Ring::mul(&Ring::mul(&a, &b), &c), Ring::mul(&a, &Ring::mul(&b, &c)));
            prop_assert_eq!(Ring::mul(&a, &Ring::add(&b, &c)), Ring::add(&Ring::mul(&a, &b), &Ring::mul(&a, &c)));
            prop_assert_eq!(Ring::mul(&a, &b), Ring::mul(&b, &a));
            prop_assert!(Ring::sub(&a, &a).is_zero());
        }

        #[test]
        fn ultrametric(a in arb_scalar(), b in arb_scalar(), e in 1u32..3, f in 1u32..3) {
            let c = ctx(e, f);
            let s = Ring::add(&a, &b);
            if let (Some(va), Some(vb), Some(vs)) = (a.valuation(&c), b.valuation(&c), s.valuation(&c)) {
                prop_assert!(vs >= va.min(vb));
            }
        }

        #[test]
        fn monomial_valuation_additive(a in -3i64..4, b in -3i64..4, a2 in -3i64..4, b2 in -3i64..4) {
            let c = ctx(2, 2);
            let x = Ring::mul(&SymbolicScalar::pi_pow(a), &SymbolicScalar::q_half_pow(b));
            let y = Ring::mul(&SymbolicScalar::pi_pow(a2), &SymbolicScalar::q_half_pow(b2));
            let vx = x.valuation(&c).unwrap().0;
            let vy = y.valuation(&c).unwrap().0;
            prop_assert_eq!(Ring::mul(&x, &y).valuation(&c).unwrap().0, vx + vy);
        }

        #[test]
        fn reduction_multiplicative(a in arb_scalar(), b in arb_scalar()) {
            let c = ctx(1, 1);
            if let (Ok(ra), Ok(rb), Ok(rab)) = (a.reduce_mod_varpi(&c), b.reduce_mod_varpi(&c), Ring::mul(&a, &b).reduce_mod_varpi(&c)) {
                prop_assert_eq!(Ring::mul(&ra, &rb).coeffs_mod(5), rab);
            }
        }

        #[test]
        fn text_form_round_trips(a in arb_scalar()) {
            prop_assert_eq!(a.to_string().parse::<SymbolicScalar>().unwrap(), a);
        }
    }

    #[test]
    fn reduction_identity_on_pure_frobenius() {
        let s: SymbolicScalar = "2 * t1^2 * t2 + 3 * t3^-1".parse().unwrap();
        assert_eq!(s.reduce_mod_varpi(&ctx(1, 1)).unwrap(), s);
    }
}
