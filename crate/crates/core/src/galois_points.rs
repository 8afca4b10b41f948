//! Galois-side points on the component of a Serre weight: tame characters,
//! ordinary points given by their diagonal characters, and the evaluation
//! maps of the mod-p Satake dictionary on them.
//!
//! A point is stored through its diagonal data only. The inertial part of a
//! character is an exponent per embedding (a power of the fundamental
//! character of that embedding) and its value on Frobenius is a formal unit.
//! The fundamental characters are normalized to take the value 1 on
//! Frobenius, so cyclotomic twists only move exponents.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hecke::ModPHeckeElt;
use crate::laurent::LaurentPoly;
use crate::ring::Ring;
use crate::root_data::{RootDataError, Weight};
use crate::scalars::{FieldCtx, ScalarError, SymbolicScalar};
use crate::tame_types::{SerreWeight, TameTypeError};

#[derive(Debug, Error)]
pub enum GaloisError {
    #[error("degenerate weight: {0}")]
    DegenerateWeight(String),
    #[error("block weight is not p-restricted: {0}")]
    WeightNotRestricted(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    TameType(#[from] TameTypeError),
    #[error(transparent)]
    RootData(#[from] RootDataError),
}

/// A tame character `ur_t prod_j omega_j^{a_j}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TameCharacter {
    exponents: Vec<i64>,
    frob_value: SymbolicScalar,
}

impl TameCharacter {
    /// Requires a Frobenius value that is a single monomial in Frobenius
    /// variables, hence a formal unit.
    pub fn new(exponents: Vec<i64>, frob_value: SymbolicScalar) -> Result<Self, GaloisError> {
        if frob_value.as_monomial().is_none() || !frob_value.is_pure_frobenius() {
            return Err(GaloisError::InvalidInput(format!("Frobenius value {frob_value} is not a unit monomial")));
        }
        Ok(TameCharacter { exponents, frob_value })
    }

    /// Specialization of a formal character: the value may be any scalar,
    /// including non-units.
    pub fn specialized(exponents: Vec<i64>, frob_value: SymbolicScalar) -> Self {
        TameCharacter { exponents, frob_value }
    }

    pub fn exponents(&self) -> &[i64] {
        &self.exponents
    }

    pub fn frob_value(&self) -> &SymbolicScalar {
        &self.frob_value
    }

    /// The restriction to inertia as a power of `omega_0`, reduced modulo
    /// `p^f - 1`, using `omega_j = omega_0^{p^j}`.
    pub fn inertial_exponent(&self, p: u64) -> i128 {
        let f = self.exponents.len() as u32;
        let modulus = (p as i128).pow(f) - 1;
        let sum: i128 = self.exponents.iter().enumerate().map(|(j, &a)| a as i128 * (p as i128).pow(j as u32)).sum();
        if modulus == 0 {
            0
        } else {
            sum.rem_euclid(modulus)
        }
    }
}

impl fmt::Display for TameCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ur({}) omega^{:?}", self.frob_value, self.exponents)
    }
}

/// An ordinary point on the component of `weight`, by its diagonal
/// characters `chi_1, ..., chi_n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrdinaryPoint {
    characters: Vec<TameCharacter>,
    weight: SerreWeight,
}

impl OrdinaryPoint {
    pub fn characters(&self) -> &[TameCharacter] {
        &self.characters
    }

    pub fn weight(&self) -> &SerreWeight {
        &self.weight
    }

    /// Frobenius values `t_1, ..., t_n`.
    pub fn frob_values(&self) -> Vec<SymbolicScalar> {
        self.characters.iter().map(|c| c.frob_value.clone()).collect()
    }

    /// Substitute Frobenius variables in every character. The result may
    /// carry non-unit values and stands for a degenerate point.
    pub fn specialize(&self, map: &BTreeMap<String, SymbolicScalar>) -> Result<OrdinaryPoint, GaloisError> {
        let characters = self
            .characters
            .iter()
            .map(|c| Ok(TameCharacter::specialized(c.exponents.clone(), c.frob_value.substitute(map)?)))
            .collect::<Result<_, GaloisError>>()?;
        Ok(OrdinaryPoint { characters, weight: self.weight.clone() })
    }

    /// The point with `t_i` and `t_{i+1}` interchanged (`i` 1-based), all
    /// exponents kept.
    pub fn swap_frobenius(&self, i: usize) -> Result<OrdinaryPoint, GaloisError> {
        if i == 0 || i >= self.characters.len() {
            return Err(GaloisError::InvalidInput(format!("swap position {i} out of range")));
        }
        let mut out = self.clone();
        let (a, b) = (out.characters[i - 1].frob_value.clone(), out.characters[i].frob_value.clone());
        out.characters[i - 1].frob_value = b;
        out.characters[i].frob_value = a;
        Ok(out)
    }

    /// The semisimplification as a sorted multiset of (inertial exponent,
    /// Frobenius value).
    pub fn semisimplification(&self) -> Vec<(i128, String)> {
        let p = self.weight.p();
        let mut out: Vec<(i128, String)> =
            self.characters.iter().map(|c| (c.inertial_exponent(p), c.frob_value.to_string())).collect();
        out.sort();
        out
    }
}

impl fmt::Display for OrdinaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.characters.iter().map(ToString::to_string).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// Evaluate a torus Hecke element at the point with coordinates the
/// Frobenius values: `x_i -> t_i`. Only a specialized point with a
/// non-invertible value can fail.
pub fn torus_eval(point: &[TameCharacter], h: &LaurentPoly<i128>) -> Result<SymbolicScalar, GaloisError> {
    if h.nvars() != point.len() {
        return Err(GaloisError::InvalidInput(format!("{} variables for {} characters", h.nvars(), point.len())));
    }
    let lifted = h.map_coeffs(|&c| SymbolicScalar::int(c));
    let vals: Vec<SymbolicScalar> = point.iter().map(|c| c.frob_value.clone()).collect();
    Ok(lifted.evaluate(&vals, SymbolicScalar::inverse)?)
}

/// The ordinary point with `chi_i = ur_{t_i} prod_j omega_j^{mu_{j,i} - (i - 1)}`
/// (`i` 1-based), the shift being by the longest element applied to `eta`.
///
/// Fails with `DegenerateWeight` when some consecutive gap is `0` at every
/// embedding or `p - 1` at every embedding; there the ratio
/// `chi_i / chi_{i+1}` is cyclotomic on inertia and the diagonal data no
/// longer determine the component.
pub fn ordinary_point(sigma: &SerreWeight, t: &[SymbolicScalar]) -> Result<OrdinaryPoint, GaloisError> {
    let n = sigma.n();
    if t.len() != n {
        return Err(GaloisError::InvalidInput(format!("{} Frobenius values for n = {n}", t.len())));
    }
    let lam = sigma.lambda();
    let p = sigma.p() as i64;
    for i in 0..n.saturating_sub(1) {
        let gaps: Vec<i64> = lam.comps().iter().map(|c| c[i] - c[i + 1]).collect();
        if gaps.iter().all(|&g| g == 0) || gaps.iter().all(|&g| g == p - 1) {
            return Err(GaloisError::DegenerateWeight(format!("gaps {gaps:?} at position {}", i + 1)));
        }
    }
    let characters = (0..n)
        .map(|i| TameCharacter::new(lam.comps().iter().map(|c| c[i] - i as i64).collect(), t[i].clone()))
        .collect::<Result<_, _>>()?;
    Ok(OrdinaryPoint { characters, weight: sigma.clone() })
}

/// Undo the cyclotomic twist: exponents shift by `+ (i - 1)`, landing in the
/// coordinates of the torus component of `mu`. Frobenius values are kept.
pub fn s_sigma_on_points(point: &OrdinaryPoint) -> Vec<TameCharacter> {
    point
        .characters
        .iter()
        .enumerate()
        .map(|(i, c)| TameCharacter {
            exponents: c.exponents.iter().map(|&a| a + i as i64).collect(),
            frob_value: c.frob_value.clone(),
        })
        .collect()
}

fn check_index(n: usize, i: usize) -> Result<(), GaloisError> {
    if i == 0 || i > n {
        return Err(GaloisError::InvalidInput(format!("index {i} outside 1..={n}")));
    }
    Ok(())
}

/// `f_i` at the point: `t_1 ... t_i`, `i` 1-based.
pub fn eval_fbar(sigma: &SerreWeight, i: usize, point: &OrdinaryPoint) -> Result<SymbolicScalar, GaloisError> {
    check_index(sigma.n(), i)?;
    Ok(point.characters[..i].iter().fold(SymbolicScalar::one(), |acc, c| acc.mul(&c.frob_value)))
}

/// Evaluate a mod-p Hecke element by `y_i -> f_i` and reduce coefficients
/// modulo `p`.
pub fn psi_bar_eval(sigma: &SerreWeight, h: &ModPHeckeElt, point: &OrdinaryPoint) -> Result<SymbolicScalar, GaloisError> {
    let n = sigma.n();
    if h.n() != n {
        return Err(GaloisError::InvalidInput(format!("Hecke element in {} variables for n = {n}", h.n())));
    }
    let vals = (1..=n).map(|i| eval_fbar(sigma, i, point)).collect::<Result<Vec<_>, _>>()?;
    let lifted = h.poly().map_coeffs(|&c| SymbolicScalar::int(c));
    Ok(lifted.evaluate(&vals, SymbolicScalar::inverse)?.coeffs_mod(sigma.p()))
}

/// Image of a mod-p Hecke element in the torus Hecke algebra:
/// `y_i -> x_1 ... x_i`.
pub fn satake_to_torus(h: &ModPHeckeElt) -> LaurentPoly<i128> {
    let n = h.n();
    let mut out = LaurentPoly::zero(n);
    for (d, &c) in h.poly().terms() {
        let exps: Vec<i64> = (0..n).map(|k| d[k..].iter().sum()).collect();
        out.add_term(exps, c);
    }
    out
}

/// `q^{-d(d-1)/2} prod_{i in I} q^{i-1} t_i` for a 1-based subset `I` of size
/// `d`, the normalized function at the crystalline lift of the ordinary
/// point of the principal series type.
pub fn crystalline_lift_eval(sigma: &SerreWeight, i_set: &[usize], t_tilde: &[SymbolicScalar]) -> Result<SymbolicScalar, GaloisError> {
    let n = sigma.n();
    if t_tilde.len() != n {
        return Err(GaloisError::InvalidInput(format!("{} lifted values for n = {n}", t_tilde.len())));
    }
    let mut seen = vec![false; n];
    for &i in i_set {
        check_index(n, i)?;
        if std::mem::replace(&mut seen[i - 1], true) {
            return Err(GaloisError::InvalidInput(format!("index {i} repeated")));
        }
    }
    let d = i_set.len() as i64;
    let mut acc = SymbolicScalar::q_pow(-d * (d - 1) / 2);
    for &i in i_set {
        acc = acc.mul(&SymbolicScalar::q_pow(i as i64 - 1)).mul(&t_tilde[i - 1]);
    }
    Ok(acc)
}

/// Reduction modulo the maximal ideal of a lifted value. Integral by
/// construction; the error paths are never hit on lift values.
pub fn reduce_lift(sigma: &SerreWeight, x: &SymbolicScalar) -> Result<SymbolicScalar, GaloisError> {
    Ok(x.reduce_mod_varpi(&FieldCtx::new(sigma.p(), 1, sigma.f() as u32))?)
}

/// Whether `f_i` is a unit at the point for every `i` in `I` (1-based, inside
/// `1..n-1`). Formal points always qualify; specialized points fail once some
/// `f_i` vanishes modulo the maximal ideal.
pub fn strata_membership(sigma: &SerreWeight, point: &OrdinaryPoint, i_set: &[usize]) -> Result<bool, GaloisError> {
    let ctx = FieldCtx::new(sigma.p(), 1, sigma.f() as u32);
    for &i in i_set {
        if i >= sigma.n() {
            return Err(GaloisError::InvalidInput(format!("stratum index {i} outside 1..{}", sigma.n())));
        }
        let value = eval_fbar(sigma, i, point)?;
        if value.valuation(&ctx).map(|v| v.doubled()) != Some(0) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn block_bounds(n: usize, i_set: &[usize]) -> Result<Vec<(usize, usize)>, GaloisError> {
    let mut cuts = vec![0];
    for &i in i_set {
        if i == 0 || i >= n || i <= *cuts.last().expect("nonempty") {
            return Err(GaloisError::InvalidInput(format!("{i_set:?} is not increasing inside 1..{n}")));
        }
        cuts.push(i);
    }
    cuts.push(n);
    Ok(cuts.windows(2).map(|w| (w[0], w[1])).collect())
}

/// Split the point along the standard Levi with blocks `(i_{k-1}, i_k]`.
///
/// The block on `(o, o + m]` has weight `mu_{o+1..o+m} - o`: the central
/// shift by the size of the preceding blocks absorbs the difference between
/// the ambient and the block twist, so each block character is returned
/// unchanged.
pub fn levi_image(sigma: &SerreWeight, point: &OrdinaryPoint, i_set: &[usize]) -> Result<Vec<(SerreWeight, OrdinaryPoint)>, GaloisError> {
    let n = sigma.n();
    if !strata_membership(sigma, point, i_set)? {
        return Err(GaloisError::InvalidInput(format!("point is outside the stratum {i_set:?}")));
    }
    let mut out = Vec::new();
    for (lo, hi) in block_bounds(n, i_set)? {
        let comps: Vec<Vec<i64>> = sigma.lambda().comps().iter().map(|c| c[lo..hi].iter().map(|&x| x - lo as i64).collect()).collect();
        let block_weight = SerreWeight::new(sigma.p(), Weight::new(hi - lo, comps)?)
            .map_err(|e| GaloisError::WeightNotRestricted(e.to_string()))?;
        let chars = point.characters[lo..hi].to_vec();
        for (k, c) in chars.iter().enumerate() {
            let expected: Vec<i64> = block_weight.lambda().comps().iter().map(|b| b[k] - k as i64).collect();
            if c.exponents != expected {
                return Err(GaloisError::InvalidInput(format!("character {} does not match the block weight", lo + k + 1)));
            }
        }
        out.push((block_weight.clone(), OrdinaryPoint { characters: chars, weight: block_weight }));
    }
    Ok(out)
}

/// Inverse of [`levi_image`]: undo the central shifts and concatenate.
pub fn levi_reassemble(blocks: &[(SerreWeight, OrdinaryPoint)]) -> Result<OrdinaryPoint, GaloisError> {
    let Some(first) = blocks.first() else {
        return Err(GaloisError::InvalidInput("no blocks".into()));
    };
    let (p, f) = (first.0.p(), first.0.f());
    let mut comps = vec![Vec::new(); f];
    let mut characters = Vec::new();
    let mut offset = 0i64;
    for (w, pt) in blocks {
        if w.p() != p || w.f() != f {
            return Err(GaloisError::InvalidInput("blocks over different fields".into()));
        }
        for (dst, src) in comps.iter_mut().zip(w.lambda().comps()) {
            dst.extend(src.iter().map(|&x| x + offset));
        }
        characters.extend(pt.characters.iter().cloned());
        offset += w.n() as i64;
    }
    let n = characters.len();
    let weight = SerreWeight::new(p, Weight::new(n, comps)?)?;
    Ok(OrdinaryPoint { characters, weight })
}

/// Formal Frobenius values `t1, ..., tn`.
pub fn formal_t(n: usize) -> Vec<SymbolicScalar> {
    (1..=n).map(|i| SymbolicScalar::var(&format!("t{i}"))).collect()
}
