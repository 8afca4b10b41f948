//! Multivariate Laurent polynomials with exponent vectors as keys.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use crate::ring::Ring;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LaurentPoly<C> {
    nvars: usize,
    terms: BTreeMap<Vec<i64>, C>,
}

impl<C: Ring> fmt::Debug for LaurentPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter()).finish()
    }
}

impl<C: Ring> LaurentPoly<C> {
    pub fn zero(nvars: usize) -> Self {
        LaurentPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: C) -> Self {
        Self::monomial(c, vec![0; nvars])
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, C::one())
    }

    pub fn monomial(c: C, exps: Vec<i64>) -> Self {
        let nvars = exps.len();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        LaurentPoly { nvars, terms }
    }

    /// The variable `x_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(C::one(), e)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &C)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, exps: &[i64]) -> C {
        self.terms.get(exps).cloned().unwrap_or_else(C::zero)
    }

    pub fn add_term(&mut self, exps: Vec<i64>, c: C) {
        assert_eq!(exps.len(), self.nvars, "exponent length mismatch");
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            Entry::Vacant(slot) => {
                slot.insert(c);
            }
            Entry::Occupied(mut slot) => {
                let sum = slot.get().add(&c);
                if sum.is_zero() {
                    slot.remove();
                } else {
                    *slot.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| c.neg())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = Self::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<i64> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1.mul(c2));
            }
        }
        out
    }

    pub fn scale(&self, c: &C) -> Self {
        self.map_coeffs(|x| x.mul(c))
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Keeps zero coefficients out of the result.
    pub fn map_coeffs<D: Ring>(&self, f: impl Fn(&C) -> D) -> LaurentPoly<D> {
        let mut out = LaurentPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), f(c));
        }
        out
    }

    pub fn try_map_coeffs<D: Ring, E>(&self, f: impl Fn(&C) -> Result<D, E>) -> Result<LaurentPoly<D>, E> {
        let mut out = LaurentPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), f(c)?);
        }
        Ok(out)
    }

    /// Renames variables: variable `i` becomes variable `perm[i]`.
    pub fn permute_vars(&self, perm: &[usize]) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut ne = vec![0; self.nvars];
            for (i, &x) in e.iter().enumerate() {
                ne[perm[i]] = x;
            }
            out.add_term(ne, c.clone());
        }
        out
    }

    /// Evaluate by substituting ring values; negative powers use `inv`.
    pub fn evaluate<E>(&self, vals: &[C], inv: impl Fn(&C) -> Result<C, E>) -> Result<C, E> {
        assert_eq!(vals.len(), self.nvars);
        let invs: Vec<Option<C>> = vals
            .iter()
            .enumerate()
            .map(|(i, v)| if self.terms.keys().any(|e| e[i] < 0) { inv(v).map(Some) } else { Ok(None) })
            .collect::<Result<_, E>>()?;
        let mut acc = C::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, &x) in e.iter().enumerate() {
                if x >= 0 {
                    t = t.mul(&vals[i].pow_u(x as u64));
                } else {
                    t = t.mul(&invs[i].as_ref().expect("inverse computed").pow_u(x.unsigned_abs()));
                }
            }
            acc = acc.add(&t);
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        let x = LaurentPoly::<i128>::var(2, 0);
        let y = LaurentPoly::<i128>::var(2, 1);
        let s = x.add(&y);
        let sq = s.mul(&s);
        assert_eq!(sq.coeff(&[1, 1]), 2);
        assert_eq!(sq.num_terms(), 3);
        let xinv = LaurentPoly::monomial(1i128, vec![-1, 0]);
        assert_eq!(x.mul(&xinv), LaurentPoly::one(2));
        assert!(s.sub(&s).is_zero());
    }

    #[test]
    fn permute_and_evaluate() {
        let p = LaurentPoly::monomial(3i128, vec![2, 0]);
        assert_eq!(p.permute_vars(&[1, 0]), LaurentPoly::monomial(3i128, vec![0, 2]));
        let v: Result<i128, ()> = p.evaluate(&[2, 5], |_| Err(()));
        assert_eq!(v, Ok(12));
    }
}
