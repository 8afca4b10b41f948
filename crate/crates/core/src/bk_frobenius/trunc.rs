//! Polynomials in `v` with [`SymbolicScalar`] coefficients, known modulo
//! `v^prec`. Exact elements (`prec = None`) arise from constants and from
//! products of exact elements; everything coming out of a family carries a
//! finite precision.

use std::fmt;

use crate::matrix::Mat;
use crate::ring::Ring;
use crate::scalars::SymbolicScalar;

use super::FrobError;

#[derive(Clone, PartialEq, Eq)]
pub struct TruncPoly {
    /// Coefficient of `v^k` at index `k`, trailing zeros trimmed.
    coeffs: Vec<SymbolicScalar>,
    /// `None` for an exact polynomial.
    prec: Option<usize>,
}

impl fmt::Debug for TruncPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for TruncPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| match k {
                0 => format!("({c})"),
                1 => format!("({c})*v"),
                _ => format!("({c})*v^{k}"),
            })
            .collect();
        let body = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
        match self.prec {
            Some(n) => write!(f, "{body} + O(v^{n})"),
            None => write!(f, "{body}"),
        }
    }
}

fn trim(mut coeffs: Vec<SymbolicScalar>, prec: Option<usize>) -> TruncPoly {
    if let Some(n) = prec {
        coeffs.truncate(n);
    }
    while coeffs.last().is_some_and(|c| c.is_zero()) {
        coeffs.pop();
    }
    TruncPoly { coeffs, prec }
}

fn min_prec(a: Option<usize>, b: Option<usize>) -> Option<usize> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl TruncPoly {
    pub fn constant(c: SymbolicScalar) -> Self {
        trim(vec![c], None)
    }

    /// `c v^k`, exact.
    pub fn monomial(c: SymbolicScalar, k: usize) -> Self {
        let mut coeffs = vec![SymbolicScalar::zero(); k];
        coeffs.push(c);
        trim(coeffs, None)
    }

    /// `v - c`, exact.
    pub fn linear(c: SymbolicScalar) -> Self {
        trim(vec![c.neg(), SymbolicScalar::one()], None)
    }

    pub fn from_coeffs(coeffs: Vec<SymbolicScalar>, prec: Option<usize>) -> Self {
        trim(coeffs, prec)
    }

    pub fn prec(&self) -> Option<usize> {
        self.prec
    }

    pub fn coeff(&self, k: usize) -> SymbolicScalar {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn coeffs(&self) -> &[SymbolicScalar] {
        &self.coeffs
    }

    /// Value modulo `v`.
    pub fn constant_term(&self) -> SymbolicScalar {
        self.coeff(0)
    }

    /// Degree of the stored representative, `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// `v`-adic valuation of the stored representative, `None` for zero.
    pub fn v_valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Reduce modulo `v^n`.
    pub fn truncate(&self, n: usize) -> Self {
        trim(self.coeffs.clone(), min_prec(self.prec, Some(n)))
    }

    /// Coefficient Frobenius, trivial on scalars and `v -> v^p`.
    pub fn phi(&self, p: usize) -> Self {
        let mut coeffs = vec![SymbolicScalar::zero(); self.coeffs.len().saturating_sub(1) * p + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs[k * p] = c.clone();
        }
        trim(coeffs, self.prec.map(|n| n * p))
    }

    /// Multiply by `v^k`. Negative shifts need enough `v`-divisibility and
    /// lose precision; a shift that leaves nothing known is an overflow.
    pub fn shift(&self, k: i64) -> Result<Self, FrobError> {
        if k >= 0 {
            let k = k as usize;
            let mut coeffs = vec![SymbolicScalar::zero(); k];
            coeffs.extend(self.coeffs.iter().cloned());
            return Ok(trim(coeffs, self.prec.map(|n| n + k)));
        }
        let k = k.unsigned_abs() as usize;
        if self.v_valuation().is_some_and(|val| val < k) {
            return Err(FrobError::NotInParabolic(format!("{self} is not divisible by v^{k}")));
        }
        let prec = match self.prec {
            Some(n) if n <= k => return Err(FrobError::TruncationOverflow(format!("dividing {self} by v^{k}"))),
            Some(n) => Some(n - k),
            None => None,
        };
        Ok(trim(self.coeffs.iter().skip(k).cloned().collect(), prec))
    }

    pub fn is_exact(&self) -> bool {
        self.prec.is_none()
    }
}

impl Ring for TruncPoly {
    fn zero() -> Self {
        TruncPoly { coeffs: Vec::new(), prec: None }
    }

    fn one() -> Self {
        TruncPoly::constant(SymbolicScalar::one())
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len).map(|k| self.coeff(k).add(&other.coeff(k))).collect();
        trim(coeffs, min_prec(self.prec, other.prec))
    }

    fn neg(&self) -> Self {
        TruncPoly { coeffs: self.coeffs.iter().map(Ring::neg).collect(), prec: self.prec }
    }

    fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return TruncPoly { coeffs: Vec::new(), prec: min_prec(self.prec, other.prec) };
        }
        let prec = min_prec(self.prec, other.prec);
        let full = self.coeffs.len() + other.coeffs.len() - 1;
        let len = prec.map_or(full, |n| n.min(full));
        let mut coeffs = vec![SymbolicScalar::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate().take(len) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(len - i) {
                if !b.is_zero() {
                    coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
                }
            }
        }
        trim(coeffs, prec)
    }
}

/// Matrix of constant terms.
pub fn mod_v(m: &Mat<TruncPoly>) -> Mat<SymbolicScalar> {
    m.map(TruncPoly::constant_term)
}

/// Reduce every entry modulo `v^n`.
pub fn truncate_mat(m: &Mat<TruncPoly>, n: usize) -> Mat<TruncPoly> {
    m.map(|x| x.truncate(n))
}

/// Lift a scalar matrix to constant polynomials.
pub fn constant_mat(m: &Mat<SymbolicScalar>) -> Mat<TruncPoly> {
    m.map(|c| TruncPoly::constant(c.clone()))
}

/// Inverse of an integral unit: a signed monomial in Frobenius variables
/// only (no `pi` or `q`).
pub fn unit_inverse(x: &SymbolicScalar) -> Option<SymbolicScalar> {
    if x.is_pure_frobenius() {
        x.inverse().ok()
    } else {
        None
    }
}

/// Inverse modulo `v^n` of a matrix whose reduction mod `v` has an integral
/// unit determinant (see [`unit_inverse`]).
pub fn inverse_mod_v_pow(m: &Mat<TruncPoly>, n: usize) -> Result<Mat<TruncPoly>, FrobError> {
    let size = m.rows();
    let m0 = mod_v(m);
    let det0 = m0.det();
    let det_inv = unit_inverse(&det0).ok_or_else(|| FrobError::NotInvertible(format!("determinant mod v is {det0}")))?;
    let inv0 = constant_mat(&m0.inverse_with(&det_inv));
    // m = m0 (1 + e) with e divisible by v, so (1 + e)^{-1} = sum (-e)^k
    let e = truncate_mat(&inv0.mul(m).sub(&Mat::identity(size)), n);
    let neg_e = e.scale(&TruncPoly::one().neg());
    let mut term = Mat::identity(size);
    let mut sum = Mat::identity(size);
    for _ in 1..n {
        term = truncate_mat(&term.mul(&neg_e), n);
        if term.is_zero() {
            break;
        }
        sum = sum.add(&term);
    }
    Ok(truncate_mat(&sum.mul(&inv0), n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: i128) -> SymbolicScalar {
        SymbolicScalar::int(x)
    }

    fn poly(xs: &[i128], prec: Option<usize>) -> TruncPoly {
        TruncPoly::from_coeffs(xs.iter().map(|&x| c(x)).collect(), prec)
    }

    #[test]
    fn arithmetic_respects_precision() {
        let a = poly(&[1, 2, 3], Some(3));
        let b = poly(&[1, 1], None);
        let prod = a.mul(&b);
        assert_eq!(prod, poly(&[1, 3, 5], Some(3)));
        assert_eq!(b.mul(&b), poly(&[1, 2, 1], None));
        assert_eq!(a.add(&b).prec(), Some(3));
    }

    #[test]
    fn phi_and_shift() {
        let a = poly(&[1, 2], Some(2));
        assert_eq!(a.phi(3), poly(&[1, 0, 0, 2], Some(6)));
        let b = poly(&[0, 0, 5], Some(4));
        assert_eq!(b.shift(-2).unwrap(), poly(&[5], Some(2)));
        assert!(matches!(b.shift(-3), Err(FrobError::NotInParabolic(_))));
        assert!(matches!(poly(&[0, 0, 1], Some(2)).shift(-2), Err(FrobError::TruncationOverflow(_))));
        assert_eq!(a.shift(1).unwrap(), poly(&[0, 1, 2], Some(3)));
    }

    #[test]
    fn matrix_inverse_modulo_power() {
        let n = 6;
        let pi = SymbolicScalar::pi_pow(1);
        assert!(inverse_mod_v_pow(&Mat::identity(2).scale(&TruncPoly::constant(pi)), 3).is_err());
        let non_unit = Mat::from_rows(vec![
            vec![TruncPoly::constant(c(3)).add(&TruncPoly::monomial(c(3), 1)), TruncPoly::monomial(c(2), 1)],
            vec![TruncPoly::constant(c(4)), TruncPoly::constant(c(-1)).add(&TruncPoly::monomial(c(1), 2))],
        ]);
        assert!(inverse_mod_v_pow(&non_unit, n).is_err(), "determinant -3 mod v is not a unit symbol");
        let good = Mat::from_rows(vec![
            vec![TruncPoly::constant(c(1)).add(&TruncPoly::monomial(c(3), 1)), TruncPoly::monomial(c(2), 1)],
            vec![TruncPoly::constant(c(4)), TruncPoly::constant(c(1)).add(&TruncPoly::monomial(c(1), 2))],
        ]);
        let inv = inverse_mod_v_pow(&good, n).unwrap();
        assert_eq!(truncate_mat(&good.mul(&inv), n), truncate_mat(&Mat::identity(2), n));
        assert_eq!(truncate_mat(&inv.mul(&good), n), truncate_mat(&Mat::identity(2), n));
    }
}
