//! Minimal commutative ring interface shared by the matrix and polynomial
//! containers.

use std::fmt::Debug;

/// A commutative ring with exact arithmetic.
pub trait Ring: Clone + PartialEq + Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, other: &Self) -> Self;

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    fn from_int(c: i64) -> Self {
        let mut acc = Self::zero();
        let unit = if c < 0 { Self::one().neg() } else { Self::one() };
        for _ in 0..c.unsigned_abs() {
            acc = acc.add(&unit);
        }
        acc
    }

    fn pow_u(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }
}

impl Ring for i128 {
    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn add(&self, other: &Self) -> Self {
        self.checked_add(*other).expect("i128 overflow in add")
    }
    fn neg(&self) -> Self {
        -*self
    }
    fn mul(&self, other: &Self) -> Self {
        self.checked_mul(*other).expect("i128 overflow in mul")
    }
    fn from_int(c: i64) -> Self {
        c as i128
    }
}

/// Elementary symmetric polynomial `e_d` of the given values.
pub fn elementary_symmetric<R: Ring>(values: &[R], d: usize) -> R {
    // e_k table updated one value at a time
    let mut e = vec![R::zero(); d + 1];
    e[0] = R::one();
    for v in values {
        for k in (1..=d).rev() {
            let t = e[k - 1].mul(v);
            e[k] = e[k].add(&t);
        }
    }
    e[d].clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn elementary_symmetric_small() {
        let v: Vec<i128> = vec![1, 2, 3];
        assert_eq!(elementary_symmetric(&v, 0), 1);
        assert_eq!(elementary_symmetric(&v, 1), 6);
        assert_eq!(elementary_symmetric(&v, 2), 11);
        assert_eq!(elementary_symmetric(&v, 3), 6);
        assert_eq!(elementary_symmetric(&v, 4), 0);
    }

    #[test]
    fn from_int_and_pow() {
        assert_eq!(<i128 as Ring>::from_int(-7), -7);
        assert_eq!(3i128.pow_u(5), 243);
    }
}
