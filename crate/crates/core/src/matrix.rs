//! Dense square matrices over an exact [`Ring`], with division-free
//! determinants and principal-minor sums.

use std::fmt;

use itertools::Itertools;

use crate::ring::Ring;

#[derive(Clone, PartialEq, Eq)]
pub struct Mat<R> {
    rows: usize,
    cols: usize,
    data: Vec<R>,
}

impl<R: Ring> fmt::Debug for Mat<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<&R>> = (0..self.rows).map(|i| (0..self.cols).map(|j| self.get(i, j)).collect()).collect();
        f.debug_struct("Mat").field("rows", &rows).finish()
    }
}

impl<R: Ring> Mat<R> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![R::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, R::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<R>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged matrix rows");
        Mat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> R) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn diagonal(entries: &[R]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            m.set(i, i, e.clone());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &R {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: R) {
        self.data[i * self.cols + j] = v;
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> Mat<S> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn try_map<S: Ring, E>(&self, f: impl Fn(&R) -> Result<S, E>) -> Result<Mat<S>, E> {
        let data = self.data.iter().map(f).collect::<Result<Vec<_>, E>>()?;
        Ok(Mat { rows: self.rows, cols: self.cols, data })
    }

    pub fn entries(&self) -> impl Iterator<Item = &R> {
        self.data.iter()
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let v = out.get(i, j).add(&a.mul(b));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&other.data).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&other.data).map(|(a, b)| a.sub(b)).collect() }
    }

    pub fn scale(&self, c: &R) -> Self {
        self.map(|x| x.mul(c))
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }

    /// Block-diagonal sum.
    pub fn block_diag(a: &Self, b: &Self) -> Self {
        let n = a.rows + b.rows;
        let m = a.cols + b.cols;
        Self::from_fn(n, m, |i, j| {
            if i < a.rows && j < a.cols {
                a.get(i, j).clone()
            } else if i >= a.rows && j >= a.cols {
                b.get(i - a.rows, j - a.cols).clone()
            } else {
                R::zero()
            }
        })
    }

    /// Division-free determinant by cofactor expansion along the first row.
    pub fn det(&self) -> R {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let idx: Vec<usize> = (0..self.cols).collect();
        self.det_rec(0, &idx)
    }

    fn det_rec(&self, row: usize, cols: &[usize]) -> R {
        match cols.len() {
            0 => R::one(),
            1 => self.get(row, cols[0]).clone(),
            2 => {
                let a = self.get(row, cols[0]).mul(self.get(row + 1, cols[1]));
                let b = self.get(row, cols[1]).mul(self.get(row + 1, cols[0]));
                a.sub(&b)
            }
            _ => {
                let mut acc = R::zero();
                for (k, &c) in cols.iter().enumerate() {
                    let a = self.get(row, c);
                    if a.is_zero() {
                        continue;
                    }
                    let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
                    let term = a.mul(&self.det_rec(row + 1, &rest));
                    acc = if k % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
                }
                acc
            }
        }
    }

    /// Minor on the given (sorted) rows and columns.
    pub fn minor(&self, rows: &[usize], cols: &[usize]) -> R {
        self.submatrix(rows, cols).det()
    }

    /// Sum of the principal `d x d` minors, which is `(-1)^d` times the
    /// coefficient of `x^(n-d)` in the characteristic polynomial.
    pub fn principal_minor_sum(&self, d: usize) -> R {
        assert_eq!(self.rows, self.cols);
        if d == 0 {
            return R::one();
        }
        let mut acc = R::zero();
        for s in (0..self.rows).combinations(d) {
            acc = acc.add(&self.minor(&s, &s));
        }
        acc
    }

    /// Adjugate matrix, so that `A * adj(A) = det(A) * I`.
    pub fn adjugate(&self) -> Self {
        let n = self.rows;
        assert_eq!(n, self.cols);
        if n == 1 {
            return Self::identity(1);
        }
        Self::from_fn(n, n, |i, j| {
            let rows: Vec<usize> = (0..n).filter(|&r| r != j).collect();
            let cols: Vec<usize> = (0..n).filter(|&c| c != i).collect();
            let m = self.minor(&rows, &cols);
            if (i + j) % 2 == 0 {
                m
            } else {
                m.neg()
            }
        })
    }

    /// Inverse, given an inverse of the determinant.
    pub fn inverse_with(&self, det_inv: &R) -> Self {
        self.adjugate().scale(det_inv)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }
}

/// Permutation matrix with `e_i -> e_{s(i)}`.
pub fn perm_matrix<R: Ring>(s: &[usize]) -> Mat<R> {
    let n = s.len();
    let mut m = Mat::zeros(n, n);
    for (i, &si) in s.iter().enumerate() {
        m.set(si, i, R::one());
    }
    m
}

/// `Ad(s)(X) = P_s X P_s^{-1}`, i.e. `Ad(s)(X)[s(i), s(k)] = X[i, k]`.
pub fn conj_perm<R: Ring>(s: &[usize], x: &Mat<R>) -> Mat<R> {
    let n = s.len();
    let mut out = Mat::zeros(n, n);
    for i in 0..n {
        for k in 0..n {
            out.set(s[i], s[k], x.get(i, k).clone());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_and_adjugate() {
        let a: Mat<i128> = Mat::from_rows(vec![vec![2, 1, 0], vec![1, 3, 1], vec![0, 1, 4]]);
        assert_eq!(a.det(), 18);
        let prod = a.mul(&a.adjugate());
        assert_eq!(prod, Mat::identity(3).scale(&18));
    }

    #[test]
    fn principal_minors_match_char_poly() {
        let a: Mat<i128> = Mat::from_rows(vec![vec![1, 2], vec![3, 4]]);
        assert_eq!(a.principal_minor_sum(1), 5);
        assert_eq!(a.principal_minor_sum(2), -2);
    }

    #[test]
    fn perm_conjugation_agrees_with_matrices() {
        let s = vec![2, 0, 1];
        let x: Mat<i128> = Mat::from_fn(3, 3, |i, j| (3 * i + j) as i128);
        let p = perm_matrix::<i128>(&s);
        let pinv = perm_matrix::<i128>(&[1, 2, 0]);
        assert_eq!(conj_perm(&s, &x), p.mul(&x).mul(&pinv));
    }
}
