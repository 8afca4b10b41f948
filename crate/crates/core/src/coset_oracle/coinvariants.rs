//! Coinvariants of principal series of `GL_n(F_q)` under the lower
//! unipotent radical, computed by dense linear algebra over `F_q`.
//!
//! `Ind_B^G chi` is the space of `f` with `f(bg) = chi(b) f(g)` and right
//! translation action; it is stored by its values on canonical
//! representatives of `B \ G`.

use std::collections::{HashMap, VecDeque};

use super::{inv_mod_p, pow_mod, rank_mod_p, OracleError};
use crate::root_data::Perm;

type Mat = Vec<Vec<i64>>;

fn mat_mul(a: &Mat, b: &Mat, q: i64) -> Mat {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum::<i64>().rem_euclid(q)).collect())
        .collect()
}

fn identity(n: usize) -> Mat {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

/// Writes `g = b * rep` with `b` upper triangular and `rep` the canonical
/// representative of `B g`; returns `rep` and the diagonal of `b`.
fn canonical(g: &Mat, q: i64) -> (Mat, Vec<i64>) {
    let n = g.len();
    let mut rep = vec![vec![0i64; n]; n];
    let mut pivots = vec![0usize; n];
    let mut diag = vec![0i64; n];
    for i in (0..n).rev() {
        let mut v = g[i].clone();
        // rows below are reduced against the ones further down, so clear bottom-up
        for k in (i + 1..n).rev() {
            let c = v[pivots[k]];
            if c != 0 {
                for t in 0..n {
                    v[t] = (v[t] - c * rep[k][t]).rem_euclid(q);
                }
            }
        }
        let piv = v.iter().position(|&x| x != 0).expect("invertible matrix");
        let s = v[piv];
        let sinv = inv_mod_p(s, q);
        rep[i] = v.iter().map(|x| (x * sinv).rem_euclid(q)).collect();
        pivots[i] = piv;
        diag[i] = s;
    }
    (rep, diag)
}

fn elementary(n: usize, i: usize, j: usize, q: i64) -> Mat {
    let mut e = identity(n);
    e[i][j] = 1 % q;
    e
}

fn generator_of_units(q: i64) -> i64 {
    (1..q).find(|&g| (1..q - 1).all(|k| pow_mod(g as u64, k as u64, q as u64) != 1)).unwrap_or(1)
}

/// Discrete logarithm table for `F_q^x` with respect to `g`.
fn log_table(q: i64, g: i64) -> HashMap<i64, i64> {
    (0..q - 1).map(|k| (pow_mod(g as u64, k as u64, q as u64) as i64, k)).collect()
}

/// A character of `T(F_q)` is an exponent vector `c`, acting by
/// `t -> prod g^{c_i log t_i}` for a fixed generator `g`, valued in `F_q`.
fn char_value(c: &[i64], diag: &[i64], q: i64, g: i64, logs: &HashMap<i64, i64>) -> i64 {
    let e: i64 = c.iter().zip(diag).map(|(ci, t)| ci * logs[t]).sum();
    pow_mod(g as u64, e.rem_euclid(q - 1) as u64, q as u64) as i64
}

/// The `T(F_q)`-characters in the `Ubar(F_q)`-coinvariants of
/// `Ind_B^G chi`, with multiplicity, as sorted exponent vectors mod `q - 1`.
pub fn ps_coinvariants_oracle(n: usize, q: u64, chi: &[i64]) -> Result<Vec<Vec<i64>>, OracleError> {
    if q > 3 {
        return Err(OracleError::FieldTooLarge(q));
    }
    if q < 2 {
        return Err(OracleError::InvalidInput(format!("no field of size {q}")));
    }
    if !(1..=3).contains(&n) || chi.len() != n {
        return Err(OracleError::InvalidInput(format!("rank {n} with character of length {}", chi.len())));
    }
    let q = q as i64;
    let g = generator_of_units(q);
    let logs = log_table(q, g);
    let chi: Vec<i64> = chi.iter().map(|c| c.rem_euclid(q - 1)).collect();

    // B \ G by breadth-first search under right multiplication
    let mut gens = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                gens.push(elementary(n, i, j, q));
            }
        }
        let mut d = identity(n);
        d[i][i] = g;
        gens.push(d);
    }
    let mut index: HashMap<Mat, usize> = HashMap::new();
    let mut reps: Vec<Mat> = Vec::new();
    let start = identity(n);
    index.insert(start.clone(), 0);
    reps.push(start.clone());
    let mut queue = VecDeque::from([start]);
    while let Some(x) = queue.pop_front() {
        for h in &gens {
            let (rep, _) = canonical(&mat_mul(&x, h, q), q);
            if !index.contains_key(&rep) {
                index.insert(rep.clone(), reps.len());
                reps.push(rep.clone());
                queue.push_back(rep);
            }
        }
    }
    let dim = reps.len();

    // (g f)(rep_i) = f(rep_i g) = chi(b) f(rep_j); column-major action matrix
    let action = |h: &Mat| -> Mat {
        let mut m = vec![vec![0i64; dim]; dim];
        for (i, rep) in reps.iter().enumerate() {
            let (r, diag) = canonical(&mat_mul(rep, h, q), q);
            m[i][index[&r]] = char_value(&chi, &diag, q, g, &logs);
        }
        m
    };

    // image of (u - 1) for generators u of Ubar, as row vectors
    let mut image: Vec<Vec<i64>> = Vec::new();
    for i in 0..n {
        for j in 0..i {
            let u = action(&elementary(n, i, j, q));
            for c in 0..dim {
                image.push((0..dim).map(|r| (u[r][c] - i64::from(r == c)).rem_euclid(q)).collect());
            }
        }
    }

    // torus elements
    let units: Vec<i64> = (1..q).collect();
    let mut torus: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..n {
        torus = torus.iter().flat_map(|t| units.iter().map(move |u| [t.clone(), vec![*u]].concat())).collect();
    }
    let torus_mats: Vec<(Vec<i64>, Mat)> = torus
        .iter()
        .map(|t| {
            let mut d = identity(n);
            for i in 0..n {
                d[i][i] = t[i];
            }
            (t.clone(), action(&d))
        })
        .collect();
    let order_inv = inv_mod_p(torus.len() as i64 % q, q);

    let mut chars: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..n {
        chars = chars.iter().flat_map(|c| (0..q - 1).map(move |k| [c.clone(), vec![k]].concat())).collect();
    }
    let mut out = Vec::new();
    for psi in chars {
        // idempotent e_psi = |T|^{-1} sum psi(t)^{-1} t
        let mut e = vec![vec![0i64; dim]; dim];
        for (t, m) in &torus_mats {
            let w = inv_mod_p(char_value(&psi, t, q, g, &logs), q) * order_inv % q;
            for r in 0..dim {
                for c in 0..dim {
                    e[r][c] = (e[r][c] + w * m[r][c]).rem_euclid(q);
                }
            }
        }
        let apply = |v: &Vec<i64>| -> Vec<i64> {
            (0..dim).map(|r| (0..dim).map(|c| e[r][c] * v[c]).sum::<i64>().rem_euclid(q)).collect()
        };
        let whole: Vec<Vec<i64>> = (0..dim).map(|c| (0..dim).map(|r| e[r][c]).collect()).collect();
        let sub: Vec<Vec<i64>> = image.iter().map(apply).collect();
        let mult = rank_mod_p(whole, q) - rank_mod_p(sub, q);
        for _ in 0..mult {
            out.push(psi.clone());
        }
    }
    out.sort();
    Ok(out)
}

/// `{chi^w : w in S_n}` with multiplicity, sorted, entries mod `q - 1`.
pub fn weyl_orbit_multiset(chi: &[i64], q: u64) -> Vec<Vec<i64>> {
    let m = (q - 1) as i64;
    let chi: Vec<i64> = chi.iter().map(|c| c.rem_euclid(m)).collect();
    let mut out: Vec<Vec<i64>> = Perm::all(chi.len()).iter().map(|w| w.act(&chi)).collect();
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form_factorization() {
        let q = 3;
        let g = vec![vec![2, 1, 0], vec![1, 1, 1], vec![1, 2, 1]];
        let (rep, diag) = canonical(&g, q);
        let (rep2, _) = canonical(&mat_mul(&vec![vec![1, 2, 1], vec![0, 2, 1], vec![0, 0, 1]], &g, q), q);
        assert_eq!(rep, rep2);
        assert!(diag.iter().all(|&d| d != 0));
    }

    #[test]
    fn gl2_f2_trivial() {
        assert_eq!(ps_coinvariants_oracle(2, 2, &[0, 0]).unwrap(), vec![vec![0, 0], vec![0, 0]]);
    }

    #[test]
    fn gl2_f3_regular() {
        assert_eq!(ps_coinvariants_oracle(2, 3, &[1, 0]).unwrap(), weyl_orbit_multiset(&[1, 0], 3));
    }

    #[test]
    fn gl3_f2_trivial() {
        assert_eq!(ps_coinvariants_oracle(3, 2, &[0, 0, 0]).unwrap().len(), 6);
    }

    #[test]
    fn field_too_large() {
        assert_eq!(ps_coinvariants_oracle(2, 5, &[0, 0]), Err(OracleError::FieldTooLarge(5)));
    }
}
