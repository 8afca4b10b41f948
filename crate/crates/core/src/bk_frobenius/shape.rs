//! Block factorization of matrices along a maximal parabolic and the
//! bookkeeping of shapes for a direct sum of two tame types.

use rand::Rng;

use crate::matrix::{conj_perm, Mat};
use crate::ring::Ring;
use crate::root_data::{dot_action, is_in_c0, levi_factorization, twist_presentation, ExtAffWeylElt, Perm, Presentation, Weight};
use crate::scalars::SymbolicScalar;

use super::bounded::random_perm;
use super::{unit_inverse, FrobError, TruncPoly};

/// `A = P_w^{-1} diag(D_a, D_b) [[M_a, 0], [X, M_b]] P_w` with `D_d`
/// diagonal scalars and the `v^0` diagonal entries of `M_d` equal to 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParabolicFactorization {
    pub w_upper: Perm,
    pub d_a: Vec<SymbolicScalar>,
    pub d_b: Vec<SymbolicScalar>,
    pub m_a: Mat<TruncPoly>,
    pub m_b: Mat<TruncPoly>,
    pub x: Mat<TruncPoly>,
}

impl ParabolicFactorization {
    /// Multiply the factors back together.
    pub fn recompose(&self) -> Mat<TruncPoly> {
        let (a, b) = (self.d_a.len(), self.d_b.len());
        let n = a + b;
        let lower = Mat::from_fn(n, n, |r, c| match (r < a, c < a) {
            (true, true) => self.m_a.get(r, c).clone(),
            (false, false) => self.m_b.get(r - a, c - a).clone(),
            (false, true) => self.x.get(r - a, c).clone(),
            (true, false) => TruncPoly::zero(),
        });
        let d: Vec<TruncPoly> = self.d_a.iter().chain(&self.d_b).map(|x| TruncPoly::constant(x.clone())).collect();
        conj_perm(self.w_upper.inverse().images(), &Mat::diagonal(&d).mul(&lower))
    }
}

/// Factor `A` as `P_w^{-1} diag(D_a, D_b) [[M_a, 0], [X, M_b]] P_w`.
///
/// Fails when the conjugated matrix has a nonzero upper right block, when
/// its leading `a x a` block is not invertible mod `v`, or when some
/// diagonal entry has a non-unit constant term.
pub fn parabolic_factorization(a: &Mat<TruncPoly>, w_upper: &Perm, blocks: (usize, usize)) -> Result<ParabolicFactorization, FrobError> {
    let (na, nb) = blocks;
    let n = na + nb;
    if na == 0 || nb == 0 || a.rows() != n || a.cols() != n || w_upper.n() != n {
        return Err(FrobError::InvalidInput(format!("blocks {blocks:?} for a {}x{} matrix", a.rows(), a.cols())));
    }
    let b = conj_perm(w_upper.images(), a);
    for r in 0..na {
        for c in na..n {
            if !b.get(r, c).is_zero() {
                return Err(FrobError::NotFactorizable(format!("upper right block has entry ({r},{c})")));
            }
        }
    }
    let lead: Vec<usize> = (0..na).collect();
    let lead_det = b.submatrix(&lead, &lead).map(TruncPoly::constant_term).det();
    if unit_inverse(&lead_det).is_none() {
        return Err(FrobError::NotFactorizable(format!("leading block has determinant {lead_det} mod v")));
    }
    let mut d = Vec::with_capacity(n);
    let mut d_inv = Vec::with_capacity(n);
    for i in 0..n {
        let c = b.get(i, i).constant_term();
        let inv = unit_inverse(&c)
            .ok_or_else(|| FrobError::NotFactorizable(format!("diagonal entry {i} has constant term {c}")))?;
        d.push(c);
        d_inv.push(TruncPoly::constant(inv));
    }
    let scaled = Mat::diagonal(&d_inv).mul(&b);
    let rows_a: Vec<usize> = (0..na).collect();
    let rows_b: Vec<usize> = (na..n).collect();
    Ok(ParabolicFactorization {
        w_upper: w_upper.clone(),
        d_b: d.split_off(na),
        d_a: d,
        m_a: scaled.submatrix(&rows_a, &rows_a),
        m_b: scaled.submatrix(&rows_b, &rows_b),
        x: scaled.submatrix(&rows_b, &rows_a),
    })
}

/// `s^{-1} t_{mu_rho - mu} s_rho`, the shape of `rho` relative to `tau`.
pub fn shape_of(tau: &Presentation, rho: &Presentation) -> Result<ExtAffWeylElt, FrobError> {
    let inv: Vec<Perm> = tau.s.iter().map(Perm::inverse).collect();
    let diff = rho.mu.sub(&tau.mu)?;
    Ok(ExtAffWeylElt::finite(inv)
        .mul(&ExtAffWeylElt::translation_by(diff))?
        .mul(&ExtAffWeylElt::finite(rho.s.clone()))?)
}

fn block_perm(x: &Perm, y: &Perm) -> Perm {
    let a = x.n();
    let images = x.images().iter().copied().chain(y.images().iter().map(|&i| i + a)).collect();
    Perm::new(images).expect("block permutation")
}

fn block_weight(x: &Weight, y: &Weight) -> Result<Weight, FrobError> {
    let comps = x.comps().iter().zip(y.comps()).map(|(u, v)| [u.clone(), v.clone()].concat()).collect();
    Ok(Weight::new(x.n() + y.n(), comps)?)
}

fn restrict_perm(w: &Perm, lo: usize, hi: usize) -> Perm {
    Perm::new((lo..hi).map(|i| w.apply(i) - lo).collect()).expect("block-preserving permutation")
}

fn restrict_weight(w: &Weight, lo: usize, hi: usize) -> Result<Weight, FrobError> {
    Ok(Weight::new(hi - lo, w.comps().iter().map(|c| c[lo..hi].to_vec()).collect())?)
}

/// Block diagonal element of the extended affine Weyl group of `GL_{a+b}`.
pub fn block_diag_elt(x: &ExtAffWeylElt, y: &ExtAffWeylElt) -> Result<ExtAffWeylElt, FrobError> {
    let finite = x.finite_part.iter().zip(&y.finite_part).map(|(u, v)| block_perm(u, v)).collect();
    Ok(ExtAffWeylElt::new(block_weight(&x.translation, &y.translation)?, finite)?)
}

/// Lowest alcove presentations of two tame types with the shapes
/// `w'_d t_{nu'_d}` of the residual types relative to them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShapeInput {
    pub p: u64,
    pub tau_a: Presentation,
    pub tau_b: Presentation,
    pub w_prime_a: Vec<Perm>,
    pub nu_prime_a: Weight,
    pub w_prime_b: Vec<Perm>,
    pub nu_prime_b: Weight,
}

/// Every intermediate object of [`shape_setup`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShapeSetup {
    pub rho_a: Presentation,
    pub rho_b: Presentation,
    pub tau: Presentation,
    pub rho: Presentation,
    pub w_tilde: ExtAffWeylElt,
    pub w_levi: Vec<Perm>,
    pub w_upper: Vec<Perm>,
    pub w_tilde_a: ExtAffWeylElt,
    pub w_tilde_b: ExtAffWeylElt,
    pub twisted_tau: Presentation,
    pub twisted_rho: Presentation,
    pub twisted_tau_a: Presentation,
    pub twisted_rho_a: Presentation,
    pub twisted_tau_b: Presentation,
    pub twisted_rho_b: Presentation,
    /// Shape of the twisted presentations of the direct sums.
    pub lhs: ExtAffWeylElt,
    /// `pi(w^M)^{-1} (shape_a, shape_b) pi(w^M)` from the twisted blocks.
    pub rhs: ExtAffWeylElt,
}

/// `t_nu w` with `w^{-1}(mu + eta - nu)` strictly decreasing in `[0, p)`:
/// `nu` is `p` times the entrywise floor of `(mu + eta) / p`. Requires the
/// residues of `mu + eta` to be distinct.
fn alcove_element(mu: &Weight, p: u64) -> Result<ExtAffWeylElt, FrobError> {
    let n = mu.n();
    let p = p as i64;
    let shifted = mu.add(&Weight::eta(n, mu.f()))?;
    let mut nus = Vec::new();
    let mut ws = Vec::new();
    for (j, y) in shifted.comps().iter().enumerate() {
        let nu: Vec<i64> = y.iter().map(|x| p * x.div_euclid(p)).collect();
        let res: Vec<i64> = y.iter().zip(&nu).map(|(a, b)| a - b).collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &k| res[k].cmp(&res[i]));
        if order.windows(2).any(|w| res[w[0]] == res[w[1]]) {
            return Err(FrobError::InvalidInput(format!("mu + eta has repeated residues mod {p} at embedding {j}")));
        }
        nus.push(nu);
        ws.push(Perm::new(order)?);
    }
    Ok(ExtAffWeylElt::new(Weight::new(n, nus)?, ws)?)
}

/// Builds the presentations of the direct sums, chooses `w~ = t_nu w` with
/// `w~^{-1} . mu` in the lowest alcove, factors `w = w_M w^M`, twists every
/// presentation and checks that the twisted shape of the sum equals
/// `pi(w^M)^{-1} (w~(rho_a, tau_a), w~(rho_b, tau_b)) pi(w^M)`.
pub fn shape_setup(input: &ShapeInput) -> Result<ShapeSetup, FrobError> {
    let (a, b) = (input.tau_a.mu.n(), input.tau_b.mu.n());
    let f = input.tau_a.mu.f();
    let ok_block = |pres: &Presentation, w: &[Perm], nu: &Weight, d: usize| {
        pres.s.len() == f && pres.mu.f() == f && w.len() == f && nu.f() == f && nu.n() == d && w.iter().all(|x| x.n() == d)
    };
    if !ok_block(&input.tau_a, &input.w_prime_a, &input.nu_prime_a, a)
        || !ok_block(&input.tau_b, &input.w_prime_b, &input.nu_prime_b, b)
    {
        return Err(FrobError::InvalidInput("block data disagree in size or number of embeddings".into()));
    }
    let n = a + b;
    let b_shift = Weight::central(a, f, b as i64);
    let residual = |tau: &Presentation, w: &[Perm], nu: &Weight, shift: Option<&Weight>| -> Result<Presentation, FrobError> {
        let s: Vec<Perm> = tau.s.iter().zip(w).map(|(x, y)| x.compose(y)).collect();
        let mut mu = tau.mu.add(&nu.act(&s)?)?;
        if let Some(sh) = shift {
            mu = mu.add(sh)?;
        }
        Ok(Presentation { s, mu })
    };
    let rho_a = residual(&input.tau_a, &input.w_prime_a, &input.nu_prime_a, Some(&b_shift))?;
    let rho_b = residual(&input.tau_b, &input.w_prime_b, &input.nu_prime_b, None)?;
    let sum = |x: &Presentation, y: &Presentation| -> Result<Presentation, FrobError> {
        Ok(Presentation {
            s: x.s.iter().zip(&y.s).map(|(u, v)| block_perm(u, v)).collect(),
            mu: block_weight(&x.mu.sub(&b_shift)?, &y.mu)?,
        })
    };
    let tau = sum(&input.tau_a, &input.tau_b)?;
    let rho = sum(&rho_a, &rho_b)?;

    let w_tilde = alcove_element(&tau.mu, input.p)?;
    let lowest = dot_action(&w_tilde.inverse(), &tau.mu)?;
    if !is_in_c0(&lowest, input.p) {
        return Err(FrobError::AssertionFailure(format!("w~^(-1) . mu = {lowest} is not in the lowest alcove")));
    }
    let twisted_tau = twist_presentation(&w_tilde.inverse(), &tau)?;
    let twisted_rho = twist_presentation(&w_tilde.inverse(), &rho)?;

    let mut w_levi = Vec::with_capacity(f);
    let mut w_upper = Vec::with_capacity(f);
    for w in &w_tilde.finite_part {
        let (lv, up) = levi_factorization(w, &[a, b])?;
        w_levi.push(lv);
        w_upper.push(up);
    }
    let w_tilde_a = ExtAffWeylElt::new(
        restrict_weight(&w_tilde.translation, 0, a)?,
        w_levi.iter().map(|w| restrict_perm(w, 0, a)).collect(),
    )?;
    let w_tilde_b = ExtAffWeylElt::new(
        restrict_weight(&w_tilde.translation, a, n)?,
        w_levi.iter().map(|w| restrict_perm(w, a, n)).collect(),
    )?;
    let twisted_tau_a = twist_presentation(&w_tilde_a.inverse(), &input.tau_a)?;
    let twisted_rho_a = twist_presentation(&w_tilde_a.inverse(), &rho_a)?;
    let twisted_tau_b = twist_presentation(&w_tilde_b.inverse(), &input.tau_b)?;
    let twisted_rho_b = twist_presentation(&w_tilde_b.inverse(), &rho_b)?;

    let lhs = shape_of(&twisted_tau, &twisted_rho)?;
    let blocks = block_diag_elt(&shape_of(&twisted_tau_a, &twisted_rho_a)?, &shape_of(&twisted_tau_b, &twisted_rho_b)?)?;
    let pi_upper = ExtAffWeylElt::finite(w_upper.clone()).rotate();
    let rhs = pi_upper.inverse().mul(&blocks)?.mul(&pi_upper)?;
    if lhs != rhs {
        return Err(FrobError::AssertionFailure(format!("shape {lhs} differs from block shape {rhs}")));
    }
    Ok(ShapeSetup {
        rho_a,
        rho_b,
        tau,
        rho,
        w_tilde,
        w_levi,
        w_upper,
        w_tilde_a,
        w_tilde_b,
        twisted_tau,
        twisted_rho,
        twisted_tau_a,
        twisted_rho_a,
        twisted_tau_b,
        twisted_rho_b,
        lhs,
        rhs,
    })
}

/// A lowest alcove presentation for `GL_d` that is `m`-generic, with
/// random `s`.
fn random_generic_presentation<R: Rng>(d: usize, f: usize, p: u64, m: i64, rng: &mut R) -> Result<Presentation, FrobError> {
    let p = p as i64;
    let mut comps = Vec::with_capacity(f);
    for _ in 0..f {
        // mu + eta strictly decreasing with consecutive gaps > m and total spread < p - m
        let top = rng.gen_range(0..p);
        let mut v = vec![top];
        let budget = p - m - 1 - (d as i64 - 1) * (m + 1);
        if budget < 0 {
            return Err(FrobError::InvalidInput(format!("p = {p} is too small for {m}-generic GL_{d} data")));
        }
        let mut left = budget;
        for _ in 1..d {
            let extra = rng.gen_range(0..=left);
            left -= extra;
            let next = v.last().unwrap() - (m + 1) - extra;
            v.push(next);
        }
        let eta: Vec<i64> = (0..d as i64).rev().collect();
        comps.push(v.iter().zip(&eta).map(|(x, e)| x - e).collect());
    }
    Ok(Presentation { s: (0..f).map(|_| random_perm(d, rng)).collect(), mu: Weight::new(d, comps)? })
}

/// Random input for [`shape_setup`] whose direct sum has distinct residues
/// of `mu + eta` in every embedding.
pub fn random_shape_input<R: Rng>(p: u64, f: usize, blocks: (usize, usize), m: i64, rng: &mut R) -> Result<ShapeInput, FrobError> {
    let (a, b) = blocks;
    for _ in 0..1000 {
        let tau_a = random_generic_presentation(a, f, p, m, rng)?;
        let tau_b = random_generic_presentation(b, f, p, m, rng)?;
        let shifted = tau_a.mu.sub(&Weight::central(a, f, b as i64))?;
        let sum = block_weight(&shifted, &tau_b.mu)?.add(&Weight::eta(a + b, f))?;
        let distinct = sum.comps().iter().all(|c| {
            let mut r: Vec<i64> = c.iter().map(|x| x.rem_euclid(p as i64)).collect();
            r.sort_unstable();
            r.windows(2).all(|w| w[0] != w[1])
        });
        if !distinct {
            continue;
        }
        let nu = |d: usize, rng: &mut R| Weight::new(d, (0..f).map(|_| (0..d).map(|_| rng.gen_range(0..=1)).collect()).collect());
        return Ok(ShapeInput {
            p,
            w_prime_a: (0..f).map(|_| random_perm(a, rng)).collect(),
            nu_prime_a: nu(a, rng)?,
            w_prime_b: (0..f).map(|_| random_perm(b, rng)).collect(),
            nu_prime_b: nu(b, rng)?,
            tau_a,
            tau_b,
        });
    }
    Err(FrobError::InvalidInput("no residue-distinct data found".into()))
}

/// A random factorization with unit diagonal symbols `+-d^k` and entries
/// known modulo `v^5`, together with the matrix it recomposes to. The
/// diagonal blocks are unit lower triangular modulo `v`.
pub fn random_factorizable<R: Rng>(w_upper: &Perm, blocks: (usize, usize), rng: &mut R) -> (Mat<TruncPoly>, ParabolicFactorization) {
    let (a, b) = blocks;
    let entry = |rng: &mut R, pos: std::cmp::Ordering| {
        let c0 = match pos {
            std::cmp::Ordering::Equal => 1,
            std::cmp::Ordering::Less => 0,
            std::cmp::Ordering::Greater => rng.gen_range(-2..=2),
        };
        TruncPoly::from_coeffs(
            vec![SymbolicScalar::int(c0), SymbolicScalar::int(rng.gen_range(-2..=2)), SymbolicScalar::var("y")],
            Some(5),
        )
    };
    let m_a = Mat::from_fn(a, a, |r, c| entry(rng, r.cmp(&c)));
    let m_b = Mat::from_fn(b, b, |r, c| entry(rng, r.cmp(&c)));
    let x = Mat::from_fn(b, a, |_, _| entry(rng, std::cmp::Ordering::Greater));
    let sign = |rng: &mut R| {
        SymbolicScalar::var_pow("d", rng.gen_range(-1..=1)).scale(if rng.gen_bool(0.5) { 1 } else { -1 })
    };
    let fac = ParabolicFactorization {
        w_upper: w_upper.clone(),
        d_a: (0..a).map(|_| sign(rng)).collect(),
        d_b: (0..b).map(|_| sign(rng)).collect(),
        m_a,
        m_b,
        x,
    };
    (fac.recompose(), fac)
}
