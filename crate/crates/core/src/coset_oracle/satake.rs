//! The mod-p Satake transform for `GL_2(Q_p)` evaluated as a finite sum.
//!
//! `sigma = Sym^r (x) det^m` is realized on degree-`r` forms in `X, Y` over
//! `F_p` with `(k P)(X, Y) = det(k)^m P(aX + cY, bX + dY)`. The Hecke operator
//! `T_mu` (antidominant `mu`) is the function on `K t_mu K` with
//! `T_mu(k1 t_mu k2) = k1 A k2`, where `A` projects onto the highest weight
//! line `X^r` along the other monomials (the identity when `mu` is central).

use super::{inv_mod_p, OracleError};
use crate::laurent::LaurentPoly;
use crate::root_data::Weight;

/// Exact rational number.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Q {
    num: i128,
    den: i128,
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

impl Q {
    fn new(num: i128, den: i128) -> Q {
        assert!(den != 0);
        let g = gcd(num, den).max(1) * den.signum();
        Q { num: num / g, den: den / g }
    }
    fn int(v: i128) -> Q {
        Q { num: v, den: 1 }
    }
    fn zero() -> Q {
        Q::int(0)
    }
    fn is_zero(&self) -> bool {
        self.num == 0
    }
    fn add(self, o: Q) -> Q {
        Q::new(self.num * o.den + o.num * self.den, self.den * o.den)
    }
    fn sub(self, o: Q) -> Q {
        self.add(Q { num: -o.num, den: o.den })
    }
    fn mul(self, o: Q) -> Q {
        Q::new(self.num * o.num, self.den * o.den)
    }
    fn div(self, o: Q) -> Q {
        Q::new(self.num * o.den, self.den * o.num)
    }
    fn val(&self, p: i128) -> i64 {
        assert!(!self.is_zero());
        let count = |mut x: i128| {
            let mut v = 0;
            while x % p == 0 {
                x /= p;
                v += 1;
            }
            v
        };
        count(self.num) - count(self.den)
    }
    /// Image in `F_p` of a `p`-integral rational.
    fn reduce(&self, p: i128) -> i64 {
        assert!(self.is_zero() || self.val(p) >= 0);
        let num = self.num.rem_euclid(p) as i64;
        let den = self.den.rem_euclid(p) as i64;
        num * inv_mod_p(den, p as i64) % p as i64
    }
}

type M2 = [[Q; 2]; 2];

fn mul2(a: &M2, b: &M2) -> M2 {
    let mut out = [[Q::zero(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0].mul(b[0][j]).add(a[i][1].mul(b[1][j]));
        }
    }
    out
}

/// Cartan decomposition `g = k1 diag(p^d1, p^d2) k2` with `d1 <= d2`.
fn cartan2(g: &M2, p: i128) -> (M2, [i64; 2], M2) {
    let one = Q::int(1);
    let zero = Q::zero();
    let swap: M2 = [[zero, one], [one, zero]];
    let ident: M2 = [[one, zero], [zero, one]];
    let (mut bi, mut bj, mut bv) = (0, 0, i64::MAX);
    for i in 0..2 {
        for j in 0..2 {
            if !g[i][j].is_zero() && g[i][j].val(p) < bv {
                (bi, bj, bv) = (i, j, g[i][j].val(p));
            }
        }
    }
    let pr = if bi == 0 { ident } else { swap };
    let pc = if bj == 0 { ident } else { swap };
    let h = mul2(&mul2(&pr, g), &pc);
    let e = h[0][0];
    let l_inv: M2 = [[one, zero], [h[1][0].div(e), one]];
    let r_inv: M2 = [[one, h[0][1].div(e)], [zero, one]];
    let d = h[1][1].sub(h[1][0].mul(h[0][1]).div(e));
    let v2 = d.val(p);
    let pq = |v: i64| if v >= 0 { Q::int(p.pow(v as u32)) } else { Q::new(1, p.pow((-v) as u32)) };
    let units: M2 = [[e.div(pq(bv)), zero], [zero, d.div(pq(v2))]];
    // h = l_inv diag(e, d) r_inv, and pr, pc are involutions
    let k1 = mul2(&mul2(&pr, &l_inv), &units);
    let k2 = mul2(&r_inv, &pc);
    (k1, [bv, v2], k2)
}

/// Coefficient vector `c_i` of `X^{r-i} Y^i`.
type Form = Vec<i64>;

fn act(k: &M2, form: &Form, r: usize, m: i64, p: i64) -> Form {
    let (a, b, c, d) = (k[0][0].reduce(p as i128), k[0][1].reduce(p as i128), k[1][0].reduce(p as i128), k[1][1].reduce(p as i128));
    let det = (a * d - b * c).rem_euclid(p);
    let detm = super::pow_mod(det as u64, m.rem_euclid(p - 1) as u64, p as u64) as i64;
    // X -> aX + cY, Y -> bX + dY
    let lin_pow = |u: i64, v: i64, e: usize| {
        let mut poly = vec![1i64];
        for _ in 0..e {
            let mut next = vec![0i64; poly.len() + 1];
            for (i, &x) in poly.iter().enumerate() {
                next[i] = (next[i] + x * u) % p;
                next[i + 1] = (next[i + 1] + x * v) % p;
            }
            poly = next;
        }
        poly
    };
    let mut out = vec![0i64; r + 1];
    for (i, &ci) in form.iter().enumerate() {
        if ci == 0 {
            continue;
        }
        let xs = lin_pow(a, c, r - i);
        let ys = lin_pow(b, d, i);
        for (s, &x) in xs.iter().enumerate() {
            for (t, &y) in ys.iter().enumerate() {
                out[s + t] = (out[s + t] + ci * x % p * y) % p;
            }
        }
    }
    out.iter().map(|x| (x * detm).rem_euclid(p)).collect()
}

/// The mod-p Satake image of `T_mu` for `sigma = Sym^r (x) det^m`, as a
/// Laurent polynomial where `diag(p^a1, p^a2)` contributes `x1^-a1 x2^-a2`.
pub fn satake_oracle_gl2(p: u64, r: u32, m: i64, mu: &Weight) -> Result<LaurentPoly<i128>, OracleError> {
    if !super::is_prime(p) || p > 1 << 20 {
        return Err(OracleError::InvalidInput(format!("{p} is not a small prime")));
    }
    if r as u64 > p - 1 {
        return Err(OracleError::InvalidInput(format!("r = {r} exceeds p - 1")));
    }
    if mu.n() != 2 || mu.f() != 1 || !mu.is_antidominant() {
        return Err(OracleError::InvalidInput("need an antidominant GL_2 cocharacter over Q_p".into()));
    }
    let (mu1, mu2) = (mu.comp(0)[0], mu.comp(0)[1]);
    let central = mu1 == mu2;
    let r = r as usize;
    let pi = p as i128;
    let pl = p as i64;
    let spread = (mu2 - mu1) as u32;
    let denom = pi.pow(spread);
    let pq = |v: i64| if v >= 0 { Q::int(pi.pow(v as u32)) } else { Q::new(1, pi.pow((-v) as u32)) };
    let mut highest = vec![0i64; r + 1];
    highest[0] = 1;

    let mut out = LaurentPoly::zero(2);
    for a1 in mu1..=mu2 {
        let a2 = mu1 + mu2 - a1;
        let mut total = 0i64;
        for j in 0..denom {
            let x = Q::new(j, denom);
            let g: M2 = [[pq(a1), pq(a1).mul(x)], [Q::zero(), pq(a2)]];
            let (k1, d, k2) = cartan2(&g, pi);
            if d != [mu1, mu2] {
                continue;
            }
            let v = act(&k2, &highest, r, m, pl);
            let v = if central {
                v
            } else {
                let mut proj = vec![0i64; r + 1];
                proj[0] = v[0];
                proj
            };
            let v = act(&k1, &v, r, m, pl);
            total = (total + v[0]) % pl;
        }
        if total != 0 {
            out.add_term(vec![-a1, -a2], total as i128);
        }
    }
    Ok(out)
}

/// Whether every monomial `x1^a x2^b` lies in the span of
/// `y1 = x1, y2 = x1 x2` and `y2^{-1}`, i.e. `a >= b`.
pub fn in_y_span(poly: &LaurentPoly<i128>) -> bool {
    poly.terms().all(|(e, _)| e.len() == 2 && e[0] >= e[1])
}
