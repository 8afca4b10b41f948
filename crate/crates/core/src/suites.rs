//! Randomized verification suites, one per acceptance criterion, shared by
//! the acceptance test target and the `verify` command. Trial `t` of suite
//! `s` draws from ChaCha stream `(s << 32) | t` of the configured seed, so a
//! report depends only on the seed and the configuration.

use std::collections::BTreeMap;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::bk_frobenius::{
    change_eigenbasis, construct_bounded, divisibility_check, f_function, f_product, f_tilde, lift_var, parabolic_factorization,
    random_factorizable, random_gauge, random_levi_c_family, random_shape_input, random_type, shape_setup, wd_datum, BoundedSpec,
    FrobFamily, WDDatum,
};
use crate::coset_oracle::{
    cauchy_binet_check, ps_coinvariants_oracle, satake_oracle_gl2, translation_structure_constant, weyl_orbit_multiset, Level,
};
use crate::galois_points::{
    crystalline_lift_eval, eval_fbar, formal_t, levi_image, levi_reassemble, ordinary_point, psi_bar_eval, reduce_lift,
    s_sigma_on_points, satake_to_torus, torus_eval,
};
use crate::hecke::{
    conv_formula_direct, conv_tt, generator, inverse_generator, product_formula_scalar, reduction_map, satake_generators,
    t_inverse_scalar, tp_image_scalar, tp_scalar, HeckeElt, LevelData, ModPHeckeElt,
};
use crate::laurent::LaurentPoly;
use crate::matrix::Mat;
use crate::ring::Ring;
use crate::root_data::{wm_reps, Weight};
use crate::scalars::{FieldCtx, SymbolicScalar};
use crate::tame_types::{principal_series_type_of, sw_predicates, SerreWeight, TameInertialType};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SuiteError {
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("invalid suite configuration: {0}")]
    InvalidConfig(String),
}

/// Knobs shared by all suites. `None` picks the suite default.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub trials: Option<usize>,
    pub p: Option<u64>,
    pub n: Option<usize>,
    /// Lattice precision exponent for the coset oracle.
    pub depth: Option<u32>,
    /// `v`-adic truncation for Frobenius families.
    pub trunc: Option<usize>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { seed: 20240601, trials: None, p: None, n: None, depth: None, trunc: None }
    }
}

/// Outcome of one suite. Deliberately free of timings so that equal inputs
/// give byte-identical reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub id: usize,
    pub name: String,
    pub passed: bool,
    pub cases: usize,
    pub failed: usize,
    /// The first few failure messages.
    pub failures: Vec<String>,
    /// Counts per sub-family of cases.
    pub table: BTreeMap<String, usize>,
}

/// `(criterion, name, description)` for every suite.
pub const SUITES: [(usize, &str, &str); 12] = [
    (1, "conv-formulas", "convolution scalars of central cocharacters and the orbit formulas"),
    (2, "conv-oracle", "coset enumeration against the convolution formula"),
    (3, "satake-gl2", "brute-force GL_2 mod-p Satake transform of T_{-omega_i}"),
    (4, "ps-coinvariants", "principal series coinvariants against Weyl orbits"),
    (5, "gauge", "global functions under change of eigenbasis"),
    (6, "wd-dictionary", "global functions against symmetric functions of Weil-Deligne data"),
    (7, "divisibility", "pi-divisibility of global functions of bounded families"),
    (8, "spectral-satake", "lift, ordinary point and torus evaluations agree"),
    (9, "reduction-map", "mod-p reduction of Hecke generators and its compatibility with lifts"),
    (10, "failure", "the obstruction for a gap of p - 2"),
    (11, "cauchy-binet", "Cauchy-Binet identity for minors"),
    (12, "parabolic-shape", "shape identity, block factorization and Levi round trip"),
];

const MAX_LISTED: usize = 20;

/// Run a suite by name.
pub fn run_suite(name: &str, cfg: &SuiteConfig) -> Result<SuiteReport, SuiteError> {
    let (id, name, _) = SUITES.iter().find(|(_, n, _)| *n == name).ok_or_else(|| SuiteError::UnknownSuite(name.to_string()))?;
    let out = match id {
        1 => conv_formulas(cfg),
        2 => conv_oracle(cfg)?,
        3 => satake_gl2(cfg)?,
        4 => coinvariants(cfg)?,
        5 => gauge(cfg),
        6 => wd_dictionary(cfg),
        7 => divisibility(cfg),
        8 => spectral_satake(cfg),
        9 => reduction(cfg),
        10 => failure(cfg),
        11 => cauchy_binet(cfg),
        _ => parabolic_shape(cfg),
    };
    Ok(out.into_report(*id, name))
}

/// Run every suite in criterion order.
pub fn run_all(cfg: &SuiteConfig) -> Vec<SuiteReport> {
    SUITES.iter().map(|(_, name, _)| run_suite(name, cfg).expect("known suite")).collect()
}

#[derive(Default)]
struct Outcome {
    cases: usize,
    failures: Vec<String>,
    table: BTreeMap<String, usize>,
}

impl Outcome {
    /// Fold per-case results tagged by a table row.
    fn from_cases(results: Vec<(String, Result<(), String>)>) -> Self {
        let mut out = Outcome::default();
        for (tag, r) in results {
            out.cases += 1;
            *out.table.entry(tag).or_insert(0) += 1;
            if let Err(e) = r {
                out.failures.push(e);
            }
        }
        out
    }

    fn into_report(self, id: usize, name: &str) -> SuiteReport {
        SuiteReport {
            id,
            name: name.to_string(),
            passed: self.failures.is_empty() && self.cases > 0,
            cases: self.cases,
            failed: self.failures.len(),
            failures: self.failures.into_iter().take(MAX_LISTED).collect(),
            table: self.table,
        }
    }
}

fn trial_rng(seed: u64, suite: usize, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((suite as u64) << 32) | trial as u64);
    rng
}

/// Run `count` independent trials in parallel; each returns its table row
/// and a verdict.
fn run_trials<F>(cfg: &SuiteConfig, suite: usize, default: usize, f: F) -> Outcome
where
    F: Fn(&mut ChaCha8Rng) -> (String, Result<(), String>) + Sync,
{
    let count = cfg.trials.unwrap_or(default);
    let results: Vec<(String, Result<(), String>)> = (0..count)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(cfg.seed, suite, t);
            let (tag, r) = f(&mut rng);
            (tag, r.map_err(|e| format!("trial {t}: {e}")))
        })
        .collect();
    Outcome::from_cases(results)
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

fn next_prime(mut x: u64) -> u64 {
    while !is_prime(x) {
        x += 1;
    }
    x
}

fn w1(v: &[i64]) -> Weight {
    Weight::single(v.to_vec())
}

/// Random composition of `n`.
fn random_level<R: Rng>(n: usize, rng: &mut R) -> LevelData {
    let mut sizes = Vec::new();
    let mut left = n;
    while left > 0 {
        let s = rng.gen_range(1..=left);
        sizes.push(s);
        left -= s;
    }
    let k = sizes.len();
    LevelData::new(sizes, (0..k).map(|i| vec![i]).collect()).expect("composition")
}

/// `mu = plus + minus` with `plus` dominant and `minus` antidominant, both
/// central whenever `mu` is.
fn split_dom_antidom(mu: &[i64]) -> (Vec<i64>, Vec<i64>) {
    let n = mu.len();
    let mut plus = vec![0i64; n];
    let mut minus = vec![0i64; n];
    for i in 0..n {
        let d = if i + 1 < n { mu[i] - mu[i + 1] } else { mu[i] };
        let target = if d >= 0 || i + 1 == n { &mut plus } else { &mut minus };
        for t in target.iter_mut().take(i + 1) {
            *t += d;
        }
    }
    (plus, minus)
}

fn add_vec(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn conv_scalar(a: &[i64], b: &[i64], level: &LevelData) -> Result<SymbolicScalar, String> {
    conv_tt(&w1(a), &w1(b), level).map(|(s, _)| s).map_err(|e| e.to_string())
}

fn conv_formulas(cfg: &SuiteConfig) -> Outcome {
    run_trials(cfg, 1, 500, |rng| {
        let n = cfg.n.unwrap_or_else(|| rng.gen_range(2..=4));
        let level = random_level(n, rng);
        let k = level.num_orbits();
        let tag = format!("n={n} orbits={k}");
        let r = (|| {
            let c: Vec<Vec<i64>> = (0..3).map(|_| (0..k).map(|_| rng.gen_range(-2..=2)).collect()).collect();
            let mus: Vec<Vec<i64>> = c.iter().map(|ci| level.expand(ci)).collect();
            let (m1, m2, m3) = (&mus[0], &mus[1], &mus[2]);
            let s12 = conv_scalar(m1, m2, &level)?;
            check(s12 == conv_scalar(m2, m1, &level)?, || format!("{m1:?} and {m2:?} do not commute"))?;
            if let Some(direct) = conv_formula_direct(m1, m2, &level) {
                check(direct == s12, || format!("covered case {m1:?} * {m2:?}: {direct} vs {s12}"))?;
            }
            let (p1, n1) = split_dom_antidom(m1);
            let (p2, n2) = split_dom_antidom(m2);
            let covered = |a: &[i64], b: &[i64]| {
                conv_formula_direct(a, b, &level).ok_or_else(|| format!("{a:?} * {b:?} is not a covered case"))
            };
            let iterated = covered(&add_vec(&p1, &p2), &add_vec(&n1, &n2))?
                .mul(&covered(&p1, &n1)?.inverse().map_err(|e| e.to_string())?)
                .mul(&covered(&p2, &n2)?.inverse().map_err(|e| e.to_string())?);
            check(iterated == s12, || format!("iterated decomposition of {m1:?} * {m2:?}: {iterated} vs {s12}"))?;
            let left = s12.mul(&conv_scalar(&add_vec(m1, m2), m3, &level)?);
            let right = conv_scalar(m2, m3, &level)?.mul(&conv_scalar(m1, &add_vec(m2, m3), &level)?);
            check(left == right, || format!("associativity fails for {m1:?}, {m2:?}, {m3:?}"))?;
            for (i, &size) in level.sizes().iter().enumerate() {
                let mut e = vec![0i64; k];
                e[i] = 1;
                let eps = level.expand(&e);
                let neg: Vec<i64> = eps.iter().map(|x| -x).collect();
                let inv = conv_scalar(&eps, &neg, &level)?.inverse().map_err(|e| e.to_string())?;
                check(inv == t_inverse_scalar(size, n), || format!("inverse formula for orbit {i}"))?;
                for v in [&eps, &neg] {
                    let tp = tp_scalar(&level, v).map_err(|e| e.to_string())?;
                    check(tp == tp_image_scalar(size, n), || format!("t_P formula for {v:?}"))?;
                }
            }
            let cu: Vec<u64> = (0..k).map(|_| rng.gen_range(0..=3)).collect();
            let mut acc_mu = vec![0i64; n];
            let mut acc_s = SymbolicScalar::one();
            for (i, &ci) in cu.iter().enumerate() {
                let mut e = vec![0i64; k];
                e[i] = -1;
                let neg_eps = level.expand(&e);
                for _ in 0..ci {
                    acc_s = acc_s.mul(&conv_scalar(&acc_mu, &neg_eps, &level)?);
                    acc_mu = add_vec(&acc_mu, &neg_eps);
                }
            }
            for order in (0..k).permutations(k) {
                if let Ok(s) = product_formula_scalar(&level, &cu, &order) {
                    check(s == acc_s, || format!("product formula for c={cu:?}, order {order:?}: {s} vs {acc_s}"))?;
                }
            }
            Ok(())
        })();
        (tag, r)
    })
}

/// Integer value of a `q`-power scalar at `q = p`.
fn q_power_value(s: &SymbolicScalar, p: u64) -> Result<i128, String> {
    let (c, m) = s.as_monomial().ok_or_else(|| format!("{s} is not a monomial"))?;
    if m.pi_exp != 0 || !m.frob_exps.is_empty() || m.q_exp_doubled < 0 || m.q_exp_doubled % 2 != 0 {
        return Err(format!("{s} is not a nonnegative integral q-power"));
    }
    Ok(c * (p as i128).pow((m.q_exp_doubled / 2) as u32))
}

fn conv_oracle(cfg: &SuiteConfig) -> Result<Outcome, SuiteError> {
    let ps: Vec<u64> = cfg.p.map_or(vec![2, 3], |p| vec![p]);
    let ns: Vec<usize> = cfg.n.map_or(vec![2, 3], |n| vec![n]);
    if ps.iter().any(|&p| !is_prime(p)) || ns.iter().any(|&n| !(1..=3).contains(&n)) {
        return Err(SuiteError::InvalidConfig("conv-oracle needs a prime p and n <= 3".into()));
    }
    let mut cases = Vec::new();
    for &p in &ps {
        for &n in &ns {
            let level = LevelData::principal_series(n);
            let vecs: Vec<Vec<i64>> = (0..n).map(|_| -1i64..=1).multi_cartesian_product().collect();
            for a in &vecs {
                for b in &vecs {
                    if let Some(s) = conv_formula_direct(a, b, &level) {
                        cases.push((p, n, a.clone(), b.clone(), s));
                    }
                }
            }
        }
    }
    let results = cases
        .into_par_iter()
        .map(|(p, n, a, b, s)| {
            let tag = format!("p={p} n={n}");
            let r = (|| {
                let expected = q_power_value(&s, p)?;
                let got = translation_structure_constant(n, p, Level::Iwahori, &w1(&a), &w1(&b), cfg.depth).map_err(|e| e.to_string())?;
                check(got == expected, || format!("p={p} {a:?} * {b:?}: enumerated {got}, formula {expected}"))
            })();
            (tag, r)
        })
        .collect();
    Ok(Outcome::from_cases(results))
}

fn satake_gl2(cfg: &SuiteConfig) -> Result<Outcome, SuiteError> {
    let ps: Vec<u64> = cfg.p.map_or(vec![3, 5], |p| vec![p]);
    if ps.iter().any(|&p| p < 3 || !is_prime(p)) {
        return Err(SuiteError::InvalidConfig("satake-gl2 needs an odd prime p".into()));
    }
    let mut cases = Vec::new();
    for &p in &ps {
        for r in 1..=p as u32 - 2 {
            for m in 0..p as i64 - 1 {
                cases.push((p, r, m));
            }
        }
    }
    let results = cases
        .into_par_iter()
        .map(|(p, r, m)| {
            let res = (|| {
                for (mu, exps) in [([-1, 0], vec![1, 0]), ([-1, -1], vec![1, 1])] {
                    let got = satake_oracle_gl2(p, r, m, &w1(&mu)).map_err(|e| e.to_string())?;
                    let expected = LaurentPoly::monomial(1i128, exps);
                    check(got == expected, || format!("p={p} r={r} m={m} mu={mu:?}: {got:?}"))?;
                }
                Ok(())
            })();
            (format!("p={p}"), res)
        })
        .collect();
    Ok(Outcome::from_cases(results))
}

fn coinvariants(cfg: &SuiteConfig) -> Result<Outcome, SuiteError> {
    let groups: Vec<(usize, u64)> = [(2, 2), (2, 3), (3, 2)]
        .into_iter()
        .filter(|&(n, q)| cfg.n.is_none_or(|x| x == n) && cfg.p.is_none_or(|x| x == q))
        .collect();
    if groups.is_empty() {
        return Err(SuiteError::InvalidConfig("ps-coinvariants covers (n, q) in {(2,2), (2,3), (3,2)}".into()));
    }
    let mut cases = Vec::new();
    for (n, q) in groups {
        for chi in (0..n).map(|_| 0..q as i64 - 1).multi_cartesian_product() {
            cases.push((n, q, chi));
        }
    }
    let results = cases
        .into_par_iter()
        .map(|(n, q, chi)| {
            let r = ps_coinvariants_oracle(n, q, &chi).map_err(|e| e.to_string()).and_then(|got| {
                let expected = weyl_orbit_multiset(&chi, q);
                check(got == expected, || format!("GL_{n}(F_{q}) chi={chi:?}: {got:?} vs {expected:?}"))
            });
            (format!("GL{n}(F{q})"), r)
        })
        .collect();
    Ok(Outcome::from_cases(results))
}

/// Every `(group, d)` with `1 <= d <=` the class size of the group.
fn all_degrees(ty: &TameInertialType) -> Vec<(usize, usize)> {
    (0..ty.orbit_groups().len())
        .flat_map(|g| {
            let first = ty.orbits()[ty.orbit_groups()[g][0]][0];
            let class = ty.classes().iter().find(|c| c.contains(&first)).map_or(1, Vec::len);
            (1..=class).map(move |d| (g, d))
        })
        .collect()
}

fn group_of_label(ty: &TameInertialType, label: usize) -> Option<usize> {
    let orbit = ty.orbits().iter().position(|o| o.contains(&label))?;
    ty.orbit_groups().iter().position(|g| g.contains(&orbit))
}

fn all_f(fam: &FrobFamily) -> Result<Vec<SymbolicScalar>, String> {
    all_degrees(fam.ty()).into_iter().map(|(g, d)| f_function(fam, g, d).map_err(|e| e.to_string())).collect()
}

fn random_small_type<R: Rng>(cfg: &SuiteConfig, rng: &mut R) -> Result<TameInertialType, String> {
    let p = cfg.p.unwrap_or_else(|| [3, 5][rng.gen_range(0..2)]);
    let n = cfg.n.unwrap_or_else(|| rng.gen_range(2..=3));
    let f = rng.gen_range(1..=2);
    random_type(p, 1, f, n, rng).map_err(|e| e.to_string())
}

fn type_tag(ty: &TameInertialType) -> String {
    format!("n={} f={}", ty.n(), ty.f())
}

fn gauge(cfg: &SuiteConfig) -> Outcome {
    let changes = 100;
    let trunc = cfg.trunc.unwrap_or(12);
    let mut out = run_trials(cfg, 5, 20, |rng| {
        let ty = match random_small_type(cfg, rng) {
            Ok(t) => t,
            Err(e) => return ("setup".into(), Err(e)),
        };
        let r = (|| {
            let fam = random_levi_c_family(&ty, trunc, false, rng).map_err(|e| e.to_string())?;
            let base = all_f(&fam)?;
            for k in 0..changes {
                let moved = change_eigenbasis(&fam, &random_gauge(&ty, rng)).map_err(|e| format!("change {k}: {e}"))?;
                check(all_f(&moved)? == base, || format!("change {k} moved a global function"))?;
            }
            Ok(())
        })();
        (type_tag(&ty), r)
    });
    out.table.insert("changes per family".into(), changes);
    out
}

fn wd_dictionary(cfg: &SuiteConfig) -> Outcome {
    let trunc = cfg.trunc.unwrap_or(12);
    run_trials(cfg, 6, 100, |rng| {
        let ty = match random_small_type(cfg, rng) {
            Ok(t) => t,
            Err(e) => return ("setup".into(), Err(e)),
        };
        let r = (|| {
            let fam = random_levi_c_family(&ty, trunc, true, rng).map_err(|e| e.to_string())?;
            let wd = wd_datum(&fam).map_err(|e| e.to_string())?;
            let moved = change_eigenbasis(&fam, &random_gauge(&ty, rng)).map_err(|e| e.to_string())?;
            for (g, d) in all_degrees(&ty) {
                let f = f_function(&moved, g, d).map_err(|e| e.to_string())?;
                let s = wd.sym_value(&[g], &[d]).map_err(|e| e.to_string())?;
                check(f == s, || format!("group {g}, d={d}: {f} vs {s}"))?;
            }
            let groups: Vec<usize> = (0..ty.orbit_groups().len()).collect();
            let ones = vec![1; groups.len()];
            let f = f_product(&moved, &groups, &ones).map_err(|e| e.to_string())?;
            let s = wd.sym_value(&groups, &ones).map_err(|e| e.to_string())?;
            check(f == s, || format!("product over all groups: {f} vs {s}"))
        })();
        (type_tag(&ty), r)
    })
}

/// Dominant `lambda` with `lambda + eta` strictly decreasing in `[0, h]`.
fn random_bounded_lambda<R: Rng>(n: usize, comps: usize, h: i64, rng: &mut R) -> Weight {
    let rows = (0..comps)
        .map(|_| {
            let mut vals: Vec<i64> = rand::seq::index::sample(rng, (h + 1) as usize, n).into_iter().map(|x| x as i64).collect();
            vals.sort_unstable_by(|a, b| b.cmp(a));
            vals.iter().enumerate().map(|(i, v)| v - (n - 1 - i) as i64).collect()
        })
        .collect();
    Weight::new(n, rows).expect("lengths match")
}

fn divisibility(cfg: &SuiteConfig) -> Outcome {
    run_trials(cfg, 7, 200, |rng| {
        let p = cfg.p.unwrap_or_else(|| [3, 5, 7][rng.gen_range(0..3)]);
        let n = cfg.n.unwrap_or_else(|| rng.gen_range(2..=3));
        let f = rng.gen_range(1..=2);
        let e = if f == 1 && rng.gen_bool(0.25) { 2 } else { 1 };
        let h = rng.gen_range((n as i64 - 1)..=3);
        let tag = format!("n={n} f={f} e={e}");
        let r = (|| {
            let ty = random_type(p, e, f, n, rng).map_err(|e| e.to_string())?;
            let lambda = random_bounded_lambda(n, e as usize * f, h, rng);
            let spec = BoundedSpec { ty: ty.clone(), lambda: lambda.clone(), trunc: cfg.trunc, unit_vars: rng.gen_bool(0.5) };
            let fam = construct_bounded(&spec, rng).map_err(|e| e.to_string())?;
            let mut picks: Vec<(Vec<usize>, Vec<usize>)> = all_degrees(&ty).into_iter().map(|(g, d)| (vec![g], vec![d])).collect();
            let groups: Vec<usize> = (0..ty.orbit_groups().len()).collect();
            picks.push((groups.clone(), vec![1; groups.len()]));
            for (gs, ds) in picks {
                let ok = divisibility_check(&fam, &gs, &ds, &lambda).map_err(|e| e.to_string())?;
                check(ok, || format!("groups {gs:?}, d={ds:?}, lambda={lambda}: valuation below the bound"))?;
            }
            Ok(())
        })();
        (tag, r)
    })
}

/// A Serre weight with `(mu + eta)_i - (mu + eta)_k` in `(m, p - m)` for all
/// `i < k` and every embedding.
fn random_deep_weight<R: Rng>(p: u64, n: usize, f: usize, m: i64, rng: &mut R) -> Result<SerreWeight, String> {
    let room = p as i64 - m - 1 - (n as i64 - 1) * (m + 1);
    if room < 0 {
        return Err(format!("p={p} leaves no {m}-deep weights for n={n}"));
    }
    let share = if n > 1 { room / (n as i64 - 1) } else { 0 };
    let rows = (0..f)
        .map(|_| {
            // entries of mu + eta from the bottom up
            let mut shifted = vec![0i64; n];
            shifted[n - 1] = rng.gen_range(0..p as i64);
            for k in (0..n - 1).rev() {
                shifted[k] = shifted[k + 1] + m + 1 + rng.gen_range(0..=share);
            }
            let row: Vec<i64> = shifted.iter().enumerate().map(|(k, x)| x - (n - 1 - k) as i64).collect();
            row
        })
        .collect();
    let sigma = SerreWeight::new(p, Weight::new(n, rows).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let flags = sw_predicates(&sigma, &vec![1; n], m).map_err(|e| e.to_string())?;
    check(flags.m_deep, || format!("generated weight {} is not {m}-deep", sigma.lambda()))?;
    Ok(sigma)
}

/// Prime at least `bound`, randomly pushed up by less than 20.
fn random_prime_above<R: Rng>(bound: u64, rng: &mut R) -> u64 {
    next_prime(bound + rng.gen_range(0..20))
}

fn rename_lift(x: &SymbolicScalar, n: usize) -> SymbolicScalar {
    let map: BTreeMap<String, String> = (0..n).map(|i| (format!("tt{}", i + 1), format!("t{}", i + 1))).collect();
    x.rename(&map)
}

/// The diagonal family whose Weil-Deligne datum is the crystalline lift of
/// the ordinary point: `Frob` on label `i` is `q^i tt{i+1}`.
fn lift_family(ty: &TameInertialType) -> Result<FrobFamily, String> {
    let n = ty.n();
    let diag: Vec<Vec<SymbolicScalar>> = (0..ty.f())
        .map(|j| {
            (0..n)
                .map(|i| if j == 0 { SymbolicScalar::q_pow(i as i64).mul(&lift_var(i)) } else { SymbolicScalar::one() })
                .collect()
        })
        .collect();
    FrobFamily::from_c_diagonal(ty.clone(), &diag, 4).map_err(|e| e.to_string())
}

fn spectral_satake(cfg: &SuiteConfig) -> Outcome {
    run_trials(cfg, 8, 50, |rng| {
        let n = cfg.n.unwrap_or_else(|| rng.gen_range(2..=4));
        let f = rng.gen_range(1..=2);
        let e = 1u64;
        let tag = format!("n={n} f={f}");
        let r = (|| {
            let bound = 4 * (n as u64 - 1) * (e + 1) + 11;
            let p = cfg.p.unwrap_or_else(|| random_prime_above(bound, rng));
            let m = (e as i64 + 1) * (n as i64 - 1) + 2;
            let sigma = random_deep_weight(p, n, f, m, rng)?;
            let ty = principal_series_type_of(&sigma, e as u32).map_err(|e| e.to_string())?;
            let fam = lift_family(&ty)?;
            let wd = wd_datum(&fam).map_err(|e| e.to_string())?;
            let expected_wd = WDDatum::principal_series_lift(&ty).map_err(|e| e.to_string())?;
            check(wd == expected_wd, || "lift family has the wrong Weil-Deligne datum".into())?;
            let t = formal_t(n);
            let t_tilde: Vec<SymbolicScalar> = (0..n).map(lift_var).collect();
            let pt = ordinary_point(&sigma, &t).map_err(|e| e.to_string())?;
            let torus = s_sigma_on_points(&pt);
            let zero = Weight::zero(n, f);
            let ctx = FieldCtx::new(p, 1, f as u32);
            for (i, y) in satake_generators(p, n).iter().enumerate() {
                let i = i + 1;
                let groups: Vec<usize> =
                    (0..i).map(|l| group_of_label(&ty, l).ok_or_else(|| format!("label {l} has no group"))).collect::<Result<_, _>>()?;
                let ft = f_tilde(&fam, &groups, &vec![1; i], &zero).map_err(|e| e.to_string())?;
                let via_family = rename_lift(&ft.reduce_mod_varpi(&ctx).map_err(|e| e.to_string())?, n);
                let initial: Vec<usize> = (1..=i).collect();
                let lift = crystalline_lift_eval(&sigma, &initial, &t_tilde).map_err(|e| e.to_string())?;
                let via_lift = rename_lift(&reduce_lift(&sigma, &lift).map_err(|e| e.to_string())?, n);
                let fbar = eval_fbar(&sigma, i, &pt).map_err(|e| e.to_string())?;
                let path = torus_eval(&torus, &satake_to_torus(y)).map_err(|e| e.to_string())?;
                check(via_family == via_lift, || format!("i={i}: family {via_family} vs lift formula {via_lift}"))?;
                check(via_lift == fbar, || format!("i={i}: lift {via_lift} vs f_i {fbar}"))?;
                check(fbar == path, || format!("i={i}: f_i {fbar} vs torus path {path}"))?;
            }
            Ok(())
        })();
        (tag, r)
    })
}

/// `prod (1 + c_k g_k)` for random generators `g_k` of the principal series
/// level, including the inverse of the central generator.
fn random_integral<R: Rng>(level: &LevelData, lambda: &Weight, rng: &mut R) -> Result<HeckeElt, String> {
    let k = level.num_orbits();
    let mut gens = Vec::new();
    for g in 0..level.groups().len() {
        for d in 1..=level.groups()[g].len() {
            gens.push(generator(level, lambda, &[g], &[d]).map_err(|e| e.to_string())?);
        }
    }
    gens.push(generator(level, lambda, &(0..k).collect::<Vec<_>>(), &vec![1; k]).map_err(|e| e.to_string())?);
    gens.push(inverse_generator(level, lambda));
    let one = HeckeElt::basis(level, lambda, &vec![0; k]);
    let mut acc = one.clone();
    for _ in 0..rng.gen_range(1..=3) {
        let g = &gens[rng.gen_range(0..gens.len())];
        let c = SymbolicScalar::int(rng.gen_range(-2..=2));
        acc = acc.mul(&g.scale(&c).add(&one));
    }
    Ok(acc)
}

fn reduction(cfg: &SuiteConfig) -> Outcome {
    run_trials(cfg, 9, 50, |rng| {
        let n = cfg.n.unwrap_or_else(|| rng.gen_range(2..=4));
        let tag = format!("n={n}");
        let r = (|| {
            let bound = 8 * (n as u64 - 1) + 11;
            let p = cfg.p.unwrap_or_else(|| random_prime_above(bound, rng));
            let sigma = random_deep_weight(p, n, 1, 2 * (n as i64 - 1) + 2, rng)?;
            let ctx = FieldCtx::new(p, 1, 1);
            let level = LevelData::principal_series(n);
            let zero = Weight::zero(n, 1);
            let y = satake_generators(p, n);
            let t = formal_t(n);
            let pt = ordinary_point(&sigma, &t).map_err(|e| e.to_string())?;
            for size in 1..=n {
                for i_set in (0..n).combinations(size) {
                    let h = generator(&level, &zero, &i_set, &vec![1; size]).map_err(|e| e.to_string())?;
                    let red = reduction_map(&h, &ctx).map_err(|e| e.to_string())?;
                    let expected = if i_set == (0..size).collect::<Vec<_>>() { y[size - 1].clone() } else { ModPHeckeElt::zero(p, n) };
                    check(red == expected, || format!("T_{i_set:?} reduces to {red}"))?;
                    let labels: Vec<usize> = i_set.iter().map(|x| x + 1).collect();
                    let via_hecke = psi_bar_eval(&sigma, &red, &pt).map_err(|e| e.to_string())?;
                    let lift = crystalline_lift_eval(&sigma, &labels, &t).map_err(|e| e.to_string())?;
                    let via_lift = reduce_lift(&sigma, &lift).map_err(|e| e.to_string())?;
                    check(via_hecke == via_lift, || format!("T_{i_set:?}: {via_hecke} vs lift {via_lift}"))?;
                }
            }
            let h1 = random_integral(&level, &zero, rng)?;
            let h2 = random_integral(&level, &zero, rng)?;
            let red = |h: &HeckeElt| reduction_map(h, &ctx).map_err(|e| e.to_string());
            let (lhs, rhs) = (red(&h1.mul(&h2))?, red(&h1)?.mul(&red(&h2)?));
            check(lhs == rhs, || format!("reduction is not multiplicative: {lhs} vs {rhs}"))
        })();
        (tag, r)
    })
}

/// A weight with gap `p - 2` at position `i` (1-based) in every embedding
/// and non-degenerate gaps elsewhere.
fn p_minus_two_weight<R: Rng>(p: u64, n: usize, f: usize, i: usize, rng: &mut R) -> Result<SerreWeight, String> {
    let p = p as i64;
    let rows = (0..f)
        .map(|_| {
            let mut row = vec![0i64; n];
            for k in (0..n - 1).rev() {
                let gap = if k + 1 == i { p - 2 } else { rng.gen_range(1..=p - 3) };
                row[k] = row[k + 1] + gap;
            }
            row
        })
        .collect();
    SerreWeight::new(p as u64, Weight::new(n, rows).map_err(|e| e.to_string())?).map_err(|e| e.to_string())
}

fn failure(cfg: &SuiteConfig) -> Outcome {
    run_trials(cfg, 10, 20, |rng| {
        let p = cfg.p.unwrap_or_else(|| [7, 11, 13][rng.gen_range(0..3)]);
        let n = cfg.n.unwrap_or_else(|| rng.gen_range(2..=3));
        let f = rng.gen_range(1..=2);
        let i = rng.gen_range(1..n);
        let tag = format!("n={n} f={f}");
        let r = (|| {
            let sigma = p_minus_two_weight(p, n, f, i, rng)?;
            let t = formal_t(n);
            let pt = ordinary_point(&sigma, &t).map_err(|e| e.to_string())?;
            let swapped = pt.swap_frobenius(i).map_err(|e| e.to_string())?;
            check(pt.semisimplification() == swapped.semisimplification(), || "semisimplifications differ".into())?;
            let before = eval_fbar(&sigma, i, &pt).map_err(|e| e.to_string())?;
            let after = eval_fbar(&sigma, i, &swapped).map_err(|e| e.to_string())?;
            let predicted = before.mul(&t[i]).mul(&t[i - 1].inverse().map_err(|e| e.to_string())?);
            check(after == predicted, || format!("f_{i} after the swap is {after}, expected {predicted}"))?;
            check(after != before, || format!("f_{i} is unchanged by the swap"))
        })();
        (tag, r)
    })
}

fn random_int_mat<R: Rng>(n: usize, rng: &mut R) -> Mat<i128> {
    Mat::from_fn(n, n, |_, _| rng.gen_range(-5..=5))
}

fn cauchy_binet(cfg: &SuiteConfig) -> Outcome {
    run_trials(cfg, 11, 100, |rng| {
        let n = cfg.n.unwrap_or_else(|| rng.gen_range(1..=4));
        let (a, b) = (random_int_mat(n, rng), random_int_mat(n, rng));
        let r = (1..=n).try_for_each(|k| check(cauchy_binet_check(&a, &b, k), || format!("n={n} k={k}: identity fails")));
        (format!("n={n}"), r)
    })
}

fn parabolic_shape(cfg: &SuiteConfig) -> Outcome {
    run_trials(cfg, 12, 50, |rng| {
        let blocks = if rng.gen_bool(0.5) { (1, 2) } else { (2, 1) };
        let f = rng.gen_range(1..=2);
        let p = cfg.p.unwrap_or(31);
        let tag = format!("blocks={blocks:?} f={f}");
        let r = (|| {
            let input = random_shape_input(p, f, blocks, 6, rng).map_err(|e| e.to_string())?;
            let setup = shape_setup(&input).map_err(|e| e.to_string())?;
            check(setup.lhs == setup.rhs, || "shape identity fails".into())?;
            let reps = wm_reps(3, &[blocks.0, blocks.1]).map_err(|e| e.to_string())?;
            let w = &reps[rng.gen_range(0..reps.len())];
            let (a, expected) = random_factorizable(w, blocks, rng);
            let fac = parabolic_factorization(&a, w, blocks).map_err(|e| e.to_string())?;
            check(fac.recompose() == a, || "factorization does not recompose".into())?;
            check(fac == expected, || "factorization differs from the one the matrix was built from".into())?;
            let sigma = random_deep_weight(p, 3, f, 8, rng)?;
            let pt = ordinary_point(&sigma, &formal_t(3)).map_err(|e| e.to_string())?;
            let image = levi_image(&sigma, &pt, &[blocks.0]).map_err(|e| e.to_string())?;
            check(levi_reassemble(&image).map_err(|e| e.to_string())? == pt, || "Levi image does not reassemble".into())
        })();
        (tag, r)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(trials: usize) -> SuiteConfig {
        SuiteConfig { seed: 7, trials: Some(trials), ..SuiteConfig::default() }
    }

    #[test]
    fn split_is_dominant_plus_antidominant() {
        let (p, m) = split_dom_antidom(&[2, -1, 3, 0]);
        assert_eq!(add_vec(&p, &m), vec![2, -1, 3, 0]);
        assert!(p.windows(2).all(|w| w[0] >= w[1]));
        assert!(m.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn deep_weights_are_deep() {
        let mut rng = trial_rng(1, 0, 0);
        for n in 1..=4 {
            let p = next_prime(8 * (n as u64).saturating_sub(1) + 11);
            let m = 2 * (n as i64 - 1) + 2;
            let s = random_deep_weight(p, n, 2, m, &mut rng).unwrap();
            assert!(sw_predicates(&s, &vec![1; n], m).unwrap().m_deep);
        }
        assert!(random_deep_weight(11, 4, 1, 8, &mut rng).is_err());
    }

    #[test]
    fn reports_are_reproducible() {
        let a = run_suite("cauchy-binet", &small(5)).unwrap();
        let b = run_suite("cauchy-binet", &small(5)).unwrap();
        assert_eq!(a, b);
        assert!(a.passed);
        assert_eq!(a.cases, 5);
        assert!(matches!(run_suite("nope", &small(1)), Err(SuiteError::UnknownSuite(_))));
    }

    #[test]
    fn small_runs_pass() {
        for name in ["conv-formulas", "gauge", "wd-dictionary", "divisibility", "spectral-satake", "reduction-map", "failure", "parabolic-shape"] {
            let cfg = SuiteConfig { trials: Some(2), ..small(2) };
            let report = run_suite(name, &cfg).unwrap();
            assert!(report.passed, "{name}: {:?}", report.failures);
        }
    }
}
