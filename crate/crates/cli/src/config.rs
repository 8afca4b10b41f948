//! TOML job configuration and the JSON point format.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use satake_core::root_data::{Perm, Weight};
use satake_core::scalars::SymbolicScalar;
use satake_core::tame_types::{build_type, SerreWeight, TameInertialType};

/// A job file. Top-level keys are run bounds; tables declare inputs.
#[derive(Debug, Default, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub depth: Option<u32>,
    pub trunc: Option<usize>,
    pub p: Option<u64>,
    pub n: Option<usize>,
    #[serde(rename = "type")]
    pub ty: Option<TypeDecl>,
    pub weight: Option<WeightDecl>,
    pub hecke: Option<HeckeDecl>,
    pub satake: Option<SatakeDecl>,
    pub family: Option<FamilyDecl>,
    pub point: Option<PointDecl>,
}

/// `{p, e, f, n, a_prime, s_tau}` with `s_tau` given by its 0-based images.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct TypeDecl {
    pub p: u64,
    pub e: u32,
    pub f: usize,
    pub n: usize,
    pub a_prime: Vec<i64>,
    pub s_tau: Vec<usize>,
}

/// `{p, f, n, lambda}` with one row of `lambda` per embedding.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct WeightDecl {
    pub p: u64,
    pub f: usize,
    pub n: usize,
    pub lambda: Vec<Vec<i64>>,
}

/// A level and a list of generators `T_{classes, d}` to multiply.
#[derive(Debug, Default, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct HeckeDecl {
    pub sizes: Option<Vec<usize>>,
    pub groups: Option<Vec<Vec<usize>>>,
    #[serde(default)]
    pub factors: Vec<GeneratorDecl>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorDecl {
    pub classes: Vec<usize>,
    pub d: Vec<usize>,
}

/// `Sym^r (x) det^m` over `F_p` and the cocharacters to transform.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SatakeDecl {
    pub p: u64,
    pub r: u32,
    pub m: i64,
    pub mu: Option<Vec<[i64; 2]>>,
}

/// A partial Frobenius family in `C`-coordinates, entries in canonical
/// scalar text form. Exactly one of `diag` and `c` must be present.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyDecl {
    pub diag: Option<Vec<Vec<String>>>,
    pub c: Option<Vec<Vec<Vec<String>>>>,
    pub trunc: Option<usize>,
    /// Number of seeded random changes of eigenbasis to test against.
    pub gauge_changes: Option<usize>,
    pub lambda: Option<Vec<Vec<i64>>>,
}

/// `{sigma, t}`: a Serre weight and the Frobenius values of the point.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PointDecl {
    pub sigma: WeightDecl,
    pub t: Vec<String>,
    #[serde(default)]
    pub strata: Vec<Vec<usize>>,
}

/// Read a TOML job file. Empty files are rejected.
pub fn load(path: &Path) -> Result<JobConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    if text.trim().is_empty() {
        bail!("config {} is empty", path.display());
    }
    toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
}

/// Read a JSON point description.
pub fn load_point(path: &Path) -> Result<PointDecl> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading point {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing point {}", path.display()))
}

impl TypeDecl {
    pub fn build(&self) -> Result<TameInertialType> {
        let s_tau = Perm::new(self.s_tau.clone()).context("s_tau")?;
        Ok(build_type(self.p, self.e, self.f, self.n, &self.a_prime, &s_tau)?)
    }
}

pub fn weight_from_rows(n: usize, rows: &[Vec<i64>]) -> Result<Weight> {
    Weight::new(n, rows.to_vec()).context("lambda")
}

impl WeightDecl {
    pub fn weight(&self) -> Result<Weight> {
        if self.lambda.len() != self.f {
            bail!("lambda has {} rows but f = {}", self.lambda.len(), self.f);
        }
        weight_from_rows(self.n, &self.lambda)
    }

    pub fn serre(&self) -> Result<SerreWeight> {
        Ok(SerreWeight::new(self.p, self.weight()?)?)
    }
}

pub fn parse_scalar(s: &str) -> Result<SymbolicScalar> {
    s.parse().with_context(|| format!("scalar `{s}`"))
}
