//! `satake-forge`: declare types, weights and points in TOML or JSON, run
//! the library's computations and verification suites, and emit TSV tables
//! and JSON documents.
//!
//! Exit status is 0 when every checked identity holds, 1 when one fails and
//! 2 on usage or configuration errors.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::{Bounds, Report};
use config::JobConfig;

#[derive(Parser, Debug)]
#[command(name = "satake-forge", version, about = "Hecke algebras, Frobenius families and the mod-p Satake dictionary for GL_n")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalOpts {
    /// TOML job file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed for randomized work.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Number of randomized trials.
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Directory receiving `<command>.tsv` and `<command>.json`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Lattice precision exponent for coset enumeration.
    #[arg(long, global = true)]
    depth: Option<u32>,
    /// `v`-adic truncation for Frobenius families.
    #[arg(long, global = true)]
    trunc: Option<usize>,
    /// What to print on standard output.
    #[arg(long, global = true, value_enum, default_value_t = Format::Tsv)]
    format: Format,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Tsv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tame inertial types.
    #[command(subcommand, name = "type")]
    Type(TypeCmd),
    /// Integral and mod-p Hecke algebras.
    #[command(subcommand)]
    Hecke(HeckeCmd),
    /// Brute-force Satake transforms.
    #[command(subcommand)]
    Satake(SatakeCmd),
    /// Global functions on partial Frobenius families.
    #[command(subcommand)]
    Frob(FrobCmd),
    /// Evaluation maps at ordinary points.
    #[command(subcommand)]
    Galois(GaloisCmd),
    /// Run a verification suite, or `all`.
    Verify {
        suite: String,
        /// Restrict to this prime.
        #[arg(long)]
        p: Option<u64>,
        /// Restrict to this rank.
        #[arg(long)]
        n: Option<usize>,
    },
}

#[derive(Subcommand, Debug)]
enum TypeCmd {
    /// Orbits, classes and the lowest alcove presentation of `[type]`.
    Inspect,
}

#[derive(Subcommand, Debug)]
enum HeckeCmd {
    /// Table of normalized generators.
    Present,
    /// Product of `[[hecke.factors]]`.
    Mul,
    /// Reduction of the factors and their product to the mod-p algebra.
    Reduce,
}

#[derive(Subcommand, Debug)]
enum SatakeCmd {
    /// Oracle transform for `Sym^r (x) det^m` of `GL_2`.
    Gl2,
}

#[derive(Subcommand, Debug)]
enum FrobCmd {
    /// Table of `f` and `F~` values of `[family]`.
    Eval,
}

#[derive(Subcommand, Debug)]
enum GaloisCmd {
    /// Evaluate the Satake generators at a point.
    Eval {
        /// JSON point `{sigma: {p, f, n, lambda}, t: [...]}`; overrides `[point]`.
        #[arg(long)]
        point: Option<PathBuf>,
    },
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("SATAKE_FORGE_THREADS") {
        let k: usize = v.trim().parse().with_context(|| format!("SATAKE_FORGE_THREADS={v} is not a count"))?;
        rayon::ThreadPoolBuilder::new().num_threads(k).build_global().context("configuring the worker pool")?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<Report> {
    configure_threads()?;
    let g = &cli.global;
    let cfg = match &g.config {
        Some(path) => config::load(path)?,
        None => JobConfig::default(),
    };
    let mut bounds = Bounds {
        seed: g.seed.or(cfg.seed),
        trials: g.trials.or(cfg.trials),
        depth: g.depth.or(cfg.depth),
        trunc: g.trunc.or(cfg.trunc),
        p: cfg.p,
        n: cfg.n,
    };
    match &cli.command {
        Command::Type(TypeCmd::Inspect) => commands::type_inspect(&cfg),
        Command::Hecke(HeckeCmd::Present) => commands::hecke_present(&cfg, &bounds),
        Command::Hecke(HeckeCmd::Mul) => commands::hecke_mul(&cfg, &bounds),
        Command::Hecke(HeckeCmd::Reduce) => commands::hecke_reduce(&cfg, &bounds),
        Command::Satake(SatakeCmd::Gl2) => commands::satake_gl2(&cfg),
        Command::Frob(FrobCmd::Eval) => commands::frob_eval(&cfg, &bounds),
        Command::Galois(GaloisCmd::Eval { point }) => {
            let decl = match point {
                Some(path) => config::load_point(path)?,
                None => cfg.point.clone().ok_or_else(|| anyhow::anyhow!("galois eval needs --point or a [point] table"))?,
            };
            commands::galois_eval(&decl)
        }
        Command::Verify { suite, p, n } => {
            bounds.p = p.or(bounds.p);
            bounds.n = n.or(bounds.n);
            commands::verify(suite, &bounds)
        }
    }
}

fn emit(report: &Report, g: &GlobalOpts) -> Result<()> {
    let json = serde_json::to_string_pretty(&report.json)? + "\n";
    if let Some(dir) = &g.out {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        std::fs::write(dir.join(format!("{}.tsv", report.stem)), &report.tsv)?;
        std::fs::write(dir.join(format!("{}.json", report.stem)), &json)?;
    }
    match g.format {
        Format::Tsv => print!("{}", report.tsv),
        Format::Json => print!("{json}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|r| emit(&r, &cli.global).map(|()| r.ok));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
