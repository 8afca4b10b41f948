//! End-to-end runs of the `satake-forge` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_satake-forge")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf8")
}

fn with_config(name: &str, rest: &[&str]) -> Output {
    let path = data(name);
    let mut args = vec!["--config", path.to_str().unwrap()];
    args.extend_from_slice(rest);
    run(&args)
}

#[test]
fn principal_series_presentation() {
    let o = with_config("ps3.toml", &["hecke", "present"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("generator\tclass\td\telement\n"));
    for i in 0..3 {
        assert!(out.contains(&format!("T[{i};1]\t{i}\t1\t(1)*x{i}\n")), "{out}");
    }
    assert!(out.contains("x0^-1*x1^-1*x2^-1"));
}

#[test]
fn verify_conv_oracle_passes() {
    let o = run(&["verify", "conv-oracle", "--p", "3", "--n", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("PASS\t2\tconv-oracle\t72\t0"), "{out}");
    assert!(out.contains("count\t2\tconv-oracle\tp=3 n=2\t72"), "{out}");
}

#[test]
fn failed_identity_exits_one() {
    let o = run(&["verify", "conv-oracle", "--p", "3", "--n", "2", "--depth", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL\t2\tconv-oracle"));
}

#[test]
fn usage_and_config_errors_exit_two() {
    let dir = std::env::temp_dir().join(format!("satake-forge-empty-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let empty = dir.join("empty.toml");
    std::fs::write(&empty, "").unwrap();
    let o = run(&["--config", empty.to_str().unwrap(), "type", "inspect"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("empty"));

    let o = with_config("bad.toml", &["type", "inspect"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr).to_string();
    assert!(err.contains("line 3"), "{err}");
    assert!(err.contains("expected u32"), "{err}");

    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "no-such-suite"]).status.code(), Some(2));
    assert_eq!(run(&["hecke", "mul"]).status.code(), Some(2));
}

#[test]
fn type_inspect_reports_orbits() {
    let o = with_config("ps3.toml", &["type", "inspect"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("principal_series\ttrue\n"));
    assert!(out.contains("orbits\t{0} {1} {2}\n"));
}

#[test]
fn hecke_mul_and_reduce() {
    let o = with_config("hecke3.toml", &["hecke", "mul"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("T[0;1]*T[1;1]\t(1)*x0*x1\n"));
    let o = with_config("hecke3.toml", &["hecke", "reduce"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("T[0;1]\t(1)*x0\t1*y1\n"), "{out}");
}

#[test]
fn satake_frob_and_galois_tables() {
    let o = with_config("satake.toml", &["satake", "gl2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("-1,-1\t1*x1*x2\ttrue\t1*x1*x2\ttrue\n"));

    let o = with_config("family.toml", &["frob", "eval"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("# gauge changes 5, moved 0"), "{out}");

    let point = data("point.json");
    let o = run(&["galois", "eval", "--point", point.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("3\t1 * t1 * t2 * t3\t1 * t1 * t2 * t3\t1 * t1 * t2 * t3\ttrue\n"), "{out}");
}

#[test]
fn same_seed_gives_identical_artifacts() {
    let base = std::env::temp_dir().join(format!("satake-forge-repro-{}", std::process::id()));
    let mut outputs = Vec::new();
    for (k, threads) in ["1", "3"].iter().enumerate() {
        let dir = base.join(k.to_string());
        let o = Command::new(env!("CARGO_BIN_EXE_satake-forge"))
            .env("SATAKE_FORGE_THREADS", threads)
            .args(["verify", "wd-dictionary", "--seed", "11", "--trials", "6", "--out", dir.to_str().unwrap()])
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0));
        let tsv = std::fs::read(dir.join("verify-wd-dictionary.tsv")).unwrap();
        let json = std::fs::read(dir.join("verify-wd-dictionary.json")).unwrap();
        outputs.push((o.stdout, tsv, json));
    }
    assert_eq!(outputs[0], outputs[1]);
    let _ = std::fs::remove_dir_all(base);
}
