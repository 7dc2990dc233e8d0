//! End-to-end runs of the `pphi2` binary.

use std::path::{Path, PathBuf};
use std::process::Command;

use pphi2::cli::{parse_config, parse_config_str};
use pphi2::Error;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pphi2"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn run(args: &[&str]) -> (i32, String) {
    let out = bin().args(args).output().unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stderr).into_owned())
}

const SMALL: &str = r#"
[lattice]
beta = 1.0
half_length = 2.0
n_alpha = 8
n_x = 16

[measure]
P = [0.0, 0.0, 0.0, 0.0, 0.05]
l = 1.0
n_samples = 4000
sweeps = 4000
burn_in = 500

[battery]
checks = ["moments", "estimators", "holder"]
"#;

fn small_config(dir: &Path) -> String {
    let path = dir.join("small.toml");
    std::fs::write(&path, SMALL).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn shipped_configs_parse() {
    let mut n = 0;
    for entry in std::fs::read_dir(configs()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            parse_config(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            n += 1;
        }
    }
    assert!(n >= 5);
}

#[test]
fn free_battery_on_default_lattice_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let (code, err) = run(&["battery", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    for f in ["results.csv", "summary.json", "manifest.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["schema_version"], 1);
    assert_eq!(summary["pass"], true);
    let header = std::fs::read_to_string(out.join("results.csv")).unwrap();
    assert!(header.starts_with("check,item,value,reference,std_error,tolerance,pass\n"));
}

#[test]
fn zero_tolerance_scale_fails_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let out = dir.path().join("out");
    let (code, err) = run(&["battery", "--config", &cfg, "--out", out.to_str().unwrap(), "--tolerance-scale", "0"]);
    assert_eq!(code, 1, "{err}");
    assert!(err.contains("failing checks:"), "{err}");
}

#[test]
fn unwritable_output_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let out = blocker.join("sub");
    let (code, err) = run(&["tabulate-oracles", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn bad_configs_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    for (text, needle) in [
        ("[lattice]\nmass = -1.0\n", "lattice.mass"),
        ("[lattice]\nhalf_length = 0.0\n", "lattice.half_length"),
        ("[measure]\nP = [0.0, 0.0, 0.0, 1.0]\n", "measure.P"),
        ("[lattice]\nbogus = 1\n", "line 2"),
    ] {
        let path = dir.path().join("bad.toml");
        std::fs::write(&path, text).unwrap();
        let (code, err) = run(&["battery", "--config", path.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert_eq!(code, 2, "{text}: {err}");
        assert!(err.contains(needle), "{needle} not in {err}");
    }
    assert!(matches!(parse_config_str("seed = \"x\""), Err(Error::ParseError { line: 1, .. })));
}

#[test]
fn same_seed_reproduces_and_manifest_reruns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let c = dir.path().join("c");
    assert_eq!(run(&["battery", "--config", &cfg, "--seed", "9", "--out", a.to_str().unwrap()]).0, 0);
    assert_eq!(run(&["battery", "--config", &cfg, "--seed", "9", "--threads", "3", "--out", b.to_str().unwrap()]).0, 0);
    let manifest = a.join("manifest.json");
    assert_eq!(run(&["rerun", manifest.to_str().unwrap(), "--out", c.to_str().unwrap()]).0, 0);
    let ra = std::fs::read(a.join("results.csv")).unwrap();
    assert_eq!(ra, std::fs::read(b.join("results.csv")).unwrap());
    assert_eq!(ra, std::fs::read(c.join("results.csv")).unwrap());
}

#[test]
fn sample_writes_configurations() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s");
    let (code, err) = run(&["sample", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let text = std::fs::read_to_string(out.join("samples.csv")).unwrap();
    assert!(text.starts_with("sample,i,j,alpha,x,phi\n"));
    assert_eq!(text.lines().count(), 1 + 4 * 16 * 64);
}
