use std::fs;
use std::path::Path;
use std::process::Command;

use ccbm_cli::{parse_config, run_experiment, run_gallery, Overrides, GALLERY_HEADER};

const SMALL: &str = r#"
sigma_nodes = 40
gamma_nodes = 30
h = 0.16
log_every = 2

[truth]
curves = ["kite_c3"]

[initial]
curves = ["circle 0 0 0.3"]

[data]
delta = 0.15
refinement = 2

[descent]
max_iters = 4
"#;

fn read(dir: &Path, f: &str) -> Vec<u8> {
    fs::read(dir.join(f)).unwrap_or_else(|e| panic!("{f}: {e}"))
}

#[test]
fn small_noisy_run_writes_every_artifact() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = parse_config(SMALL).unwrap();
    let s = run_experiment(&cfg, tmp.path()).unwrap();
    assert_eq!(s.iterations, s.history.len() - 1);
    assert!(s.iterations <= 4 && s.final_j.is_finite());
    for f in [
        "config.toml",
        "data.txt",
        "truth_0.txt",
        "history.csv",
        "mesh_initial.txt",
        "mesh_final.txt",
        "summary.txt",
    ] {
        assert!(tmp.path().join(f).is_file(), "missing {f}");
    }
    let history = String::from_utf8(read(tmp.path(), "history.csv")).unwrap();
    assert_eq!(history.lines().count(), s.history.len() + 1);
    let summary = String::from_utf8(read(tmp.path(), "summary.txt")).unwrap();
    assert!(summary.contains("final_J"));
    assert!(fs::read_dir(tmp.path().join("shapes")).unwrap().count() >= 1);
    // the echoed config parses back to the same run
    let echoed = String::from_utf8(read(tmp.path(), "config.toml")).unwrap();
    assert_eq!(parse_config(&echoed).unwrap(), cfg);
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = parse_config(SMALL).unwrap();
    run_experiment(&cfg, a.path()).unwrap();
    run_experiment(&cfg, b.path()).unwrap();
    for f in ["history.csv", "data.txt", "mesh_final.txt"] {
        assert_eq!(read(a.path(), f), read(b.path(), f), "{f} differs");
    }
}

#[test]
fn empty_gallery_writes_only_the_header() {
    let dir = tempfile::tempdir().unwrap();
    let out = tempfile::tempdir().unwrap();
    let rows = run_gallery(dir.path(), out.path(), Overrides::default()).unwrap();
    assert!(rows.is_empty());
    let csv = fs::read_to_string(out.path().join("gallery.csv")).unwrap();
    assert_eq!(csv.trim_end(), GALLERY_HEADER);
}

#[test]
fn gallery_records_broken_cases_and_keeps_going() {
    let dir = tempfile::tempdir().unwrap();
    let out = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("a_good.toml"), SMALL).unwrap();
    fs::write(dir.path().join("b_bad.toml"), "alpha = -1\n").unwrap();
    let over = Overrides {
        max_iters: Some(1),
        ..Overrides::default()
    };
    let rows = run_gallery(dir.path(), out.path(), over).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].succeeded() && !rows[1].succeeded());
    let csv = fs::read_to_string(out.path().join("gallery.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(out.path().join("a_good").join("history.csv").is_file());
}

#[test]
fn binary_reconstructs_from_a_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("small.toml");
    fs::write(&cfg, SMALL).unwrap();
    let out = tmp.path().join("run");
    let status = Command::new(env!("CARGO_BIN_EXE_ccbm"))
        .args(["--quiet", "--max-iters", "1", "--out"])
        .arg(&out)
        .arg("reconstruct")
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(
        status.status.success(),
        "{}",
        String::from_utf8_lossy(&status.stderr)
    );
    let history = fs::read_to_string(out.join("history.csv")).unwrap();
    assert!(history.lines().count() <= 3);
}

#[test]
fn binary_rejects_unknown_config_keys() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.toml");
    fs::write(&cfg, format!("{SMALL}\n[extra]\nfoo = 1\n")).unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_ccbm"))
        .args(["--out"])
        .arg(tmp.path().join("run"))
        .arg("generate-data")
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(!status.status.success());
    assert!(String::from_utf8_lossy(&status.stderr).contains("extra"));
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            parse_config(&fs::read_to_string(&path).unwrap())
                .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            n += 1;
        }
    }
    assert!(n >= 5);
}
