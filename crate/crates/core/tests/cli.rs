//! End-to-end runs of the `vdsopt` binary against golden reports.
//!
//! Set `VDSOPT_BLESS=1` to rewrite the golden files.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vdsopt"))
        .args(args)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .expect("binary runs")
}

fn golden_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

/// Runs twice, checks the exit code, byte-identical output and the golden file.
fn check(name: &str, args: &[&str], code: i32) {
    let a = run(args);
    let b = run(args);
    assert_eq!(a.status.code(), Some(code), "{name}: {}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout, "{name}: output differs between runs");
    let path = golden_path(name);
    if std::env::var_os("VDSOPT_BLESS").is_some() {
        std::fs::write(&path, &a.stdout).unwrap();
        return;
    }
    let want = std::fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert!(a.stdout == want, "{name}: output differs from {}", path.display());
}

#[test]
fn certify_golden() {
    check("certify_constant.json", &["--json", "certify", "--instance", "tests/fixtures/constant.json", "--point", "0;0,0"], 0);
    check("certify_grid1d_refuted.json", &["--json", "certify", "--instance", "tests/fixtures/grid1d.json", "--point", "1"], 1);
    check("certify_line_q.json", &["--json", "certify", "--instance", "tests/fixtures/line_q.json"], 0);
}

#[test]
fn evp_golden() {
    check("evp_grid1d.json", &["--json", "evp", "--instance", "tests/fixtures/grid1d.json", "--point", "0.3"], 0);
}

#[test]
fn necessary_condition_golden() {
    check("nck_line.json", &["--json", "nck", "--instance", "tests/fixtures/line.json"], 0);
    check("ncq_line_q.json", &["--json", "nc-q", "--instance", "tests/fixtures/line_q.json"], 0);
}

#[test]
fn openness_golden() {
    check("openness_identity.json", &["--json", "openness", "--instance", "tests/fixtures/identity.json", "--rhos", "3"], 0);
}

#[test]
fn constants_golden() {
    check("constants_solvable.json", &["--json", "constants", "--epsilon", "0.2", "--delta", "0.1"], 0);
    check("constants_infeasible.json", &["--json", "constants", "--epsilon", "0.01", "--delta", "0.5"], 2);
}

#[test]
fn generate_and_reduce_golden() {
    check("generate_grid1d_7.json", &["generate", "--seed", "7", "--profile", "grid1d"], 0);
    check("reduce_line_q.json", &["reduce", "--instance", "tests/fixtures/line_q.json"], 0);
}

#[test]
fn hypothesis_failures_exit_2() {
    // no grid on Ω for the localization step
    check("nc32_line.json", &["--json", "nc32", "--instance", "tests/fixtures/line.json"], 2);
    // Ω = [0, 1] at its endpoint: the injectivity constant vanishes
    check("openness_line.json", &["--json", "openness", "--instance", "tests/fixtures/line.json"], 2);
    // wrong structure kind
    assert_eq!(run(&["ncq", "--instance", "tests/fixtures/line.json"]).status.code(), Some(2));
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(run(&["certify"]).status.code(), Some(64));
    assert_eq!(run(&["certify", "--instance", "tests/fixtures/missing.json"]).status.code(), Some(64));
    assert_eq!(run(&["generate", "--profile", "nope"]).status.code(), Some(64));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn generated_files_reload_and_certify() {
    let dir = std::env::temp_dir().join(format!("vdsopt-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    for profile in ["grid1d", "grid2d", "polyhedral2d", "lifted"] {
        let path = dir.join(format!("{profile}.json"));
        let p = path.to_str().unwrap();
        let g = run(&["generate", "--seed", "11", "--profile", profile, "--out", p]);
        assert_eq!(g.status.code(), Some(0), "{profile}");
        let c = run(&["certify", "--instance", p]);
        assert_eq!(c.status.code(), Some(0), "{profile}: {}", String::from_utf8_lossy(&c.stdout));
    }
    std::fs::remove_dir_all(&dir).ok();
}
