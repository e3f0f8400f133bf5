use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn mops(args: &[&str], extra: &[&Path]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_mops"));
    cmd.args(args);
    for p in extra {
        cmd.arg(p);
    }
    cmd.output().unwrap()
}

fn run(config: &Path, out: &Path, flags: &[&str]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_mops"));
    cmd.arg("run").arg(config).arg("--out").arg(out).args(flags);
    cmd.output().unwrap()
}

fn report(out: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap()
}

// copy of a shipped config with extra lines appended to its [run] section
fn variant(dir: &Path, base: &str, extra: &str) -> PathBuf {
    let text = std::fs::read_to_string(config(base)).unwrap();
    let path = dir.join(base);
    std::fs::write(&path, format!("{text}\n{extra}\n")).unwrap();
    path
}

#[test]
fn hilbert_run_passes_with_exact_residuals() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&config("hilbert.toml"), dir.path(), &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(dir.path());
    assert_eq!(r["status"], "pass");
    let checks = r["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 7);
    for c in checks {
        assert_eq!(c["pass"], true, "{c}");
        if c["name"] != "second-kind" {
            assert_eq!(c["residual"], "0", "{c}");
        }
    }
    for m in ["g", "S", "Sbar", "J"] {
        assert!(dir.path().join(format!("{m}.csv")).exists());
        assert!(dir.path().join(format!("{m}.txt")).exists());
    }
}

#[test]
fn runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert_eq!(run(&config("hilbert.toml"), a.path(), &[]).status.code(), Some(0));
    assert_eq!(run(&config("hilbert.toml"), b.path(), &["--sequential"]).status.code(), Some(0));
    for f in ["report.json", "g.csv", "g.txt", "S.csv", "S.txt", "Sbar.csv", "Sbar.txt", "J.csv", "J.txt"] {
        let x = std::fs::read(a.path().join(f)).unwrap();
        let y = std::fs::read(b.path().join(f)).unwrap();
        assert_eq!(x, y, "{f} differs");
    }
}

#[test]
fn duplicate_strings_exit_with_setup_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&config("duplicate.toml"), dir.path(), &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("SingularMinor(2)"));
    let r = report(dir.path());
    assert_eq!(r["status"], "error");
    assert!(r["error"].as_str().unwrap().contains("SingularMinor(2)"));
}

#[test]
fn exp_pair_kernel_check_in_float() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = variant(dir.path(), "exp-pair.toml", "checks = [\"cd-alternative\"]");
    let out_dir = dir.path().join("out");
    let out = run(&cfg, &out_dir, &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out_dir);
    let c = &r["checks"][0];
    assert_eq!(c["name"], "cd-alternative");
    assert!(c["residual"].as_str().unwrap().parse::<f64>().unwrap() <= 1e-15);
}

#[test]
fn exp_pair_at_sixteen_hits_the_pivot_floor() {
    // 128 bits cannot resolve the thirteenth leading minor of this pair
    let dir = tempfile::tempdir().unwrap();
    let cfg = variant(dir.path(), "exp-pair.toml", "checks = [\"cd-alternative\"]");
    let out = run(&cfg, &dir.path().join("out"), &["--N", "16"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("SingularMinor(12)"));
}

#[test]
fn describe_staircase_prints_index_sets() {
    let out = mops(&["describe", "--l", "12"], &[&config("staircase.toml")]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("sigma1 = {12..16}x{6..11}"), "{text}");
    assert!(text.contains("sigma2 = {9..11}x{12,13}"), "{text}");
    assert!(!text.contains("tridiagonal"));
}

#[test]
fn describe_scalar_case_is_tridiagonal() {
    let out = mops(&["describe"], &[&config("hilbert.toml")]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("J is tridiagonal"));
}

#[test]
fn mismatched_compositions_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(config("staircase.toml")).unwrap().replace("n1 = [4, 3, 2]", "n1 = [4, 3]");
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, text).unwrap();
    let out = mops(&["describe"], &[&cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error:"));
}

#[test]
fn export_j_csv_with_six_digits() {
    let dir = tempfile::tempdir().unwrap();
    let out = mops(&["export", "--what", "j", "--format", "csv", "--digits", "6", "--out"], &[dir.path(), &config("hilbert.toml")]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("J.csv")).unwrap();
    assert!(text.starts_with("0.500000,1.000000"), "{text}");
}

#[test]
fn export_g_text_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let out = mops(
        &["export", "--what", "g", "--format", "text", "--N", "2", "--out"],
        &[dir.path(), &config("hilbert.toml")],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("g.txt")).unwrap();
    assert!(text.contains("# matrix: g\n"));
    assert!(text.ends_with("1 1/2\n1/2 1/3\n"), "{text}");
}
