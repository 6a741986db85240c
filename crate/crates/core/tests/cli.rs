use std::path::PathBuf;
use std::process::{Command, Output};

fn symsq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symsq")).args(args).output().expect("run symsq")
}

fn out_path(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    dir.join(name)
}

#[test]
fn passing_suite_exits_zero_and_is_deterministic() {
    let args = ["--suite", "verify-gauss", "--param", "c_max=48", "--tolerance", "closed_form=1e-9"];
    let a = symsq(&args);
    let b = symsq(&args);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("check_id,params_json,value_re,value_im,oracle_re,oracle_im,abs_err,rel_err,pass")
    );
    let first = lines.next().unwrap();
    assert!(first.starts_with("config.effective,") && first.contains("closed_form"), "{first}");
}

#[test]
fn json_report_to_file() {
    let path = out_path("quadruples.json");
    let o = symsq(&["--suite", "count-quadruples", "--param", "K=16", "--param", "divisors=1", "--format", "json", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["suite"], "count-quadruples");
    assert!(v["rows"].as_array().unwrap().iter().all(|r| r["pass"] == true));
}

#[test]
fn failed_check_exits_one() {
    let o = symsq(&["--suite", "verify-gauss", "--param", "c_max=8", "--tolerance", "closed_form=1e-30"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn configuration_errors_exit_two() {
    let missing = symsq(&["--suite", "eval-L", "--coeff-file", "/nonexistent/level11.txt"]);
    assert_eq!(missing.status.code(), Some(2));
    assert_eq!(symsq(&["--suite", "no-such-suite"]).status.code(), Some(2));
    assert_eq!(symsq(&["--suite", "verify-gauss", "--param", "cmax=3"]).status.code(), Some(2));
    assert_eq!(symsq(&["--suite", "verify-gauss", "--param", "c_max"]).status.code(), Some(2));
    assert_eq!(symsq(&["--suite", "verify-gauss", "--tolerance", "closed_form=0"]).status.code(), Some(2));
    assert_eq!(symsq(&["--suite", "verify-gauss", "--format", "xml"]).status.code(), Some(2));
}

#[test]
fn quadrature_failure_exits_three() {
    let o = symsq(&["--suite", "stationary-phase", "--param", "quadrature_panels=16", "--tolerance", "quadrature=1e-15"]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}
