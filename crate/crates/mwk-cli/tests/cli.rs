use std::process::{Command, Output};

use serde_json::Value;

fn mwk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mwk")).args(args).output().expect("run mwk")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn count_check_over_real_quadratic() {
    let o = mwk(&["check", "count", "--field", "Q(sqrt(2))", "--primes", "2,3,5,7"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let row = &v["checks"][0]["details"]["fields"][0];
    let (h, g, x) = (row["spec_h"].as_u64().unwrap(), row["spec_gw"].as_u64().unwrap(), row["x_f_plus_one"].as_u64().unwrap());
    assert_eq!(x, 3);
    assert_eq!(h, g + x);
}

#[test]
fn rho_example() {
    let o = mwk(&["rho", "--source", "sh-c2", "--point", "P(C2,2,3)", "--field", "Q", "--ordering", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "type5:a=0\n");
    let o = mwk(&["rho", "--source", "sh-fin", "--point", "C(3,inf)"]);
    assert_eq!(stdout(&o), "type2:p=3\n");
}

#[test]
fn rho_needs_an_ordering() {
    let o = mwk(&["rho", "--source", "sh-c2", "--point", "P(C2,0,1)", "--field", "F(3)"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn spec_dot_over_f3() {
    let o = mwk(&["spec", "--field", "F(3)", "--primes", "2,3", "--format", "dot"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("digraph"));
    assert_eq!(text.lines().filter(|l| l.contains("[label=")).count(), 4);
}

#[test]
fn spec_json_has_points() {
    let o = mwk(&["spec", "--field", "Q", "--space", "spec-gw", "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["points"].as_array().unwrap().len(), 9);
}

#[test]
fn normalize_examples() {
    assert_eq!(stdout(&mwk(&["normalize", "(2+[-1]*eta)*eta"])), "0\n");
    assert_eq!(stdout(&mwk(&["normalize", "h - (2+[-1]*eta)"])), "0\n");
    assert_eq!(stdout(&mwk(&["normalize", "-[2]*[-2]"])), "0\n");
    assert_eq!(mwk(&["normalize", "[1/0]"]).status.code(), Some(2));
    assert_eq!(mwk(&["normalize", "[2"]).status.code(), Some(2));
}

#[test]
fn eq_and_degree() {
    assert_eq!(stdout(&mwk(&["eq", "[4]", "2*[2]"])), "Equal\n");
    assert_eq!(stdout(&mwk(&["eq", "[2]", "[3]"])), "Distinct\n");
    assert_eq!(stdout(&mwk(&["degree", "eta*[3]*[5]"])), "1\n");
    assert_eq!(stdout(&mwk(&["degree", "[2] - [2]"])), "zero\n");
    assert_eq!(mwk(&["degree", "eta + [2]"]).status.code(), Some(2));
}

#[test]
fn gw_report() {
    let o = mwk(&["gw", "1,1,1", "--field", "F(3)", "--compare", "-1,-1,-1", "--power", "1"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["isometric"], Value::Bool(false));
    assert_eq!(v["hyperbolic_planes"], 1);
    assert_eq!(v["in_power"]["member"], Value::Bool(false));
}

#[test]
fn factor_bound_from_environment() {
    let n = (10007u64 * 10009).to_string();
    let ok = mwk(&["gw", &n]);
    assert_eq!(ok.status.code(), Some(0));
    let low = Command::new(env!("CARGO_BIN_EXE_mwk")).args(["gw", &n]).env("MWK_FACTOR_BOUND", "10").output().unwrap();
    assert_eq!(low.status.code(), Some(2));
    assert_eq!(mwk(&["--factor-bound", "10", "gw", &n]).status.code(), Some(2));
}

#[test]
fn residue_report() {
    let o = mwk(&["residue", "--prime", "type5:a=0", "--expr", "[-1]"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["residue_field"], "F_2[[-1]^+-1]");
    assert_eq!(v["in_prime"], Value::Bool(false));
    assert_eq!(mwk(&["residue", "--prime", "type4:a=0", "--field", "F(5)"]).status.code(), Some(2));
}

#[test]
fn every_check_is_reachable() {
    for name in ["identities", "census", "count", "closure", "rho", "coverage", "witt"] {
        let o = mwk(&["check", name]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", stdout(&o));
        let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(v["pass"], Value::Bool(true));
    }
    for name in ["forms", "residue"] {
        assert_eq!(mwk(&["check", name, "--field", "Q"]).status.code(), Some(0));
    }
    assert_eq!(mwk(&["check", "bogus"]).status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    let args = ["check", "identities", "--seed", "5"];
    assert_eq!(mwk(&args).stdout, mwk(&args).stdout);
    let args = ["spec", "--field", "Q(sqrt(2))", "--format", "dot"];
    assert_eq!(mwk(&args).stdout, mwk(&args).stdout);
}

#[test]
fn export_writes_files() {
    let dir = std::env::temp_dir().join(format!("mwk-export-{}", std::process::id()));
    let o = mwk(&["export", "--field", "Q", "--out", dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    for f in ["spec_h.dot", "spec_h.json", "spec_gw.json", "sh_fin.dot", "sh_c2.json", "coverage.json"] {
        assert!(dir.join(f).exists(), "{f}");
    }
    std::fs::remove_dir_all(dir).unwrap();
}
