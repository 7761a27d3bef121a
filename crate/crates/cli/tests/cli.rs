use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn nsa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nsa")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures")
}

fn fixture(name: &str) -> String {
    fixtures().join(format!("{}.nsa", name)).display().to_string()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("nsa-cli-{}-{}", name, std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn copy_tree(from: &Path, to: &Path) {
    std::fs::create_dir_all(to).unwrap();
    for e in std::fs::read_dir(from).unwrap() {
        let p = e.unwrap().path();
        let dest = to.join(p.file_name().unwrap());
        if p.is_dir() {
            copy_tree(&p, &dest);
        } else {
            std::fs::copy(&p, &dest).unwrap();
        }
    }
}

#[test]
fn standardness_of_a_number() {
    let dir = scratch("ust");
    let path = dir.join("st.nsa");
    std::fs::write(&path, ";! decl x : O\n(st x)\n").unwrap();
    let o = nsa(&["ust", "--in", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("raw         (exists-st c : O (<=* x c))"), "{}", stdout(&o));
}

#[test]
fn declarations_from_flags() {
    let dir = scratch("decl");
    let path = dir.join("st.nsa");
    std::fs::write(&path, "(st z)\n").unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(nsa(&["typecheck", "--in", p]).status.code(), Some(2));
    let o = nsa(&["typecheck", "--in", p, "--decl", "z:(-> O O)", "--format", "json-lines"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["internal"], false);
    assert_eq!(v["normal_form"], false);
}

#[test]
fn normal_form_trace_matches_golden() {
    let name = "riemann_sums_given_modulus";
    let o = nsa(&["normalform", "--in", &fixture(name), "--trace"]);
    assert_eq!(o.status.code(), Some(0));
    let golden = std::fs::read_to_string(fixtures().join(format!("golden/{}.trace", name))).unwrap();
    let expected: String = golden.lines().skip(1).map(|l| format!("{}\n", l)).collect();
    assert_eq!(stdout(&o), expected);
}

#[test]
fn stuck_run_exits_with_failure() {
    let o = nsa(&["normalform", "--in", &fixture("binary_limit_non_extensional"), "--format", "json-lines"]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["outcome"], "stuck");
}

#[test]
fn step_budget_is_respected() {
    let o = nsa(&["normalform", "--in", &fixture("riemann_integrability_approx"), "--budget", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("stuck step budget of 3 exhausted"), "{}", stdout(&o));
}

#[test]
fn riemann_check_passes() {
    let o = nsa(&["verify", "cri", "--f", "x*x", "--g", "2k", "--n", "10", "--trials", "100"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("cri PASS"), "{}", out);
    assert!(out.contains("mesh_bound = 40"));
}

#[test]
fn invalid_modulus_fails_with_witness() {
    let o = nsa(&["verify", "cri", "--f", "x*x", "--g", "1", "--n", "100", "--trials", "10", "--format", "json-lines"]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["pass"], false);
    assert!(v["witness"].as_str().unwrap().contains("partitions"));
}

#[test]
fn structured_output_is_deterministic() {
    let args = ["verify", "wei", "--f", "x*(1-x)", "--g", "k", "--k", "20", "--format", "json-lines", "--seed", "7"];
    let (a, b) = (nsa(&args), nsa(&args));
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_str(stdout(&a).trim()).unwrap();
    for key in ["theorem_id", "term", "trials", "worst_residual_num", "worst_residual_den", "pass", "seed"] {
        assert!(v.get(key).is_some(), "missing {}", key);
    }
    assert_eq!(v["seed"], 7);
}

#[test]
fn every_theorem_runs() {
    let cases: [&[&str]; 7] = [
        &["verify", "ftc", "--f", "x", "--g", "k", "--k", "4", "--trials", "10"],
        &["verify", "ftc-second", "--f", "x*x", "--g", "4k", "--k", "4", "--trials", "2"],
        &["verify", "ulc", "--f", "x", "--family", "2k", "--h", "k", "--sequence", "x + x/n", "--k", "10"],
        &["verify", "wei", "--f", "x*(1-x)", "--k", "10"],
        &["verify", "ivt", "--f", "x*x - 1/2", "--g", "2k", "--k", "100"],
        &["verify", "fixed-point", "--f", "1 - x", "--k", "100"],
        &["verify", "modulus", "--f", "|x - 1/3|", "--k", "10"],
    ];
    for args in cases {
        let o = nsa(args);
        assert_eq!(o.status.code(), Some(0), "{:?}: {}", args, stdout(&o));
    }
}

#[test]
fn violated_precondition_is_a_failure() {
    let o = nsa(&["verify", "ivt", "--f", "x + 1", "--k", "10"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("precondition"));
}

#[test]
fn usage_errors() {
    assert_eq!(nsa(&["ust"]).status.code(), Some(2));
    assert_eq!(nsa(&["verify", "cri", "--f", "x*"]).status.code(), Some(2));
    assert_eq!(nsa(&["corpus", "--only", "nothing_by_this_name"]).status.code(), Some(2));
    assert_eq!(nsa(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(nsa(&["normalform", "--in", &fixture("riemann_sums_given_modulus"), "--strategy", "x"]).status.code(), Some(2));
}

#[test]
fn corpus_reproduces_and_selects() {
    let o = nsa(&["corpus"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).ends_with("15 passed, 0 failed\n"));
    let o = nsa(&["corpus", "--only", "ust", "--format", "json-lines"]);
    let lines: Vec<Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 8);
    assert!(lines[..7].iter().all(|v| v["category"] == "ust" && v["pass"] == true));
    let o = nsa(&["corpus", "--only", "standard_number"]);
    assert!(stdout(&o).starts_with("PASS ust standard_number\n1 passed"));
}

#[test]
fn perturbed_golden_is_reported() {
    let dir = scratch("perturbed");
    copy_tree(&fixtures(), &dir);
    let golden = dir.join("golden/uniform_continuity_approx.trace");
    let text = std::fs::read_to_string(&golden).unwrap().replacen("(inv k)", "(inv k')", 1);
    std::fs::write(&golden, text).unwrap();
    let o = nsa(&["corpus", "--in", dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("FAIL pipeline uniform_continuity_approx\n  line 3:"), "{}", out);
    assert!(out.ends_with("14 passed, 1 failed\n"));
}

#[test]
fn bless_then_compare() {
    let dir = scratch("bless");
    copy_tree(&fixtures(), &dir);
    std::fs::remove_dir_all(dir.join("golden")).unwrap();
    let d = dir.to_str().unwrap();
    assert_eq!(nsa(&["corpus", "--in", d]).status.code(), Some(1));
    assert_eq!(nsa(&["corpus", "--in", d, "--bless"]).status.code(), Some(0));
    assert_eq!(nsa(&["corpus", "--in", d]).status.code(), Some(0));
}

#[test]
fn results_go_to_out_file() {
    let dir = scratch("out");
    let out = dir.join("report.jsonl");
    let o = nsa(&["verify", "ivt", "--f", "x*x - 1/2", "--g", "2k", "--k", "100", "--format", "json-lines", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(std::fs::read_to_string(&out).unwrap().trim()).unwrap();
    assert_eq!(v["theorem_id"], "ivt");
}
