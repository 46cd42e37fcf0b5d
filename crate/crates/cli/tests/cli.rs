use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use logicbench::semantics::FiniteStructure;
use serde_json::Value;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_logicbench")).args(args).current_dir(root()).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn records(path: &Path) -> Vec<Value> {
    std::fs::read_to_string(path).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn shipped_proof_checks() {
    let o = run(&["check", "proofs/neggmp.prf"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("neggmp [FIM0+CS] ok"));
}

#[test]
fn corrupted_proof_is_rejected_at_its_line() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(root().join("proofs/negglem.prf")).unwrap();
    let target = logicbench::derivations::proof_lines(&text, "negglem.prf").unwrap()[3].clone();
    let bad = logicbench::derivations::corrupt_line(&text, "negglem.prf", target.src_line).unwrap();
    let path = dir.path().join("negglem.prf");
    std::fs::write(&path, bad).unwrap();
    let o = run(&["check", path.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let err = String::from_utf8_lossy(&o.stderr);
    // The failing line is either the corrupted one or a line citing it.
    let named = err.contains(&format!("negglem.prf:{}:", target.src_line))
        || err.contains(&format!("[related: {}]", target.label))
        || err.contains(&format!("[related: {}, ", target.label));
    assert!(named, "{err}");
}

#[test]
fn malformed_input_is_exit_2() {
    assert_eq!(code(&run(&["prove", "p &"])), 2);
    assert_eq!(code(&run(&["check", "no/such/file.prf"])), 2);
    assert_eq!(code(&run(&["squeeze", "configs/theories.toml"])), 2);
    assert_eq!(code(&run(&["prove", "p", "--budget-terms", "0"])), 2);
}

#[test]
fn non_theorem_has_a_countermodel_file() {
    let dir = tempfile::tempdir().unwrap();
    let cm = dir.path().join("cm.txt");
    let o = run(&["prove", "(ex x:obj. P(x)) -> all x:obj. P(x)", "--countermodel", cm.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let m = FiniteStructure::parse(&std::fs::read_to_string(&cm).unwrap()).unwrap();
    assert_eq!(m.size, 2);
    // Without parentheses the quantifier scopes over the implication: a valid formula.
    assert_eq!(code(&run(&["prove", "ex x:obj. P(x) -> all x:obj. P(x)"])), 0);
    assert_eq!(code(&run(&["prove", "((p -> q) -> p) -> p"])), 0);
}

#[test]
fn intuitionistic_verdicts() {
    let o = run(&["ipc", "p | ~p"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("worlds 2"));
    assert_eq!(code(&run(&["ipc", "p -> ~~p"])), 0);
}

#[test]
fn standard_and_henkin_evaluation() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.txt");
    std::fs::write(&m, "size 2\nrel P/1 = 0\n").unwrap();
    let fam = dir.path().join("family.txt");
    std::fs::write(&fam, "set 1 =\nset 1 = 1\n").unwrap();
    let phi = "ex X:pred1. all x. X(x) <-> P(x)";
    let std_run = run(&["eval", m.to_str().unwrap(), phi]);
    assert_eq!(stdout(&std_run).trim(), "true");
    let henkin = run(&["eval", m.to_str().unwrap(), phi, "--henkin", fam.to_str().unwrap()]);
    assert_eq!(stdout(&henkin).trim(), "false");
    let k = dir.path().join("k.txt");
    std::fs::write(&k, "worlds 2\nletters p\nle 0 1\nforce 1 p\n").unwrap();
    assert_eq!(stdout(&run(&["eval", "--kripke", k.to_str().unwrap(), "p | ~p"])).trim(), "false");
}

#[test]
fn squeeze_reports_append_with_provenance() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("runs.jsonl");
    let r = report.to_str().unwrap();
    for _ in 0..2 {
        let o = run(&["squeeze", "configs/prop2.toml", "--jobs", "2", "--report", r]);
        assert_eq!(code(&o), 0, "{}", stdout(&o));
        assert!(stdout(&o).contains("0 violations"));
    }
    let recs = records(&report);
    assert_eq!(recs.len(), 2);
    assert_eq!(recs[0]["config_hash"], recs[1]["config_hash"]);
    assert_eq!(recs[0]["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(recs[0]["report"]["full_squeeze"], true);
    // A control with violations is a logical rejection.
    assert_eq!(code(&run(&["squeeze", "configs/prop_ipc.toml"])), 1);
}

#[test]
fn finite_experiments() {
    let o = run(&["decided", "exactly-two", "three-distinct"]);
    assert_eq!(stdout(&o).trim(), "decided-false");
    let o = run(&["categorical", "linear-order", "--max-size", "3"]);
    assert!(stdout(&o).starts_with("not-categorical"));
    let o = run(&["enumerate", "E/2", "--iso", "--max-size", "3"]);
    assert_eq!(stdout(&o), "size 1: 2\nsize 2: 10\nsize 3: 104\n");
}

#[test]
fn interpretability_and_budget_exit() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    std::fs::write(&a, "size 3\nrel L/2 = (0,1) (0,2) (1,2)\n").unwrap();
    std::fs::write(&b, "size 3\n").unwrap();
    let (a, b) = (a.to_str().unwrap(), b.to_str().unwrap());
    let o = run(&["interp", a, b]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("Fund"));
    assert_eq!(code(&run(&["interp", a, a, "--budget-terms", "1"])), 3);
}

#[test]
fn catalog_runs() {
    let o = run(&["catalog", "--only", "negglem"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("negglem: accepted"));
}
