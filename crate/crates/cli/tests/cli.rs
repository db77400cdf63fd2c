//! Runs the `qborrow` binary and checks its exit codes and outputs.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const FOUR_TOFFOLIS: &str = "borrow q1; borrow q2; borrow a; borrow q4; borrow q5;
CCNOT[q1, q2, a];
CCNOT[a, q4, q5];
CCNOT[q1, q2, a];
CCNOT[a, q4, q5];
";

const THREE_TOFFOLIS: &str = "borrow q1; borrow q2; borrow a; borrow q4; borrow q5;
CCNOT[q1, q2, a];
CCNOT[a, q4, q5];
CCNOT[q1, q2, a];
";

fn qborrow(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qborrow"));
    cmd.args(args);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json on stdout")
}

fn gen(kind: &str, size: &str) -> String {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("gen.qbr");
    let o = qborrow(
        &["gen", kind, "--size", size, "-o", out.to_str().unwrap()],
        &[],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    std::fs::read_to_string(out).unwrap()
}

/// A stand-in solver: a shell script printing a fixed answer.
#[cfg(unix)]
fn fake_solver(dir: &Path, answer: &str) -> String {
    let script = write(dir, &format!("{answer}.sh"), &format!("echo {answer}\n"));
    format!("cmd:sh {}", script.display())
}

#[test]
fn safe_qubits_verify_safe() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "four.qbr", FOUR_TOFFOLIS);
    let o = qborrow(
        &[
            "verify",
            f.to_str().unwrap(),
            "--format",
            "json",
            "--oracle",
        ],
        &[],
    );
    assert_eq!(code(&o), 1, "q5 is the target and is not restored");
    let r = json(&o);
    let a = r["verdicts"]
        .as_array()
        .unwrap()
        .iter()
        .find(|v| v["qubit"] == "a")
        .unwrap();
    assert_eq!(a["status"], "safe");
    assert_eq!(r["oracle"]["status"], "agree");

    let adder = write(dir.path(), "adder.qbr", &gen("adder", "8"));
    let o = qborrow(&["verify", adder.to_str().unwrap(), "--oracle"], &[]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("summary: 7 safe, 0 unsafe, 0 unknown"));
    assert!(stdout(&o).contains("oracle: agree"));
}

#[test]
fn counterexample_exits_one_with_witness() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "three.qbr", THREE_TOFFOLIS);
    let o = qborrow(
        &[
            "verify",
            f.to_str().unwrap(),
            "--format",
            "json",
            "--oracle",
        ],
        &[],
    );
    assert_eq!(code(&o), 1);
    let r = json(&o);
    assert_eq!(r["oracle"]["status"], "agree");
    let names: Vec<&str> = r["qubit_names"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert_eq!(names, ["q1", "q2", "a", "q4", "q5"]);
    let a = &r["verdicts"][2];
    assert_eq!(a["qubit"], "a");
    assert_eq!(a["status"], "unsafe");
    assert_eq!(a["violated"], serde_json::json!(["cond2"]));
    let bits = a["witness"]["bits"].as_str().unwrap();
    assert_eq!(bits.len(), 5);
    assert_eq!(&bits[3..4], "1", "the q4 control must be set");

    let text = qborrow(&["verify", f.to_str().unwrap()], &[]);
    assert!(stdout(&text).contains("a unsafe: cond2 satisfiable, witness"));
}

#[test]
fn usage_and_input_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let dup = write(dir.path(), "dup.qbr", "borrow q[2];\nCNOT[q[0], q[0]];\n");
    let o = qborrow(&["verify", dup.to_str().unwrap()], &[]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).starts_with("error:"), "{}", stderr(&o));
    assert!(
        stderr(&o).contains("2:"),
        "location is reported: {}",
        stderr(&o)
    );

    let bad = write(dir.path(), "bad.qbr", "borrow q;\nCNOT[q;\n");
    let o = qborrow(&["verify", bad.to_str().unwrap()], &[]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("error"));

    let o = qborrow(
        &["verify", dir.path().join("missing.qbr").to_str().unwrap()],
        &[],
    );
    assert_eq!(code(&o), 2);

    assert_eq!(code(&qborrow(&["verify"], &[])), 2);
    assert_eq!(code(&qborrow(&["frobnicate"], &[])), 2);
    let o = qborrow(&["verify", bad.to_str().unwrap(), "--solver", "z9"], &[]);
    assert_eq!(code(&o), 2);
}

#[test]
fn exhausted_budget_exits_three() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "adder.qbr", &gen("adder", "6"));
    let o = qborrow(
        &["verify", f.to_str().unwrap(), "--budget-conflicts", "0"],
        &[],
    );
    assert_eq!(code(&o), 3, "{}", stdout(&o));
    assert!(stdout(&o).contains("unknown: "));
}

#[test]
fn report_file_matches_json_output() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "three.qbr", THREE_TOFFOLIS);
    let report = dir.path().join("out.json");
    let o = qborrow(
        &[
            "verify",
            f.to_str().unwrap(),
            "--format",
            "json",
            "--report",
            report.to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(code(&o), 1);
    let file: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let mut a = json(&o);
    let mut b = file;
    strip_timings(&mut a);
    strip_timings(&mut b);
    assert_eq!(a, b);
    assert_eq!(a["tool"], "qborrow");
    assert_eq!(a["program"], f.to_str().unwrap());
    for key in ["qubits", "verified_qubits", "gates", "toffolis"] {
        assert!(a[key].is_u64(), "{key}");
    }
}

fn strip_timings(v: &mut Value) {
    match v {
        Value::Object(m) => {
            m.retain(|k, _| !k.ends_with("_ms") && k != "conflicts");
            m.values_mut().for_each(strip_timings);
        }
        Value::Array(a) => a.iter_mut().for_each(strip_timings),
        _ => {}
    }
}

#[test]
fn reports_are_deterministic_apart_from_timings() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "adder.qbr", &gen("adder", "10"));
    let run = |jobs: &str| {
        let o = qborrow(
            &[
                "verify",
                f.to_str().unwrap(),
                "--format",
                "json",
                "--jobs",
                jobs,
            ],
            &[],
        );
        assert_eq!(code(&o), 0);
        let mut v = json(&o);
        strip_timings(&mut v);
        v["config"]["jobs"] = Value::Null;
        v
    };
    let first = run("1");
    assert_eq!(first, run("1"));
    assert_eq!(first, run("4"));
}

#[test]
fn emitted_files_are_named_by_qubit_and_condition() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "three.qbr", THREE_TOFFOLIS);
    let cnf = dir.path().join("cnf");
    let smt = dir.path().join("smt");
    let o = qborrow(
        &[
            "verify",
            f.to_str().unwrap(),
            "--emit-dimacs",
            cnf.to_str().unwrap(),
            "--emit-smtlib",
            smt.to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(code(&o), 1);
    let list = |d: &Path| {
        let mut names: Vec<String> = std::fs::read_dir(d)
            .unwrap()
            .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
            .collect();
        names.sort();
        names
    };
    let expected = |ext: &str| {
        let mut v: Vec<String> = ["q1", "q2", "a", "q4", "q5"]
            .iter()
            .flat_map(|q| ["cond1", "cond2"].map(|c| format!("three.{q}.{c}.{ext}")))
            .collect();
        v.sort();
        v
    };
    assert_eq!(list(&cnf), expected("cnf"));
    assert_eq!(list(&smt), expected("smt2"));
    let script = std::fs::read_to_string(smt.join("three.a.cond2.smt2")).unwrap();
    assert!(script.contains("(check-sat)"));
    let dimacs = std::fs::read_to_string(cnf.join("three.a.cond1.cnf")).unwrap();
    assert!(dimacs.lines().any(|l| l.starts_with("p cnf ")));
}

#[test]
fn environment_overrides_flags() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "three.qbr", THREE_TOFFOLIS);
    let o = qborrow(
        &["verify", f.to_str().unwrap()],
        &[("QBORROW_FORMAT", "json")],
    );
    assert_eq!(json(&o)["verdicts"][2]["status"], "unsafe");
    let o = qborrow(
        &["verify", f.to_str().unwrap(), "--format", "json"],
        &[("QBORROW_ORACLE", "true"), ("QBORROW_JOBS", "2")],
    );
    let r = json(&o);
    assert_eq!(r["config"]["oracle"], true);
    assert_eq!(r["config"]["jobs"], 2);
    assert_eq!(r["oracle"]["status"], "agree");
}

#[test]
fn gen_reproduces_the_templates() {
    assert_eq!(gen("adder", "50"), qborrow_core::benchmarks::ADDER);
    assert_eq!(gen("mcx", "1750"), qborrow_core::benchmarks::MCX);
    assert!(gen("adder", "9").contains("let n = 9;"));

    let dir = TempDir::new().unwrap();
    let out = dir.path().join("m.qbr");
    let o = qborrow(
        &["gen", "mcx", "--size", "5", "-o", out.to_str().unwrap()],
        &[],
    );
    assert_eq!(code(&o), 0);
    assert!(std::fs::read_to_string(&out)
        .unwrap()
        .contains("let m = 5;"));

    let o = out.to_str().unwrap();
    assert_eq!(
        code(&qborrow(&["gen", "adder", "--size", "1", "-o", o], &[])),
        2
    );
    assert_eq!(
        code(&qborrow(&["gen", "mcx", "--size", "-3", "-o", o], &[])),
        2
    );
    assert_eq!(
        code(&qborrow(&["gen", "toffoli", "--size", "4", "-o", o], &[])),
        2
    );
    assert_eq!(code(&qborrow(&["gen", "adder", "--size", "8"], &[])), 2);
}

#[test]
fn bench_reports_rows_per_size() {
    let o = qborrow(&["bench", "adder", "--sizes", ""], &[]);
    assert_eq!(code(&o), 0);

    let o = qborrow(&["bench", "mcx", "--sizes", "4,5", "--format", "json"], &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let t = json(&o);
    assert_eq!(t["kind"], "mcx");
    let rows = t["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["size"], 4);
    assert_eq!(rows[0]["toffolis"], 32);
    assert_eq!(rows[1]["toffolis"], 48);
    assert_eq!(rows[1]["safe"], 1);

    let o = qborrow(&["bench", "adder", "--sizes", "2"], &[]);
    assert_eq!(code(&o), 2);
}

#[cfg(unix)]
#[test]
fn external_solver_answers_drive_the_verdict() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "three.qbr", THREE_TOFFOLIS);
    let path = f.to_str().unwrap();

    let unsat = fake_solver(dir.path(), "unsat");
    let o = qborrow(&["verify", path, "--solver", &unsat], &[]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));

    let sat = fake_solver(dir.path(), "sat");
    let o = qborrow(&["verify", path, "--solver", &sat], &[]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("no witness from external solver"));

    let unknown = fake_solver(dir.path(), "unknown");
    let o = qborrow(&["verify", path, "--solver", &unknown], &[]);
    assert_eq!(code(&o), 3);

    // a solver that wrongly proves a safe is caught by the oracle
    let o = qborrow(&["verify", path, "--solver", &unsat, "--oracle"], &[]);
    assert_eq!(code(&o), 4);
    assert!(stderr(&o).contains("disagree"), "{}", stderr(&o));
}
