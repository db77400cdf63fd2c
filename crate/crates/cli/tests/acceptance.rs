//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line per
//! criterion and exits non-zero if any fails.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qborrow_cli::verify::CondResult;
use qborrow_cli::{
    generate, verify_source, BenchKind, Report, SolverChoice, Status, VerifyOptions,
};
use qborrow_core::boolform::{self, ExprId, ExprStore};
use qborrow_core::circuit::{FlatCircuit, Gate, QubitId};
use qborrow_core::elaborator::{elaborate, idle, ExtStmt};
use qborrow_core::frontend::parse_program;
use qborrow_core::oracle::{self, states, ClassicalMap, Safety};
use qborrow_core::satcore::{self, SolveResult, SolverConfig};

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

const A: QubitId = QubitId(2);

type Check = fn() -> Result<String, String>;

fn main() {
    let criteria: [(&str, Duration, Check); 10] = [
        (
            "four-Toffoli construction is safe for a",
            secs(1.0),
            four_toffolis,
        ),
        ("three-Toffoli counterexample", secs(1.0), three_toffolis),
        ("formula table row by row", secs(1.0), formula_table),
        (
            "SAT verdicts match enumeration",
            secs(60.0),
            sat_vs_enumeration,
        ),
        ("quantum refinements agree", secs(300.0), refinements),
        ("adder benchmark", secs(300.0), adder),
        ("MCX benchmark", secs(60.0), mcx),
        ("idle() conformance", secs(1.0), idle_table),
        ("SAT core soundness", secs(30.0), sat_core),
        (
            "emitter fidelity with an external solver",
            secs(600.0),
            emitter_fidelity,
        ),
    ];
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|p| Err(panic_message(&*p)))
            .and_then(|detail| {
                let t = started.elapsed();
                if t <= *limit {
                    Ok(detail)
                } else {
                    Err(format!("took {t:.2?}, limit {limit:?}"))
                }
            });
        let t = started.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS {name} ({t:.2?}): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name} ({t:.2?}): {why}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

fn secs(s: f64) -> Duration {
    Duration::from_secs_f64(s)
}

fn panic_message(p: &(dyn std::any::Any + Send)) -> String {
    p.downcast_ref::<String>()
        .cloned()
        .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
        .unwrap_or_else(|| "panicked".into())
}

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn circuit(src: &str) -> FlatCircuit {
    elaborate(&parse_program(src).unwrap()).unwrap().circuit
}

fn run(source: &str, name: &str, opts: &VerifyOptions) -> Report {
    verify_source(source, Path::new(name), opts).expect("program verifies")
}

fn verdict<'a>(r: &'a Report, qubit: &str) -> &'a qborrow_cli::verify::Verdict {
    r.verdicts
        .iter()
        .find(|v| v.qubit == qubit)
        .expect("verdict present")
}

/// Both conditions decided by the internal solver; true means safe.
fn sat_safe(c: &FlatCircuit, q: QubitId) -> bool {
    let mut s = ExprStore::new();
    let st = boolform::track(&mut s, c).unwrap();
    let conds = [
        boolform::cond_restore_zero(&mut s, q, &st),
        boolform::cond_restore_plus(&mut s, q, &st),
    ];
    let cfg = SolverConfig::default();
    conds.iter().all(|&e| {
        let d = satcore::decide(&s, e, &cfg, satcore::DEFAULT_CLAUSE_CAP).unwrap();
        if let SolveResult::Sat(m) = &d.result {
            let x = oracle::BasisState(
                (0..c.qubits.len() as u32)
                    .map(|i| m.get(&QubitId(i)).copied().unwrap_or(false))
                    .collect(),
            );
            assert!(oracle::violates(c, q, &x), "model does not violate safety");
        }
        d.result == SolveResult::Unsat
    })
}

fn four_toffolis() -> Result<String, String> {
    let r = run(FOUR_TOFFOLIS, "four.qbr", &VerifyOptions::default());
    ensure!(verdict(&r, "a").status == Status::Safe, "a is not Safe");
    let c = circuit(FOUR_TOFFOLIS);
    ensure!(
        oracle::exhaustive_safe(&c, A) == Ok(Safety::Safe),
        "oracle rejects a"
    );
    // U = I_a ⊗ V: a passes through and the rest ignores a
    let map = ClassicalMap::new(&c).unwrap();
    let bit = 1u64 << A.0;
    for x in 0..32u64 {
        let y = map.apply(x);
        ensure!(y & bit == x & bit, "a changed on input {x:05b}");
        ensure!(
            map.apply(x ^ bit) == y ^ bit,
            "rest depends on a at {x:05b}"
        );
    }
    Ok("a Safe, U = I_a ⊗ V over 32 inputs".into())
}

fn three_toffolis() -> Result<String, String> {
    let c = circuit(THREE_TOFFOLIS);
    let mut s = ExprStore::new();
    let st = boolform::track(&mut s, &c).unwrap();
    let c1 = boolform::cond_restore_zero(&mut s, A, &st);
    let c2 = boolform::cond_restore_plus(&mut s, A, &st);
    let cfg = SolverConfig::default();
    let d1 = satcore::decide(&s, c1, &cfg, satcore::DEFAULT_CLAUSE_CAP).unwrap();
    ensure!(d1.result == SolveResult::Unsat, "cond1 is satisfiable");
    let d2 = satcore::decide(&s, c2, &cfg, satcore::DEFAULT_CLAUSE_CAP).unwrap();
    let SolveResult::Sat(_) = d2.result else {
        return Err("cond2 is unsatisfiable".into());
    };

    let r = run(THREE_TOFFOLIS, "three.qbr", &VerifyOptions::default());
    let v = verdict(&r, "a");
    ensure!(v.status == Status::Unsafe, "a is not Unsafe");
    let w = v.witness.as_ref().ok_or("no witness")?;
    ensure!(
        oracle::violates(&c, A, &w.to_state()),
        "witness {} does not violate",
        w.bits
    );
    ensure!(
        oracle::check_state_restoration(&c, A, states::zero()).unwrap(),
        "|0⟩ not restored"
    );
    ensure!(
        !oracle::check_state_restoration(&c, A, states::plus()).unwrap(),
        "|+⟩ restored"
    );
    Ok(format!("cond1 UNSAT, cond2 SAT, witness {}", w.bits))
}

fn formula_table() -> Result<String, String> {
    let c = circuit(FOUR_TOFFOLIS);
    let (q1, q2, a, q4, q5) = (QubitId(0), QubitId(1), A, QubitId(3), QubitId(4));
    type Row = fn(&dyn Fn(QubitId) -> bool, [QubitId; 5]) -> [bool; 5];
    // expected b-formulas after each gate
    let rows: [Row; 4] = [
        |v, [q1, q2, a, q4, q5]| [v(q1), v(q2), v(a) ^ (v(q1) & v(q2)), v(q4), v(q5)],
        |v, [q1, q2, a, q4, q5]| {
            let ba = v(a) ^ (v(q1) & v(q2));
            [v(q1), v(q2), ba, v(q4), v(q5) ^ (ba & v(q4))]
        },
        |v, [q1, q2, a, q4, q5]| {
            let ba = v(a) ^ (v(q1) & v(q2));
            [v(q1), v(q2), v(a), v(q4), v(q5) ^ (ba & v(q4))]
        },
        |v, [q1, q2, a, q4, q5]| {
            let ba = v(a) ^ (v(q1) & v(q2));
            [
                v(q1),
                v(q2),
                v(a),
                v(q4),
                v(q5) ^ (ba & v(q4)) ^ (v(a) & v(q4)),
            ]
        },
    ];
    let order = [q1, q2, a, q4, q5];
    let mut s = ExprStore::new();
    let mut st = boolform::init_state(&mut s, &c);
    for (g, row) in c.gates.iter().zip(rows) {
        boolform::apply_gate(&mut s, &mut st, g);
        for bits in 0..32u32 {
            let v = |q: QubitId| bits >> q.0 & 1 == 1;
            let want = row(&v, order);
            for (q, w) in order.iter().zip(want) {
                ensure!(
                    s.eval(st.get(*q), v) == w,
                    "b_{} differs at {bits:05b}",
                    q.0
                );
            }
        }
    }
    let mut st3 = boolform::init_state(&mut s, &c);
    for g in &c.gates[..3] {
        boolform::apply_gate(&mut s, &mut st3, g);
    }
    let var_a = s.var(a);
    ensure!(
        st3.get(a) == var_a,
        "b_a is not simplified to a after the third gate"
    );
    Ok("4 rows over 32 assignments, b_a = a after gate 3".into())
}

/// Random X/CNOT/CCNOT circuits. Every other circuit is built as
/// `G; M; G⁻¹` so that safe qubits are common.
fn corpus() -> Vec<FlatCircuit> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut out = Vec::new();
    for i in 0..240 {
        let n = rng.gen_range(1..=8usize);
        let random_gate = |rng: &mut ChaCha8Rng| {
            let mut qs: Vec<u32> = (0..n as u32).collect();
            for k in 0..qs.len() {
                let j = rng.gen_range(k..qs.len());
                qs.swap(k, j);
            }
            let q = |k: usize| QubitId(qs[k]);
            match rng.gen_range(0..3usize.min(n)) {
                0 => Gate::x(q(0)),
                1 => Gate::cnot(q(0), q(1)),
                _ => Gate::toffoli(q(0), q(1), q(2)),
            }
        };
        let mut c = FlatCircuit::with_qubits(n);
        if i % 2 == 0 {
            for _ in 0..rng.gen_range(0..=40) {
                c.push(random_gate(&mut rng));
            }
        } else {
            let g: Vec<Gate> = (0..rng.gen_range(0..=16))
                .map(|_| random_gate(&mut rng))
                .collect();
            let m: Vec<Gate> = (0..rng.gen_range(0..=8))
                .map(|_| random_gate(&mut rng))
                .collect();
            for gate in g.iter().chain(&m).chain(g.iter().rev()) {
                c.push(gate.clone());
            }
        }
        assert!(c.gates.len() <= 40);
        out.push(c);
    }
    out
}

fn sat_vs_enumeration() -> Result<String, String> {
    let (mut safe, mut total) = (0, 0);
    for (i, c) in corpus().iter().enumerate() {
        for q in (0..c.qubits.len() as u32).map(QubitId) {
            let truth = oracle::exhaustive_safe(c, q).unwrap().is_safe();
            ensure!(
                sat_safe(c, q) == truth,
                "circuit {i} qubit {}: SAT says {}",
                q.0,
                !truth
            );
            safe += truth as usize;
            total += 1;
        }
    }
    Ok(format!(
        "240 circuits, {total} qubits, {safe} safe, 100% agreement"
    ))
}

fn refinements() -> Result<String, String> {
    let mut total = 0;
    for (i, c) in corpus().iter().enumerate() {
        for q in (0..c.qubits.len() as u32).map(QubitId) {
            let truth = oracle::exhaustive_safe(c, q).unwrap().is_safe();
            let restores = |phi| oracle::check_state_restoration(c, q, phi).unwrap();
            let two = restores(states::zero()) && restores(states::plus());
            let five = states::five().into_iter().all(restores);
            let bell = oracle::check_bell_preservation(c, q).unwrap();
            ensure!(
                two == truth && five == truth && bell == truth,
                "circuit {i} qubit {}: exhaustive {truth}, two {two}, five {five}, bell {bell}",
                q.0
            );
            total += 1;
        }
    }
    Ok(format!("{total} qubits, four characterisations agree"))
}

fn adder() -> Result<String, String> {
    let mut parts = Vec::new();
    for n in [8i64, 16, 32] {
        let opts = VerifyOptions {
            oracle: n == 8,
            ..VerifyOptions::default()
        };
        let started = Instant::now();
        let r = run(&generate(BenchKind::Adder, n).unwrap(), "adder.qbr", &opts);
        ensure!(
            r.verified_qubits == n as usize - 1,
            "n={n}: {} verified",
            r.verified_qubits
        );
        ensure!(
            r.count(Status::Safe) == n as usize - 1,
            "n={n}: not all Safe"
        );
        if n == 8 {
            let o = r.oracle.as_ref().ok_or("no oracle report")?;
            ensure!(o.status == "agree", "n=8 oracle {}", o.status);
        }
        parts.push(format!("n={n} {:.2?}", started.elapsed()));
    }
    Ok(format!("all dirty qubits Safe; {}", parts.join(", ")))
}

fn mcx() -> Result<String, String> {
    let mut parts = Vec::new();
    for m in [4i64, 8, 16, 50] {
        let started = Instant::now();
        let r = run(
            &generate(BenchKind::Mcx, m).unwrap(),
            "mcx.qbr",
            &VerifyOptions::default(),
        );
        let want = 16 * (m as usize - 2);
        ensure!(
            r.gates == want && r.toffolis == want,
            "m={m}: {} gates",
            r.gates
        );
        ensure!(
            verdict(&r, "anc").status == Status::Safe,
            "m={m}: anc not Safe"
        );
        parts.push(format!("m={m} {} gates {:.2?}", r.gates, started.elapsed()));
    }
    Ok(parts.join(", "))
}

fn idle_table() -> Result<String, String> {
    let q = QubitId;
    let set = |ids: &[u32]| ids.iter().map(|&i| q(i)).collect::<BTreeSet<_>>();
    let u = set(&[1, 2, 3, 4, 5]);
    let t = |x, y, z| ExtStmt::Unitary(vec![q(x), q(y), q(z)]);
    let (a1, a2) = (100, 101);
    let s2 = ExtStmt::seq([t(4, 5, 2), t(a2, 2, 1), t(4, 5, 2), t(a2, 2, 1)]);
    let s1 = ExtStmt::seq([
        t(1, 2, a1),
        t(a1, 4, 5),
        t(1, 2, a1),
        t(a1, 4, 5),
        ExtStmt::BorrowBlock(q(a2), Box::new(s2.clone())),
    ]);
    let b = Box::new;
    let cases: Vec<(&str, ExtStmt, BTreeSet<QubitId>)> = vec![
        ("skip", ExtStmt::Skip, u.clone()),
        ("init", ExtStmt::Init(q(3)), set(&[1, 2, 4, 5])),
        (
            "unitary",
            ExtStmt::Unitary(vec![q(1), q(5)]),
            set(&[2, 3, 4]),
        ),
        (
            "seq",
            ExtStmt::seq([ExtStmt::Init(q(1)), ExtStmt::Unitary(vec![q(2)])]),
            set(&[3, 4, 5]),
        ),
        (
            "if-measure removes measured and branch qubits",
            ExtStmt::IfMeasure(
                vec![q(1)],
                b(ExtStmt::Init(q(2))),
                b(ExtStmt::Unitary(vec![q(3)])),
            ),
            set(&[4, 5]),
        ),
        (
            "if-measure with skip branches",
            ExtStmt::IfMeasure(vec![q(4)], b(ExtStmt::Skip), b(ExtStmt::Skip)),
            set(&[1, 2, 3, 5]),
        ),
        (
            "while-measure",
            ExtStmt::WhileMeasure(vec![q(2)], b(t(1, 3, 5))),
            set(&[4]),
        ),
        (
            "while inside if",
            ExtStmt::IfMeasure(
                vec![q(5)],
                b(ExtStmt::WhileMeasure(vec![q(1)], b(ExtStmt::Skip))),
                b(ExtStmt::Skip),
            ),
            set(&[2, 3, 4]),
        ),
        (
            "borrow body",
            ExtStmt::BorrowBlock(q(a1), b(t(1, 2, a1))),
            set(&[3, 4, 5]),
        ),
        ("nested borrow S2", s2, set(&[3])),
        ("nested borrow S1", s1, set(&[3])),
    ];
    let n = cases.len();
    for (name, s, want) in cases {
        let got = idle(&s, &u);
        ensure!(got == want, "{name}: got {got:?}, want {want:?}");
    }
    Ok(format!("{n} cases"))
}

/// Random expression over the first `vars` qubits.
fn random_expr(s: &mut ExprStore, rng: &mut ChaCha8Rng, vars: u32, depth: u32) -> ExprId {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..12) {
            0 => s.constant(rng.gen_bool(0.5)),
            _ => s.var(QubitId(rng.gen_range(0..vars))),
        };
    }
    let k = rng.gen_range(1..=3);
    let kids: Vec<ExprId> = (0..k)
        .map(|_| random_expr(s, rng, vars, depth - 1))
        .collect();
    match rng.gen_range(0..3) {
        0 => s.not(kids[0]),
        1 => s.and(kids),
        _ => s.xor(kids),
    }
}

fn sat_core() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let cfg = SolverConfig::default();
    let mut sat = 0;
    for i in 0..1000 {
        let vars = rng.gen_range(1..=12);
        let mut s = ExprStore::new();
        let e = random_expr(&mut s, &mut rng, vars, 6);
        let truth = (0..1u32 << vars).any(|bits| s.eval(e, |q| bits >> q.0 & 1 == 1));
        let d = satcore::decide(&s, e, &cfg, satcore::DEFAULT_CLAUSE_CAP)
            .map_err(|err| format!("expression {i}: {err}"))?;
        match d.result {
            SolveResult::Sat(m) => {
                ensure!(truth, "expression {i}: solver says SAT, table says UNSAT");
                ensure!(
                    s.eval(e, |q| m.get(&q).copied().unwrap_or(false)),
                    "expression {i}: model does not satisfy"
                );
                sat += 1;
            }
            SolveResult::Unsat => ensure!(!truth, "expression {i}: solver says UNSAT"),
        }
    }
    Ok(format!("1000 expressions, {sat} satisfiable"))
}

fn find_solver() -> Option<String> {
    let path = std::env::var_os("PATH")?;
    ["z3", "cvc5", "bitwuzla"].into_iter().find_map(|exe| {
        std::env::split_paths(&path)
            .any(|d| d.join(exe).is_file())
            .then(|| exe.to_string())
    })
}

fn emitter_fidelity() -> Result<String, String> {
    let Some(exe) = find_solver() else {
        eprintln!("warning: no z3, cvc5 or bitwuzla on PATH; external comparison skipped");
        return Ok("skipped, no external solver installed".into());
    };
    let programs = [
        ("four.qbr", FOUR_TOFFOLIS.to_string()),
        ("three.qbr", THREE_TOFFOLIS.to_string()),
        ("adder.qbr", generate(BenchKind::Adder, 8).unwrap()),
    ];
    let external = VerifyOptions {
        solver: SolverChoice::External(exe.clone()),
        ..VerifyOptions::default()
    };
    let mut queries = 0;
    for (name, src) in &programs {
        let ours = run(src, name, &VerifyOptions::default());
        let theirs = run(src, name, &external);
        for (a, b) in ours.verdicts.iter().zip(&theirs.verdicts) {
            ensure!(
                a.status == b.status,
                "{name} {}: {:?} vs {exe} {:?}",
                a.qubit,
                a.status,
                b.status
            );
            for (x, y) in a.conditions.iter().zip(&b.conditions) {
                ensure!(
                    x.result == y.result && y.result != CondResult::Unknown,
                    "{name} {} {}: internal {} vs {exe} {}",
                    a.qubit,
                    x.condition.as_str(),
                    x.result.as_str(),
                    y.result.as_str()
                );
                queries += 1;
            }
        }
    }
    Ok(format!("{queries} queries agree with {exe}"))
}
