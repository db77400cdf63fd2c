use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use qborrow_core::boolform::{self, ExprId, ExprStore, DEFAULT_NODE_CAP};
use qborrow_core::circuit::{FlatCircuit, QubitId, QubitRole};
use qborrow_core::elaborator::{elaborate, ElabError};
use qborrow_core::frontend::{parse_program, FrontendError};
use qborrow_core::oracle::{self, BasisState, Safety, DEFAULT_EXHAUSTIVE_CAP};
use qborrow_core::satcore::{
    self, emit_dimacs, emit_smtlib, tseitin, SolveError, SolveResult, SolverConfig,
};

use crate::external;
use crate::report::{Config, OracleReport, Report, Witness};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolverChoice {
    Internal,
    /// A command line; the script path is appended as the last argument.
    External(String),
}

impl fmt::Display for SolverChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolverChoice::Internal => f.write_str("internal"),
            SolverChoice::External(cmd) => write!(f, "cmd:{cmd}"),
        }
    }
}

impl FromStr for SolverChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "internal" {
            return Ok(SolverChoice::Internal);
        }
        match s.strip_prefix("cmd:") {
            Some(cmd) if !cmd.trim().is_empty() => {
                Ok(SolverChoice::External(cmd.trim().to_string()))
            }
            _ => Err(format!(
                "invalid solver '{s}' (expected internal or cmd:<exe>)"
            )),
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub solver: SolverChoice,
    pub emit_dimacs: Option<PathBuf>,
    pub emit_smtlib: Option<PathBuf>,
    pub oracle: bool,
    /// Worker threads for per-condition queries; 0 picks the core count.
    pub jobs: usize,
    pub budget_conflicts: u64,
    pub budget_seconds: f64,
    pub node_cap: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            solver: SolverChoice::Internal,
            emit_dimacs: None,
            emit_smtlib: None,
            oracle: false,
            jobs: 0,
            budget_conflicts: 100_000_000,
            budget_seconds: 600.0,
            node_cap: DEFAULT_NODE_CAP,
        }
    }
}

impl VerifyOptions {
    fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            max_conflicts: self.budget_conflicts,
            max_time: Some(Duration::from_secs_f64(self.budget_seconds)),
            ..SolverConfig::default()
        }
    }
}

#[derive(Debug)]
pub enum VerifyError {
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    Frontend(FrontendError),
    Elaboration(ElabError),
    Pool(String),
}

impl fmt::Display for VerifyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerifyError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            VerifyError::Frontend(e) => write!(f, "{e}"),
            VerifyError::Elaboration(e) => write!(f, "{e}"),
            VerifyError::Pool(e) => write!(f, "cannot start worker threads: {e}"),
        }
    }
}

impl std::error::Error for VerifyError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Condition {
    /// Restoration of |0⟩: `b_q ∧ ¬q`.
    Cond1,
    /// Independence of every other qubit from `q`.
    Cond2,
}

impl Condition {
    pub fn as_str(self) -> &'static str {
        match self {
            Condition::Cond1 => "cond1",
            Condition::Cond2 => "cond2",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CondResult {
    Sat,
    Unsat,
    Unknown,
}

impl CondResult {
    pub fn as_str(self) -> &'static str {
        match self {
            CondResult::Sat => "sat",
            CondResult::Unsat => "unsat",
            CondResult::Unknown => "unknown",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionOutcome {
    pub condition: Condition,
    pub result: CondResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub dag_nodes: usize,
    pub cnf_vars: u32,
    pub cnf_clauses: usize,
    pub conflicts: u64,
    pub solve_ms: f64,
    #[serde(skip)]
    pub model: Option<BTreeMap<QubitId, bool>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Safe,
    Unsafe,
    Skipped,
    Unknown,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Safe => "safe",
            Status::Unsafe => "unsafe",
            Status::Skipped => "skipped",
            Status::Unknown => "unknown",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub qubit: String,
    #[serde(skip)]
    pub id: QubitId,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub violated: Vec<Condition>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub solve_ms: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub conditions: Vec<ConditionOutcome>,
}

fn millis(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

/// Reads and verifies the program at `path`.
pub fn verify_file(path: &Path, opts: &VerifyOptions) -> Result<Report, VerifyError> {
    let source = std::fs::read_to_string(path).map_err(|source| VerifyError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    verify_source(&source, path, opts)
}

struct Query {
    verdict: usize,
    qubit: QubitId,
    condition: Condition,
    expr: ExprId,
    smtlib_path: Option<PathBuf>,
}

/// Verifies program text; `path` names the program in the report and in
/// emitted file names.
pub fn verify_source(
    source: &str,
    path: &Path,
    opts: &VerifyOptions,
) -> Result<Report, VerifyError> {
    let started = Instant::now();
    let ast = parse_program(source).map_err(VerifyError::Frontend)?;
    let elab = elaborate(&ast).map_err(VerifyError::Elaboration)?;
    let circuit = &elab.circuit;
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "program".into());

    let mut verdicts: Vec<Verdict> = circuit
        .qubits
        .iter()
        .filter(|d| d.role.is_dirty())
        .map(|d| Verdict {
            qubit: d.name(),
            id: d.id,
            status: if d.role == QubitRole::BorrowSkip {
                Status::Skipped
            } else {
                Status::Unknown
            },
            witness: None,
            violated: Vec::new(),
            reason: None,
            solve_ms: 0.0,
            conditions: Vec::new(),
        })
        .collect();

    let mut store = ExprStore::with_cap(opts.node_cap);
    let mut queries = Vec::new();
    match boolform::track(&mut store, circuit) {
        Ok(state) => {
            for (i, v) in verdicts.iter().enumerate() {
                if v.status == Status::Skipped {
                    continue;
                }
                let c1 = boolform::cond_restore_zero(&mut store, v.id, &state);
                let c2 = boolform::cond_restore_plus(&mut store, v.id, &state);
                for (condition, expr) in [(Condition::Cond1, c1), (Condition::Cond2, c2)] {
                    queries.push(Query {
                        verdict: i,
                        qubit: v.id,
                        condition,
                        expr,
                        smtlib_path: None,
                    });
                }
            }
        }
        Err(e) => {
            for v in verdicts.iter_mut().filter(|v| v.status == Status::Unknown) {
                v.reason = Some(e.to_string());
            }
        }
    }

    emit_files(&store, circuit, &stem, &mut queries, opts)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .map_err(|e| VerifyError::Pool(e.to_string()))?;
    let config = opts.solver_config();
    let outcomes: Vec<ConditionOutcome> = pool.install(|| {
        queries
            .par_iter()
            .map(|q| run_query(&store, circuit, &stem, q, &config, opts))
            .collect()
    });

    for (q, outcome) in queries.iter().zip(outcomes) {
        verdicts[q.verdict].conditions.push(outcome);
    }
    for v in verdicts.iter_mut().filter(|v| v.status != Status::Skipped) {
        settle(v, circuit.num_qubits());
    }

    let oracle = opts.oracle.then(|| cross_check(circuit, &verdicts));
    let solve_ms = verdicts.iter().map(|v| v.solve_ms).sum();
    Ok(Report {
        tool: "qborrow".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        program: path.display().to_string(),
        qubits: circuit.num_qubits(),
        verified_qubits: verdicts
            .iter()
            .filter(|v| v.status != Status::Skipped)
            .count(),
        skipped_qubits: verdicts
            .iter()
            .filter(|v| v.status == Status::Skipped)
            .count(),
        clean_qubits: circuit
            .qubits
            .iter()
            .filter(|d| d.role == QubitRole::Clean)
            .count(),
        qubit_names: circuit.qubits.iter().map(|d| d.name()).collect(),
        gates: circuit.gates.len(),
        toffolis: circuit.toffoli_count(),
        warnings: elab
            .warnings
            .iter()
            .map(|w| format!("{}: {}", w.at, w.message))
            .collect(),
        config: Config {
            solver: opts.solver.to_string(),
            jobs: opts.jobs,
            budget_conflicts: opts.budget_conflicts,
            budget_seconds: opts.budget_seconds,
            oracle: opts.oracle,
            emit_dimacs: opts.emit_dimacs.as_ref().map(|p| p.display().to_string()),
            emit_smtlib: opts.emit_smtlib.as_ref().map(|p| p.display().to_string()),
        },
        verdicts,
        oracle,
        solve_ms,
        wall_ms: millis(started.elapsed()),
    })
}

fn file_name(stem: &str, circuit: &FlatCircuit, q: &Query, ext: &str) -> String {
    format!(
        "{stem}.{}.{}.{ext}",
        circuit.qubit_name(q.qubit),
        q.condition.as_str()
    )
}

fn emit_files(
    store: &ExprStore,
    circuit: &FlatCircuit,
    stem: &str,
    queries: &mut [Query],
    opts: &VerifyOptions,
) -> Result<(), VerifyError> {
    let name = |q: QubitId| circuit.qubit_name(q);
    let write = |dir: &Path, file: String, text: String| -> Result<PathBuf, VerifyError> {
        let path = dir.join(file);
        std::fs::create_dir_all(dir)
            .and_then(|_| std::fs::write(&path, text))
            .map_err(|source| VerifyError::Io {
                path: path.clone(),
                source,
            })?;
        Ok(path)
    };
    for q in queries.iter_mut() {
        if let Some(dir) = &opts.emit_smtlib {
            let path = write(
                dir,
                file_name(stem, circuit, q, "smt2"),
                emit_smtlib(store, q.expr, &name),
            )?;
            q.smtlib_path = Some(path);
        }
        if let Some(dir) = &opts.emit_dimacs {
            let (cnf, root) = tseitin(store, q.expr);
            write(
                dir,
                file_name(stem, circuit, q, "cnf"),
                emit_dimacs(&cnf, root, &name),
            )?;
        }
    }
    Ok(())
}

fn run_query(
    store: &ExprStore,
    circuit: &FlatCircuit,
    stem: &str,
    q: &Query,
    config: &SolverConfig,
    opts: &VerifyOptions,
) -> ConditionOutcome {
    let mut outcome = ConditionOutcome {
        condition: q.condition,
        result: CondResult::Unknown,
        reason: None,
        dag_nodes: store.dag_size(q.expr),
        cnf_vars: 0,
        cnf_clauses: 0,
        conflicts: 0,
        solve_ms: 0.0,
        model: None,
    };
    match &opts.solver {
        SolverChoice::Internal => {
            match satcore::decide(store, q.expr, config, satcore::DEFAULT_CLAUSE_CAP) {
                Ok(d) => {
                    outcome.cnf_vars = d.cnf_vars;
                    outcome.cnf_clauses = d.cnf_clauses;
                    outcome.conflicts = d.solver.conflicts;
                    outcome.solve_ms = millis(d.solve_time);
                    match d.result {
                        SolveResult::Unsat => outcome.result = CondResult::Unsat,
                        SolveResult::Sat(model) => {
                            outcome.result = CondResult::Sat;
                            outcome.model = Some(model);
                        }
                    }
                }
                Err(e) => {
                    if let SolveError::ResourceLimit { conflicts, elapsed } = &e {
                        outcome.conflicts = *conflicts;
                        outcome.solve_ms = millis(*elapsed);
                    }
                    outcome.reason = Some(e.to_string());
                }
            }
        }
        SolverChoice::External(cmd) => {
            let name = |x: QubitId| circuit.qubit_name(x);
            let script = emit_smtlib(store, q.expr, &name);
            let path = match &q.smtlib_path {
                Some(p) => p.clone(),
                None => std::env::temp_dir().join(format!(
                    "qborrow-{}-{}",
                    std::process::id(),
                    file_name(stem, circuit, q, "smt2")
                )),
            };
            let temporary = q.smtlib_path.is_none();
            let run = std::fs::write(&path, script)
                .map_err(|e| format!("{}: {e}", path.display()))
                .and_then(|_| {
                    external::run(cmd, &path, Duration::from_secs_f64(opts.budget_seconds))
                });
            if temporary {
                let _ = std::fs::remove_file(&path);
            }
            match run {
                Ok((answer, elapsed)) => {
                    outcome.solve_ms = millis(elapsed);
                    match answer {
                        external::Answer::Sat => outcome.result = CondResult::Sat,
                        external::Answer::Unsat => outcome.result = CondResult::Unsat,
                        external::Answer::Other(text) => outcome.reason = Some(text),
                    }
                }
                Err(e) => outcome.reason = Some(e),
            }
        }
    }
    outcome
}

/// Combines the two condition outcomes into the qubit's verdict.
fn settle(v: &mut Verdict, num_qubits: usize) {
    v.solve_ms = v.conditions.iter().map(|c| c.solve_ms).sum();
    v.violated = v
        .conditions
        .iter()
        .filter(|c| c.result == CondResult::Sat)
        .map(|c| c.condition)
        .collect();
    if !v.violated.is_empty() {
        v.status = Status::Unsafe;
        v.witness = v
            .conditions
            .iter()
            .find_map(|c| c.model.as_ref())
            .map(|model| {
                let mut x = BasisState::zeros(num_qubits);
                for (q, &b) in model {
                    x.0[q.index()] = b;
                }
                Witness::from_state(x)
            });
    } else if v.conditions.len() == 2 && v.conditions.iter().all(|c| c.result == CondResult::Unsat)
    {
        v.status = Status::Safe;
    } else {
        v.status = Status::Unknown;
        if v.reason.is_none() {
            v.reason = v.conditions.iter().find_map(|c| c.reason.clone());
        }
    }
}

fn cross_check(circuit: &FlatCircuit, verdicts: &[Verdict]) -> OracleReport {
    let n = circuit.num_qubits();
    if n > DEFAULT_EXHAUSTIVE_CAP {
        return OracleReport::too_large(n, DEFAULT_EXHAUSTIVE_CAP);
    }
    let mut report = OracleReport::default();
    for v in verdicts
        .iter()
        .filter(|v| matches!(v.status, Status::Safe | Status::Unsafe))
    {
        let truth = oracle::exhaustive_safe(circuit, v.id).expect("qubit count checked above");
        report.checked += 1;
        if truth.is_safe() != (v.status == Status::Safe) {
            report.disagreements.push(format!(
                "{}: solver says {}, enumeration says {}",
                v.qubit,
                v.status.as_str(),
                if truth.is_safe() { "safe" } else { "unsafe" }
            ));
        }
        if let (Some(w), Safety::Unsafe(_)) = (&v.witness, &truth) {
            let x = w.to_state();
            if !oracle::violates(circuit, v.id, &x) {
                report.disagreements.push(format!(
                    "{}: witness {} does not reproduce the violation",
                    v.qubit, w.bits
                ));
            }
        }
    }
    report.status = if report.disagreements.is_empty() {
        "agree"
    } else {
        "disagree"
    }
    .into();
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solver_choice_parsing() {
        assert_eq!("internal".parse(), Ok(SolverChoice::Internal));
        assert_eq!("cmd:z3".parse(), Ok(SolverChoice::External("z3".into())));
        assert!("cmd:".parse::<SolverChoice>().is_err());
        assert!("minisat".parse::<SolverChoice>().is_err());
        assert_eq!(
            SolverChoice::External("z3 -smt2".into()).to_string(),
            "cmd:z3 -smt2"
        );
    }

    fn run(src: &str) -> Report {
        let opts = VerifyOptions {
            oracle: true,
            ..VerifyOptions::default()
        };
        verify_source(src, Path::new("t.qbr"), &opts).unwrap()
    }

    #[test]
    fn flip_is_unsafe_via_cond1() {
        let r = run("borrow a; X[a];");
        let v = &r.verdicts[0];
        assert_eq!(v.status, Status::Unsafe);
        assert_eq!(v.violated, vec![Condition::Cond1]);
        assert_eq!(v.witness.as_ref().unwrap().bits, "0");
        assert_eq!(r.warnings.len(), 1);
        assert_eq!(r.oracle.as_ref().unwrap().status, "agree");
    }

    #[test]
    fn untouched_qubit_is_safe_and_skip_is_skipped() {
        let r = run("borrow a; borrow@ t; alloc c; CNOT[t, c]; release a;");
        let statuses: Vec<_> = r
            .verdicts
            .iter()
            .map(|v| (v.qubit.as_str(), v.status))
            .collect();
        assert_eq!(statuses, vec![("a", Status::Safe), ("t", Status::Skipped)]);
        assert_eq!(r.clean_qubits, 1);
    }

    #[test]
    fn conflict_budget_gives_unknown() {
        let src = crate::gen::generate(crate::gen::BenchKind::Adder, 6).unwrap();
        let opts = VerifyOptions {
            budget_conflicts: 0,
            ..VerifyOptions::default()
        };
        let r = verify_source(&src, Path::new("adder.qbr"), &opts).unwrap();
        let conds: Vec<_> = r.verdicts.iter().flat_map(|v| &v.conditions).collect();
        assert!(conds
            .iter()
            .all(|c| c.result == CondResult::Unknown || c.conflicts == 0));
        let unknown: Vec<_> = r
            .verdicts
            .iter()
            .filter(|v| v.status == Status::Unknown)
            .collect();
        assert!(!unknown.is_empty());
        assert!(unknown
            .iter()
            .all(|v| v.reason.as_deref().unwrap().contains("budget")));
        assert_eq!(r.exit_code(), 3);
    }

    #[test]
    fn node_cap_gives_unknown() {
        let opts = VerifyOptions {
            node_cap: 4,
            ..VerifyOptions::default()
        };
        let src = "borrow q[3]; CCNOT[q[1], q[2], q[3]]; CCNOT[q[3], q[2], q[1]];";
        let r = verify_source(src, Path::new("t.qbr"), &opts).unwrap();
        assert!(r
            .verdicts
            .iter()
            .all(|v| v.status == Status::Unknown && v.reason.is_some()));
        assert_eq!(r.exit_code(), 3);
    }
}
