use std::fmt::Write as _;

use serde::Serialize;

use qborrow_core::oracle::BasisState;

use crate::verify::{Status, Verdict};

/// Process exit codes.
pub mod exit {
    pub const SAFE: i32 = 0;
    pub const UNSAFE: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const UNKNOWN: i32 = 3;
    pub const ORACLE_DISAGREES: i32 = 4;
}

/// A full input assignment, qubit 0 first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub bits: String,
}

impl Witness {
    pub fn from_state(x: BasisState) -> Self {
        Witness {
            bits: x.to_string(),
        }
    }

    pub fn to_state(&self) -> BasisState {
        BasisState(self.bits.chars().map(|c| c == '1').collect())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Config {
    pub solver: String,
    pub jobs: usize,
    pub budget_conflicts: u64,
    pub budget_seconds: f64,
    pub oracle: bool,
    pub emit_dimacs: Option<String>,
    pub emit_smtlib: Option<String>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct OracleReport {
    /// `agree`, `disagree` or `skipped`.
    pub status: String,
    pub checked: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub disagreements: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl OracleReport {
    pub fn too_large(qubits: usize, cap: usize) -> Self {
        OracleReport {
            status: "skipped".into(),
            reason: Some(format!(
                "{qubits} qubits exceeds the enumeration cap of {cap}"
            )),
            ..OracleReport::default()
        }
    }
}

/// Result of verifying one program. Apart from `solve_ms`/`wall_ms` and the
/// per-condition timings, identical inputs give identical reports.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub program: String,
    /// Every declared qubit, clean ones included.
    pub qubits: usize,
    pub verified_qubits: usize,
    pub skipped_qubits: usize,
    pub clean_qubits: usize,
    /// All qubit names by global id; witness bits follow this order.
    pub qubit_names: Vec<String>,
    pub gates: usize,
    pub toffolis: usize,
    pub warnings: Vec<String>,
    pub config: Config,
    /// One entry per dirty qubit, in declaration order.
    pub verdicts: Vec<Verdict>,
    pub oracle: Option<OracleReport>,
    pub solve_ms: f64,
    pub wall_ms: f64,
}

impl Report {
    pub fn count(&self, status: Status) -> usize {
        self.verdicts.iter().filter(|v| v.status == status).count()
    }

    pub fn all_safe(&self) -> bool {
        self.verdicts
            .iter()
            .all(|v| matches!(v.status, Status::Safe | Status::Skipped))
    }

    /// 4 on oracle disagreement, else 1 if any qubit is unsafe, else 3 if any
    /// is unknown, else 0.
    pub fn exit_code(&self) -> i32 {
        if self.oracle.as_ref().is_some_and(|o| o.status == "disagree") {
            exit::ORACLE_DISAGREES
        } else {
            verdict_exit_code(self.verdicts.iter().map(|v| v.status))
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "program {}: {} qubits ({} verified, {} skipped, {} clean), {} gates ({} Toffoli)",
            self.program,
            self.qubits,
            self.verified_qubits,
            self.skipped_qubits,
            self.clean_qubits,
            self.gates,
            self.toffolis
        );
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        let rows: Vec<[String; 7]> = self
            .verdicts
            .iter()
            .filter(|v| v.status != Status::Skipped)
            .map(|v| {
                let cond = |i: usize| {
                    v.conditions
                        .get(i)
                        .map_or("-".to_string(), |c| c.result.as_str().to_string())
                };
                let sum = |f: &dyn Fn(&crate::verify::ConditionOutcome) -> usize| {
                    v.conditions.iter().map(f).sum::<usize>().to_string()
                };
                [
                    v.qubit.clone(),
                    v.status.as_str().to_string(),
                    cond(0),
                    cond(1),
                    format!("{:.3}", v.solve_ms),
                    sum(&|c| c.dag_nodes),
                    sum(&|c| c.cnf_clauses),
                ]
            })
            .collect();
        if !rows.is_empty() {
            let header = [
                "qubit",
                "status",
                "cond1",
                "cond2",
                "solve ms",
                "dag nodes",
                "clauses",
            ];
            out.push_str(&table(&header, &rows));
        }
        for v in &self.verdicts {
            if v.status == Status::Unsafe {
                let conds: Vec<&str> = v.violated.iter().map(|c| c.as_str()).collect();
                let _ = write!(
                    out,
                    "{} unsafe: {} satisfiable",
                    v.qubit,
                    conds.join(" and ")
                );
                match &v.witness {
                    Some(w) => {
                        let _ = writeln!(out, ", witness {}", self.describe(w));
                    }
                    None => out.push_str(", no witness from external solver\n"),
                }
            }
            if let (Status::Unknown, Some(r)) = (v.status, &v.reason) {
                let _ = writeln!(out, "{} unknown: {r}", v.qubit);
            }
        }
        if let Some(o) = &self.oracle {
            let _ = write!(out, "oracle: {} ({} checked)", o.status, o.checked);
            if let Some(r) = &o.reason {
                let _ = write!(out, ": {r}");
            }
            out.push('\n');
            for d in &o.disagreements {
                let _ = writeln!(out, "oracle disagreement: {d}");
            }
        }
        let _ = writeln!(
            out,
            "summary: {} safe, {} unsafe, {} unknown, {} skipped; solver {:.3} ms, wall {:.3} ms",
            self.count(Status::Safe),
            self.count(Status::Unsafe),
            self.count(Status::Unknown),
            self.count(Status::Skipped),
            self.solve_ms,
            self.wall_ms
        );
        out
    }

    /// Lists the qubits set to 1 in a witness, or `all zero`.
    fn describe(&self, w: &Witness) -> String {
        let ones: Vec<&str> = w
            .bits
            .chars()
            .zip(&self.qubit_names)
            .filter(|(c, _)| *c == '1')
            .map(|(_, n)| n.as_str())
            .collect();
        if ones.is_empty() {
            "all qubits 0".into()
        } else {
            format!("{} = 1, others 0", ones.join(", "))
        }
    }
}

pub fn verdict_exit_code(statuses: impl IntoIterator<Item = Status>) -> i32 {
    let mut code = exit::SAFE;
    for s in statuses {
        match s {
            Status::Unsafe => return exit::UNSAFE,
            Status::Unknown => code = exit::UNKNOWN,
            Status::Safe | Status::Skipped => {}
        }
    }
    code
}

/// Left-aligned plain text table.
pub fn table<const N: usize>(header: &[&str; N], rows: &[[String; N]]) -> String {
    let mut widths = header.map(str::len);
    for r in rows {
        for (w, cell) in widths.iter_mut().zip(r) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let mut line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        let _ = writeln!(out, "{}", padded.join("  ").trim_end());
    };
    line(header.to_vec());
    for r in rows {
        line(r.iter().map(String::as_str).collect());
    }
    out
}
