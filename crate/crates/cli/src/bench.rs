use serde::Serialize;

use crate::gen::{generate, BenchKind, SizeOutOfRange};
use crate::report::{table, Report};
use crate::verify::{verify_source, Status, VerifyError, VerifyOptions};

/// One benchmark instance. `solve_ms` covers solver time only.
#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub size: i64,
    pub qubits: usize,
    pub verified_qubits: usize,
    pub gates: usize,
    pub toffolis: usize,
    pub safe: usize,
    pub unsafe_: usize,
    pub unknown: usize,
    pub solve_ms: f64,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchTable {
    pub kind: BenchKind,
    pub solver: String,
    pub rows: Vec<BenchRow>,
    #[serde(skip)]
    pub exit_code: i32,
}

#[derive(Debug)]
pub enum BenchError {
    Size(SizeOutOfRange),
    Verify(VerifyError),
}

impl std::fmt::Display for BenchError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BenchError::Size(e) => write!(f, "{e}"),
            BenchError::Verify(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for BenchError {}

/// Parses `8,16,32`; the empty string is the empty list.
pub fn parse_sizes(text: &str) -> Result<Vec<i64>, String> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| format!("invalid size '{s}'")))
        .collect()
}

pub fn run_bench(
    kind: BenchKind,
    sizes: &[i64],
    opts: &VerifyOptions,
) -> Result<BenchTable, BenchError> {
    let mut rows = Vec::new();
    let mut codes = Vec::new();
    for &size in sizes {
        let source = generate(kind, size).map_err(BenchError::Size)?;
        let name = format!("{kind}-{size}.qbr");
        let report = verify_source(&source, std::path::Path::new(&name), opts)
            .map_err(BenchError::Verify)?;
        codes.push(report.exit_code());
        rows.push(row(size, &report));
    }
    let exit_code = codes
        .iter()
        .copied()
        .max_by_key(|&c| severity(c))
        .unwrap_or(0);
    Ok(BenchTable {
        kind,
        solver: opts.solver.to_string(),
        rows,
        exit_code,
    })
}

/// Orders exit codes so the most serious one wins when aggregating.
fn severity(code: i32) -> u8 {
    match code {
        0 => 0,
        3 => 1,
        1 => 2,
        _ => 3,
    }
}

fn row(size: i64, r: &Report) -> BenchRow {
    BenchRow {
        size,
        qubits: r.qubits,
        verified_qubits: r.verified_qubits,
        gates: r.gates,
        toffolis: r.toffolis,
        safe: r.count(Status::Safe),
        unsafe_: r.count(Status::Unsafe),
        unknown: r.count(Status::Unknown),
        solve_ms: r.solve_ms,
        wall_ms: r.wall_ms,
    }
}

impl BenchTable {
    pub fn render_text(&self) -> String {
        let rows: Vec<[String; 8]> = self
            .rows
            .iter()
            .map(|r| {
                [
                    r.size.to_string(),
                    r.qubits.to_string(),
                    r.gates.to_string(),
                    r.toffolis.to_string(),
                    r.verified_qubits.to_string(),
                    format!("{}/{}/{}", r.safe, r.unsafe_, r.unknown),
                    format!("{:.3}", r.solve_ms),
                    format!("{:.3}", r.wall_ms),
                ]
            })
            .collect();
        let header = [
            "size",
            "qubits",
            "gates",
            "toffolis",
            "verified",
            "safe/unsafe/unknown",
            "solver ms",
            "wall ms",
        ];
        format!(
            "{} benchmark, solver {}\n{}",
            self.kind,
            self.solver,
            table(&header, &rows)
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }
}
