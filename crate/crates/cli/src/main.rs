use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qborrow_cli::{
    exit, generate, parse_sizes, run_bench, verify_file, BenchKind, SolverChoice, VerifyOptions,
};

#[derive(Parser)]
#[command(
    name = "qborrow",
    version,
    about = "Verify safe uncomputation of borrowed dirty qubits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verify every `borrow` qubit of a program.
    Verify(VerifyArgs),
    /// Write a benchmark program of the given size.
    Gen {
        #[arg(value_parser = parse_kind)]
        kind: BenchKind,
        #[arg(long, env = "QBORROW_SIZE", allow_negative_numbers = true)]
        size: i64,
        #[arg(short = 'o', long = "output", env = "QBORROW_OUTPUT")]
        output: PathBuf,
    },
    /// Generate and verify a benchmark at several sizes.
    Bench {
        #[arg(value_parser = parse_kind)]
        kind: BenchKind,
        /// Comma-separated sizes; empty for none.
        #[arg(long, env = "QBORROW_SIZES", default_value = "")]
        sizes: String,
        #[command(flatten)]
        solve: SolveArgs,
        #[arg(long, value_enum, env = "QBORROW_FORMAT", default_value = "text")]
        format: Format,
    },
}

#[derive(Args)]
struct VerifyArgs {
    file: PathBuf,
    #[command(flatten)]
    solve: SolveArgs,
    /// Write one DIMACS file per qubit and condition into this directory.
    #[arg(long, env = "QBORROW_EMIT_DIMACS")]
    emit_dimacs: Option<PathBuf>,
    /// Write one SMT-LIB2 script per qubit and condition into this directory.
    #[arg(long, env = "QBORROW_EMIT_SMTLIB")]
    emit_smtlib: Option<PathBuf>,
    #[arg(long, value_enum, env = "QBORROW_FORMAT", default_value = "text")]
    format: Format,
    /// Also write the JSON report to this file.
    #[arg(long, env = "QBORROW_REPORT")]
    report: Option<PathBuf>,
    /// Print the flattened gate list to stderr.
    #[arg(long, env = "QBORROW_DUMP_GATES")]
    dump_gates: bool,
}

#[derive(Args)]
struct SolveArgs {
    /// `internal` or `cmd:<exe>`; external commands get the SMT-LIB2 path appended.
    #[arg(long, env = "QBORROW_SOLVER", default_value = "internal")]
    solver: SolverChoice,
    /// Cross-check verdicts by exhaustive enumeration (up to 20 qubits).
    #[arg(long, env = "QBORROW_ORACLE")]
    oracle: bool,
    /// Concurrent solver queries; 0 uses every core.
    #[arg(long, env = "QBORROW_JOBS", default_value_t = 0)]
    jobs: usize,
    #[arg(long, env = "QBORROW_BUDGET_CONFLICTS", default_value_t = 100_000_000)]
    budget_conflicts: u64,
    #[arg(long, env = "QBORROW_BUDGET_SECONDS", default_value_t = 600.0)]
    budget_seconds: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

fn parse_kind(s: &str) -> Result<BenchKind, String> {
    s.parse()
}

impl SolveArgs {
    fn options(&self) -> Result<VerifyOptions, String> {
        if !(self.budget_seconds > 0.0 && self.budget_seconds.is_finite()) {
            return Err(format!("invalid --budget-seconds {}", self.budget_seconds));
        }
        Ok(VerifyOptions {
            solver: self.solver.clone(),
            oracle: self.oracle,
            jobs: self.jobs,
            budget_conflicts: self.budget_conflicts,
            budget_seconds: self.budget_seconds,
            ..VerifyOptions::default()
        })
    }
}

fn fail(message: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(exit::USAGE as u8)
}

fn verify(args: VerifyArgs) -> ExitCode {
    let mut opts = match args.solve.options() {
        Ok(o) => o,
        Err(e) => return fail(e),
    };
    opts.emit_dimacs = args.emit_dimacs;
    opts.emit_smtlib = args.emit_smtlib;
    if args.dump_gates {
        let dump = std::fs::read_to_string(&args.file)
            .map_err(|e| e.to_string())
            .and_then(|s| qborrow_core::frontend::parse_program(&s).map_err(|e| e.to_string()))
            .and_then(|ast| qborrow_core::elaborator::elaborate(&ast).map_err(|e| e.to_string()));
        if let Ok(elab) = dump {
            eprint!("{}", elab.circuit.dump_gates());
        }
    }
    let report = match verify_file(&args.file, &opts) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    match args.format {
        Format::Text => print!("{}", report.render_text()),
        Format::Json => println!("{}", report.to_json()),
    }
    if let Some(path) = &args.report {
        if let Err(e) = std::fs::write(path, report.to_json() + "\n") {
            return fail(format!("{}: {e}", path.display()));
        }
    }
    if let Some(o) = report.oracle.as_ref().filter(|o| o.status == "disagree") {
        for d in &o.disagreements {
            eprintln!("error: oracle disagreement: {d}");
        }
    }
    ExitCode::from(report.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Verify(args) => verify(args),
        Command::Gen { kind, size, output } => {
            let text = match generate(kind, size) {
                Ok(t) => t,
                Err(e) => return fail(e),
            };
            match std::fs::write(&output, text) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => fail(format!("{}: {e}", output.display())),
            }
        }
        Command::Bench {
            kind,
            sizes,
            solve,
            format,
        } => {
            let sizes = match parse_sizes(&sizes) {
                Ok(s) => s,
                Err(e) => return fail(e),
            };
            let opts = match solve.options() {
                Ok(o) => o,
                Err(e) => return fail(e),
            };
            match run_bench(kind, &sizes, &opts) {
                Ok(t) => {
                    match format {
                        Format::Text => print!("{}", t.render_text()),
                        Format::Json => println!("{}", t.to_json()),
                    }
                    ExitCode::from(t.exit_code as u8)
                }
                Err(e) => fail(e),
            }
        }
    }
}
