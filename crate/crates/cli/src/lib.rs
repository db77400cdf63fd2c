//! Driver for the `qborrow` command: verification reports, benchmark
//! generation and timing sweeps.

pub mod bench;
pub mod external;
pub mod gen;
pub mod report;
pub mod verify;

pub use bench::{parse_sizes, run_bench, BenchRow, BenchTable};
pub use gen::{generate, BenchKind};
pub use report::{exit, Report};
pub use verify::{
    verify_file, verify_source, Condition, SolverChoice, Status, Verdict, VerifyOptions,
};
