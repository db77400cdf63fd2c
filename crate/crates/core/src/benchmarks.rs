//! The two benchmark programs, verbatim, with their default sizes.

/// Ripple-carry style adder over `q[1..n]` borrowing `a[1..n-1]`.
pub const ADDER: &str = include_str!("../benchmarks/adder.qbr");

/// Multi-controlled NOT with `m + (m - 1)` controls and one borrowed ancilla.
pub const MCX: &str = include_str!("../benchmarks/mcx.qbr");

/// The line of [`ADDER`] holding the size constant.
pub const ADDER_SIZE_LINE: &str = "let n = 50;";

/// The line of [`MCX`] holding the size constant.
pub const MCX_SIZE_LINE: &str = "let m = 1750;";
