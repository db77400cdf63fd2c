use std::fmt;
use std::str::FromStr;

use qborrow_core::benchmarks;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BenchKind {
    Adder,
    Mcx,
}

impl BenchKind {
    /// Smallest size whose program elaborates.
    pub fn min_size(self) -> i64 {
        match self {
            // n = 2 would reference a[0] in the first carry step
            BenchKind::Adder => 3,
            BenchKind::Mcx => 4,
        }
    }

    fn template(self) -> (&'static str, &'static str, &'static str) {
        match self {
            BenchKind::Adder => (benchmarks::ADDER, benchmarks::ADDER_SIZE_LINE, "n"),
            BenchKind::Mcx => (benchmarks::MCX, benchmarks::MCX_SIZE_LINE, "m"),
        }
    }
}

impl fmt::Display for BenchKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BenchKind::Adder => "adder",
            BenchKind::Mcx => "mcx",
        })
    }
}

impl FromStr for BenchKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "adder" => Ok(BenchKind::Adder),
            "mcx" => Ok(BenchKind::Mcx),
            _ => Err(format!("unknown benchmark '{s}' (expected adder or mcx)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeOutOfRange {
    pub kind: BenchKind,
    pub size: i64,
}

impl fmt::Display for SizeOutOfRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "size {} out of range for {} (minimum {})",
            self.size,
            self.kind,
            self.kind.min_size()
        )
    }
}

impl std::error::Error for SizeOutOfRange {}

/// The benchmark source with its size constant replaced by `size`.
pub fn generate(kind: BenchKind, size: i64) -> Result<String, SizeOutOfRange> {
    if size < kind.min_size() {
        return Err(SizeOutOfRange { kind, size });
    }
    let (text, line, var) = kind.template();
    Ok(text.replacen(line, &format!("let {var} = {size};"), 1))
}
