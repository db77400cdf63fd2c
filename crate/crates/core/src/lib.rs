//! Static verification of safe uncomputation for borrowed dirty qubits in
//! reversible X/CNOT/Toffoli circuits.
//!
//! Pipeline: [`frontend`] parses source text, [`elaborator`] unrolls it into a
//! [`circuit::FlatCircuit`], [`boolform`] tracks every qubit as a Boolean
//! formula of the inputs and builds the safety conditions, and [`satcore`]
//! decides them. [`oracle`] provides brute-force ground truth for small
//! circuits.

pub mod benchmarks;
pub mod boolform;
pub mod circuit;
pub mod elaborator;
pub mod frontend;
pub mod oracle;
pub mod satcore;
