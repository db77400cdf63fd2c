//! Syntactic idle-qubit analysis over the full statement language,
//! including measurement-guarded branches and loops that the parsed
//! fragment does not have.

use std::collections::BTreeSet;

use crate::circuit::{Gate, QubitId};

/// Abstract statement tree for idle analysis. Borrow placeholders are
/// ordinary [`QubitId`]s that lie outside the universe passed to [`idle`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExtStmt {
    Skip,
    Init(QubitId),
    Unitary(Vec<QubitId>),
    Seq(Box<ExtStmt>, Box<ExtStmt>),
    IfMeasure(Vec<QubitId>, Box<ExtStmt>, Box<ExtStmt>),
    WhileMeasure(Vec<QubitId>, Box<ExtStmt>),
    BorrowBlock(QubitId, Box<ExtStmt>),
}

impl ExtStmt {
    /// Right-nested sequence of the given statements; empty gives `Skip`.
    pub fn seq(stmts: impl IntoIterator<Item = ExtStmt>) -> ExtStmt {
        let mut items: Vec<ExtStmt> = stmts.into_iter().collect();
        let Some(mut acc) = items.pop() else {
            return ExtStmt::Skip;
        };
        while let Some(prev) = items.pop() {
            acc = ExtStmt::Seq(Box::new(prev), Box::new(acc));
        }
        acc
    }

    pub fn gates(gates: &[Gate]) -> ExtStmt {
        ExtStmt::seq(
            gates
                .iter()
                .map(|g| ExtStmt::Unitary(g.operands().collect())),
        )
    }
}

/// Qubits of `universe` untouched by `s`.
pub fn idle(s: &ExtStmt, universe: &BTreeSet<QubitId>) -> BTreeSet<QubitId> {
    let without = |set: BTreeSet<QubitId>, qs: &[QubitId]| -> BTreeSet<QubitId> {
        set.into_iter().filter(|q| !qs.contains(q)).collect()
    };
    match s {
        ExtStmt::Skip => universe.clone(),
        ExtStmt::Init(q) => without(universe.clone(), std::slice::from_ref(q)),
        ExtStmt::Unitary(qs) => without(universe.clone(), qs),
        ExtStmt::Seq(a, b) => &idle(a, universe) & &idle(b, universe),
        ExtStmt::IfMeasure(qs, a, b) => without(&idle(a, universe) & &idle(b, universe), qs),
        ExtStmt::WhileMeasure(qs, body) => without(idle(body, universe), qs),
        ExtStmt::BorrowBlock(_, body) => idle(body, universe),
    }
}
