//! Flat, loop-free reversible circuits produced by elaboration.

use std::fmt;

/// Dense global qubit index, assigned in declaration order starting at 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QubitId(pub u32);

impl QubitId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// How a qubit entered the program, which decides whether it is verified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QubitRole {
    /// Declared by `borrow`: dirty, must be safely uncomputed.
    BorrowVerify,
    /// Declared by `borrow@`: dirty, verification skipped.
    BorrowSkip,
    /// Declared by `alloc`: starts in |0>.
    Clean,
}

impl QubitRole {
    pub fn is_dirty(self) -> bool {
        !matches!(self, QubitRole::Clean)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QubitDecl {
    pub id: QubitId,
    pub register: String,
    /// 1-based position inside the register.
    pub index: u32,
    /// Declared without brackets (`borrow@ t;`), so printed without an index.
    pub scalar: bool,
    pub role: QubitRole,
}

impl QubitDecl {
    /// Display name used in dumps and solver files:
    /// `q.3` for indexed registers, `t` for scalar ones.
    pub fn name(&self) -> String {
        if self.scalar {
            self.register.clone()
        } else {
            format!("{}.{}", self.register, self.index)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Gate {
    Not {
        target: QubitId,
    },
    /// Multi-controlled NOT. One control is CNOT, two is Toffoli.
    Mcx {
        controls: Vec<QubitId>,
        target: QubitId,
    },
}

impl Gate {
    pub fn x(target: QubitId) -> Gate {
        Gate::Not { target }
    }

    pub fn cnot(control: QubitId, target: QubitId) -> Gate {
        Gate::Mcx {
            controls: vec![control],
            target,
        }
    }

    pub fn toffoli(c1: QubitId, c2: QubitId, target: QubitId) -> Gate {
        Gate::Mcx {
            controls: vec![c1, c2],
            target,
        }
    }

    pub fn target(&self) -> QubitId {
        match self {
            Gate::Not { target } | Gate::Mcx { target, .. } => *target,
        }
    }

    pub fn controls(&self) -> &[QubitId] {
        match self {
            Gate::Not { .. } => &[],
            Gate::Mcx { controls, .. } => controls,
        }
    }

    /// Controls followed by the target.
    pub fn operands(&self) -> impl Iterator<Item = QubitId> + '_ {
        self.controls()
            .iter()
            .copied()
            .chain(std::iter::once(self.target()))
    }

    pub fn mnemonic(&self) -> &'static str {
        match self.controls().len() {
            0 => "X",
            1 => "CNOT",
            2 => "CCNOT",
            _ => "MCX",
        }
    }
}

/// Gate-index interval `[start, end)` during which a register is live.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lifetime {
    pub register: String,
    pub role: QubitRole,
    pub start: usize,
    pub end: usize,
    /// False when the program never released the register.
    pub explicit_release: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FlatCircuit {
    pub qubits: Vec<QubitDecl>,
    pub gates: Vec<Gate>,
    /// One entry per declared register, in declaration order.
    pub lifetimes: Vec<Lifetime>,
}

impl FlatCircuit {
    /// A circuit over anonymous dirty qubits `q.1 .. q.n`, all verified.
    /// Handy for tests and hand-built examples.
    pub fn with_qubits(n: usize) -> FlatCircuit {
        let names: Vec<String> = (1..=n).map(|i| format!("q{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        FlatCircuit::with_named_qubits(&refs)
    }

    /// A circuit over scalar dirty qubits with the given names, all verified.
    pub fn with_named_qubits(names: &[&str]) -> FlatCircuit {
        let qubits = names
            .iter()
            .enumerate()
            .map(|(i, name)| QubitDecl {
                id: QubitId(i as u32),
                register: name.to_string(),
                index: 1,
                scalar: true,
                role: QubitRole::BorrowVerify,
            })
            .collect();
        FlatCircuit {
            qubits,
            gates: Vec::new(),
            lifetimes: Vec::new(),
        }
    }

    pub fn push(&mut self, gate: Gate) -> &mut Self {
        self.gates.push(gate);
        self
    }

    pub fn num_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn decl(&self, q: QubitId) -> &QubitDecl {
        &self.qubits[q.index()]
    }

    pub fn qubit_name(&self, q: QubitId) -> String {
        self.decl(q).name()
    }

    /// Looks a qubit up by its display name (`a.3`, `t`).
    pub fn find(&self, name: &str) -> Option<QubitId> {
        self.qubits.iter().find(|d| d.name() == name).map(|d| d.id)
    }

    pub fn role(&self, q: QubitId) -> QubitRole {
        self.decl(q).role
    }

    pub fn toffoli_count(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| g.controls().len() == 2)
            .count()
    }

    /// One gate per line, e.g. `CCNOT a.1 q.2 a.2`.
    pub fn dump_gates(&self) -> String {
        let mut out = String::new();
        for g in &self.gates {
            out.push_str(g.mnemonic());
            for q in g.operands() {
                out.push(' ');
                out.push_str(&self.qubit_name(q));
            }
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for FlatCircuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.dump_gates())
    }
}
