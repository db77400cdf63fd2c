//! Elaboration of a parsed program into a [`FlatCircuit`]. Loops are unrolled
//! and registers resolved while the borrow discipline is checked.

mod eval;
pub mod idle;

use std::collections::HashMap;

use thiserror::Error;

pub use eval::{eval_expr, loop_range, EvalError, LoopRange};
pub use idle::{idle, ExtStmt};

use crate::circuit::{FlatCircuit, Gate, Lifetime, QubitDecl, QubitId, QubitRole};
use crate::frontend::{Expr, Location, ProgramAst, Reg, Stmt, StmtKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ElabError {
    #[error("{at}: unbound identifier '{name}'")]
    UnboundIdentifier { name: String, at: Location },
    #[error("{at}: arithmetic overflow")]
    ArithmeticOverflow { at: Location },
    #[error("{at}: index {index} out of range for register '{register}' of size {size}")]
    IndexOutOfRange {
        register: String,
        index: i64,
        size: u32,
        at: Location,
    },
    #[error("{at}: register '{register}' has size {size} and needs an index")]
    UnindexedRegister {
        register: String,
        size: u32,
        at: Location,
    },
    #[error("{at}: {gate} uses qubit {qubit} more than once")]
    DuplicateOperand {
        gate: String,
        qubit: String,
        at: Location,
    },
    #[error("{at}: register '{register}' used after release")]
    UseAfterRelease { register: String, at: Location },
    #[error("{at}: register '{name}' is already declared")]
    RedeclaredRegister { name: String, at: Location },
    #[error("{at}: '{name}' is already bound")]
    Redefinition { name: String, at: Location },
    #[error("{at}: register '{register}' declared with non-positive size {size}")]
    NonPositiveSize {
        register: String,
        size: i64,
        at: Location,
    },
}

impl ElabError {
    pub fn location(&self) -> Location {
        match self {
            ElabError::UnboundIdentifier { at, .. }
            | ElabError::ArithmeticOverflow { at }
            | ElabError::IndexOutOfRange { at, .. }
            | ElabError::UnindexedRegister { at, .. }
            | ElabError::DuplicateOperand { at, .. }
            | ElabError::UseAfterRelease { at, .. }
            | ElabError::RedeclaredRegister { at, .. }
            | ElabError::Redefinition { at, .. }
            | ElabError::NonPositiveSize { at, .. } => *at,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Warning {
    pub at: Location,
    pub message: String,
}

/// Output of [`elaborate`]: the flat circuit plus any non-fatal diagnostics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Elaboration {
    pub circuit: FlatCircuit,
    pub warnings: Vec<Warning>,
}

struct Register {
    first: u32,
    size: u32,
    lifetime: usize,
    released: bool,
    declared_at: Location,
}

#[derive(Default)]
struct Elaborator {
    env: HashMap<String, i64>,
    registers: HashMap<String, Register>,
    circuit: FlatCircuit,
}

impl Elaborator {
    fn eval(&self, e: &Expr, at: Location) -> Result<i64, ElabError> {
        eval_expr(e, &self.env).map_err(|err| match err {
            EvalError::UnboundIdentifier(name) => ElabError::UnboundIdentifier { name, at },
            EvalError::Overflow => ElabError::ArithmeticOverflow { at },
        })
    }

    fn bind(&mut self, name: &str, value: i64, at: Location) -> Result<(), ElabError> {
        if self.env.contains_key(name) {
            return Err(ElabError::Redefinition {
                name: name.to_string(),
                at,
            });
        }
        self.env.insert(name.to_string(), value);
        Ok(())
    }

    fn declare(&mut self, reg: &Reg, role: QubitRole) -> Result<(), ElabError> {
        if self.registers.contains_key(&reg.name) {
            return Err(ElabError::RedeclaredRegister {
                name: reg.name.clone(),
                at: reg.loc,
            });
        }
        let size = match &reg.index {
            Some(e) => self.eval(e, reg.loc)?,
            None => 1,
        };
        if size < 1 {
            return Err(ElabError::NonPositiveSize {
                register: reg.name.clone(),
                size,
                at: reg.loc,
            });
        }
        let size =
            u32::try_from(size).map_err(|_| ElabError::ArithmeticOverflow { at: reg.loc })?;
        let first = self.circuit.qubits.len() as u32;
        for i in 0..size {
            self.circuit.qubits.push(QubitDecl {
                id: QubitId(first + i),
                register: reg.name.clone(),
                index: i + 1,
                scalar: reg.index.is_none(),
                role,
            });
        }
        let start = self.circuit.gates.len();
        self.circuit.lifetimes.push(Lifetime {
            register: reg.name.clone(),
            role,
            start,
            end: start,
            explicit_release: false,
        });
        self.registers.insert(
            reg.name.clone(),
            Register {
                first,
                size,
                lifetime: self.circuit.lifetimes.len() - 1,
                released: false,
                declared_at: reg.loc,
            },
        );
        Ok(())
    }

    fn release(&mut self, name: &str, at: Location) -> Result<(), ElabError> {
        let gates = self.circuit.gates.len();
        let reg = self
            .registers
            .get_mut(name)
            .ok_or_else(|| ElabError::UnboundIdentifier {
                name: name.to_string(),
                at,
            })?;
        if reg.released {
            return Err(ElabError::UseAfterRelease {
                register: name.to_string(),
                at,
            });
        }
        reg.released = true;
        let lt = &mut self.circuit.lifetimes[reg.lifetime];
        lt.end = gates;
        lt.explicit_release = true;
        Ok(())
    }

    fn resolve(&self, reg: &Reg) -> Result<QubitId, ElabError> {
        let Some(info) = self.registers.get(&reg.name) else {
            return Err(ElabError::UnboundIdentifier {
                name: reg.name.clone(),
                at: reg.loc,
            });
        };
        if info.released {
            return Err(ElabError::UseAfterRelease {
                register: reg.name.clone(),
                at: reg.loc,
            });
        }
        let index = match &reg.index {
            Some(e) => self.eval(e, reg.loc)?,
            None if info.size == 1 => 1,
            None => {
                return Err(ElabError::UnindexedRegister {
                    register: reg.name.clone(),
                    size: info.size,
                    at: reg.loc,
                })
            }
        };
        if index < 1 || index > i64::from(info.size) {
            return Err(ElabError::IndexOutOfRange {
                register: reg.name.clone(),
                index,
                size: info.size,
                at: reg.loc,
            });
        }
        Ok(QubitId(info.first + index as u32 - 1))
    }

    fn gate(&mut self, regs: &[&Reg], at: Location) -> Result<(), ElabError> {
        let ids = regs
            .iter()
            .map(|r| self.resolve(r))
            .collect::<Result<Vec<_>, _>>()?;
        for (i, q) in ids.iter().enumerate() {
            if ids[..i].contains(q) {
                let mnemonic = ["X", "CNOT", "CCNOT"][ids.len() - 1];
                return Err(ElabError::DuplicateOperand {
                    gate: mnemonic.to_string(),
                    qubit: self.circuit.qubit_name(*q),
                    at,
                });
            }
        }
        let (target, controls) = ids.split_last().expect("gates have operands");
        let gate = if controls.is_empty() {
            Gate::x(*target)
        } else {
            Gate::Mcx {
                controls: controls.to_vec(),
                target: *target,
            }
        };
        self.circuit.gates.push(gate);
        Ok(())
    }

    fn block(&mut self, stmts: &[Stmt]) -> Result<(), ElabError> {
        stmts.iter().try_for_each(|s| self.stmt(s))
    }

    fn stmt(&mut self, stmt: &Stmt) -> Result<(), ElabError> {
        match &stmt.kind {
            StmtKind::Let(name, e) => {
                let v = self.eval(e, stmt.loc)?;
                self.bind(name, v, stmt.loc)
            }
            StmtKind::Borrow(r) => self.declare(r, QubitRole::BorrowVerify),
            StmtKind::BorrowSkip(r) => self.declare(r, QubitRole::BorrowSkip),
            StmtKind::Alloc(r) => self.declare(r, QubitRole::Clean),
            StmtKind::Release(name) => self.release(name, stmt.loc),
            StmtKind::X(a) => self.gate(&[a], stmt.loc),
            StmtKind::Cnot(a, b) => self.gate(&[a, b], stmt.loc),
            StmtKind::Ccnot(a, b, c) => self.gate(&[a, b, c], stmt.loc),
            StmtKind::For {
                var,
                from,
                to,
                body,
            } => {
                let from = self.eval(from, stmt.loc)?;
                let to = self.eval(to, stmt.loc)?;
                for i in loop_range(from, to) {
                    self.bind(var, i, stmt.loc)?;
                    let outer: Vec<String> = self.env.keys().cloned().collect();
                    self.block(body)?;
                    // `let`s inside the body live for one iteration only.
                    self.env.retain(|k, _| outer.contains(k));
                    self.env.remove(var);
                }
                Ok(())
            }
        }
    }
}

/// Unrolls loops and resolves every register reference.
///
/// Registers still live at the end of the program are released implicitly;
/// each one gets a warning in the result.
pub fn elaborate(ast: &ProgramAst) -> Result<Elaboration, ElabError> {
    let mut el = Elaborator::default();
    el.block(&ast.statements)?;

    let total = el.circuit.gates.len();
    let mut warnings = Vec::new();
    let mut open: Vec<&Register> = el.registers.values().filter(|r| !r.released).collect();
    open.sort_by_key(|r| r.lifetime);
    for reg in open {
        let lt = &mut el.circuit.lifetimes[reg.lifetime];
        lt.end = total;
        warnings.push(Warning {
            at: reg.declared_at,
            message: format!(
                "register '{}' is never released; released at end of program",
                lt.register
            ),
        });
    }
    Ok(Elaboration {
        circuit: el.circuit,
        warnings,
    })
}
