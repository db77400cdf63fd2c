//! Satisfiability of tracked formulas: Tseitin encoding into CNF, an
//! internal CDCL solver, and DIMACS / SMT-LIB2 emitters for external tools.

mod dimacs;
mod smtlib;
mod solver;
mod tseitin;

use std::collections::BTreeMap;
use std::fmt;
use std::time::{Duration, Instant};

use thiserror::Error;

pub use dimacs::{emit_dimacs, parse_dimacs, DimacsError};
pub use smtlib::emit_smtlib;
pub use solver::{SolverConfig, SolverStats};
pub use tseitin::{tseitin, tseitin_with_cap, DEFAULT_CLAUSE_CAP};

use crate::boolform::{ExprId, ExprStore};
use crate::circuit::QubitId;

/// CNF variable, numbered densely from 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub u32);

impl Var {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A variable with a sign, packed as `2 * var + negative`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(u32);

impl Lit {
    pub fn new(var: Var, negative: bool) -> Lit {
        Lit(var.0 << 1 | u32::from(negative))
    }

    pub fn positive(var: Var) -> Lit {
        Lit::new(var, false)
    }

    pub(crate) fn from_code(code: u32) -> Lit {
        Lit(code)
    }

    pub fn code(self) -> usize {
        self.0 as usize
    }

    pub fn var(self) -> Var {
        Var(self.0 >> 1)
    }

    pub fn is_negative(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn from_dimacs(x: i32) -> Lit {
        assert!(x != 0, "0 is the DIMACS clause terminator");
        Lit::new(Var(x.unsigned_abs()), x < 0)
    }

    pub fn to_dimacs(self) -> i64 {
        let v = i64::from(self.var().0);
        if self.is_negative() {
            -v
        } else {
            v
        }
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;

    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Cnf {
    pub clauses: Vec<Vec<Lit>>,
    pub num_vars: u32,
    /// CNF variable of every input qubit, ordered by variable.
    pub inputs: Vec<(QubitId, Var)>,
}

impl Cnf {
    pub fn fresh_var(&mut self) -> Var {
        self.num_vars += 1;
        Var(self.num_vars)
    }

    /// Adds a clause, dropping duplicate literals and tautologies.
    pub fn add_clause(&mut self, lits: impl IntoIterator<Item = Lit>) {
        let mut c: Vec<Lit> = lits.into_iter().collect();
        c.sort_unstable();
        c.dedup();
        if c.windows(2).any(|w| w[0] == !w[1]) {
            return;
        }
        self.clauses.push(c);
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveResult {
    Unsat,
    /// Values of the input qubits occurring in the formula.
    Sat(BTreeMap<QubitId, bool>),
}

impl SolveResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveResult::Sat(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("solver budget exhausted after {conflicts} conflicts ({elapsed:?})")]
    ResourceLimit { conflicts: u64, elapsed: Duration },
    #[error("CNF encoding would exceed {cap} clauses")]
    SizeCap { cap: usize },
    #[error("solver returned a model that does not satisfy the formula")]
    ModelCheckFailed,
}

/// Decides `cnf ∧ root` with the internal CDCL solver.
///
/// `root = None` means the clauses alone are asserted (the encodings of the
/// constants `true` and `false`).
pub fn solve(
    cnf: &Cnf,
    root: Option<Lit>,
    config: &SolverConfig,
) -> Result<(SolveResult, SolverStats), SolveError> {
    let started = Instant::now();
    let mut s = solver::Solver::new(cnf.num_vars, config.clone());
    let mut ok = true;
    for c in &cnf.clauses {
        if !s.add_clause(c) {
            ok = false;
            break;
        }
    }
    if ok {
        if let Some(r) = root {
            s.add_clause(&[r]);
        }
    }
    let outcome = s.solve();
    let stats = s.stats;
    match outcome {
        solver::Outcome::Unsat => Ok((SolveResult::Unsat, stats)),
        solver::Outcome::Sat(values) => {
            let model = cnf
                .inputs
                .iter()
                .map(|&(q, v)| (q, values[v.index()]))
                .collect();
            Ok((SolveResult::Sat(model), stats))
        }
        solver::Outcome::Budget => Err(SolveError::ResourceLimit {
            conflicts: stats.conflicts,
            elapsed: started.elapsed(),
        }),
    }
}

/// Everything measured while deciding one formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decision {
    pub result: SolveResult,
    pub dag_nodes: usize,
    pub cnf_vars: u32,
    pub cnf_clauses: usize,
    pub solver: SolverStats,
    /// Time spent inside the CDCL search only.
    pub solve_time: Duration,
}

/// Encodes, solves and, for satisfiable formulas, re-evaluates the model
/// through the original expression before returning it. Inputs absent from
/// the model are read as `false`.
pub fn decide(
    store: &ExprStore,
    e: ExprId,
    config: &SolverConfig,
    clause_cap: usize,
) -> Result<Decision, SolveError> {
    let (cnf, root) = tseitin_with_cap(store, e, clause_cap)?;
    let started = Instant::now();
    let (result, solver_stats) = solve(&cnf, root, config)?;
    let solve_time = started.elapsed();
    if let SolveResult::Sat(model) = &result {
        if !store.eval(e, |q| model.get(&q).copied().unwrap_or(false)) {
            return Err(SolveError::ModelCheckFailed);
        }
    }
    Ok(Decision {
        result,
        dag_nodes: store.dag_size(e),
        cnf_vars: cnf.num_vars,
        cnf_clauses: cnf.num_clauses(),
        solver: solver_stats,
        solve_time,
    })
}
