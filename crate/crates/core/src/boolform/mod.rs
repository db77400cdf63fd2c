//! Symbolic tracking of each qubit's final value as a Boolean formula over
//! the initial values, and the two unsatisfiability conditions that decide
//! safe uncomputation of a dirty qubit.
//!
//! A circuit of X and multi-controlled NOT gates is a permutation of basis
//! states, so every qubit's output is a Boolean function of the inputs.
//! Tracking starts with `b_q = q` for dirty qubits and `b_q = false` for
//! clean ones, then applies per gate:
//!
//! - `X[q]`: `b_q := ¬b_q`
//! - `C^mNOT[c1..cm, t]`: `b_t := b_t ⊕ (b_c1 ∧ ... ∧ b_cm)`
//!
//! A dirty qubit `q` is safely uncomputed iff both of these are unsatisfiable:
//!
//! - restoration of |0⟩: `b_q ∧ ¬q`
//! - restoration of |+⟩: `⋁_{q' ≠ q} b_q'[0/q] ⊕ b_q'[1/q]`

mod store;

use thiserror::Error;

pub use store::{ExprId, ExprStore, Node, SubstCache, DEFAULT_NODE_CAP};

use crate::circuit::{FlatCircuit, Gate, QubitId, QubitRole};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoolformError {
    #[error("expression store exceeded {cap} nodes after gate {gate}")]
    SizeCap { cap: usize, gate: usize },
}

/// Current formula `b_q` for every qubit of a circuit, indexed by [`QubitId`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormulaState {
    formulas: Vec<ExprId>,
}

impl FormulaState {
    pub fn get(&self, q: QubitId) -> ExprId {
        self.formulas[q.index()]
    }

    pub fn len(&self) -> usize {
        self.formulas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.formulas.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (QubitId, ExprId)> + '_ {
        self.formulas
            .iter()
            .enumerate()
            .map(|(i, &e)| (QubitId(i as u32), e))
    }
}

pub fn init_state(store: &mut ExprStore, c: &FlatCircuit) -> FormulaState {
    let formulas = c
        .qubits
        .iter()
        .map(|d| match d.role {
            QubitRole::Clean => ExprId::FALSE,
            QubitRole::BorrowVerify | QubitRole::BorrowSkip => store.var(d.id),
        })
        .collect();
    FormulaState { formulas }
}

pub fn apply_gate(store: &mut ExprStore, s: &mut FormulaState, g: &Gate) {
    match g {
        Gate::Not { target } => {
            let t = target.index();
            s.formulas[t] = store.not(s.formulas[t]);
        }
        Gate::Mcx { controls, target } => {
            let product = store.and(controls.iter().map(|c| s.formulas[c.index()]));
            let t = target.index();
            s.formulas[t] = store.xor2(s.formulas[t], product);
        }
    }
}

/// Folds [`apply_gate`] over the circuit, checking the store's node cap
/// after every gate.
pub fn track(store: &mut ExprStore, c: &FlatCircuit) -> Result<FormulaState, BoolformError> {
    let mut s = init_state(store, c);
    for (i, g) in c.gates.iter().enumerate() {
        apply_gate(store, &mut s, g);
        if store.over_cap() {
            return Err(BoolformError::SizeCap {
                cap: store.cap(),
                gate: i,
            });
        }
    }
    Ok(s)
}

/// `¬(b_q → q)`, i.e. `b_q ∧ ¬q`. Unsatisfiable iff `q = 0` forces `b_q = 0`.
pub fn cond_restore_zero(store: &mut ExprStore, q: QubitId, s: &FormulaState) -> ExprId {
    let v = store.var(q);
    let nv = store.not(v);
    store.and2(s.get(q), nv)
}

/// `⋁_{q' ≠ q} b_q'[0/q] ⊕ b_q'[1/q]`. Unsatisfiable iff no other qubit's
/// final value depends on the initial value of `q`.
pub fn cond_restore_plus(store: &mut ExprStore, q: QubitId, s: &FormulaState) -> ExprId {
    let terms: Vec<ExprId> = restore_plus_terms(store, q, s)
        .into_iter()
        .map(|(_, d)| d)
        .collect();
    store.or(terms)
}

/// The individual disjuncts of [`cond_restore_plus`] that are not already
/// `false` after simplification, paired with the qubit they describe.
pub fn restore_plus_terms(
    store: &mut ExprStore,
    q: QubitId,
    s: &FormulaState,
) -> Vec<(QubitId, ExprId)> {
    let mut zero = SubstCache::new(q, false);
    let mut one = SubstCache::new(q, true);
    let mut terms = Vec::new();
    for (other, b) in s.iter() {
        if other == q {
            continue;
        }
        let b0 = store.substitute(b, &mut zero);
        let b1 = store.substitute(b, &mut one);
        let d = store.xor2(b0, b1);
        if d != ExprId::FALSE {
            terms.push((other, d));
        }
    }
    terms
}

/// Renders every `b_q` in prefix notation, one `name = formula` per line.
pub fn dump_state(store: &ExprStore, c: &FlatCircuit, s: &FormulaState) -> String {
    let name = |q: QubitId| c.qubit_name(q);
    s.iter()
        .map(|(q, e)| format!("{} = {}\n", name(q), store.to_prefix(e, &name, 4096)))
        .collect()
}
