use std::collections::HashMap;

use super::{Cnf, Lit, SolveError};
use crate::boolform::{ExprId, ExprStore, Node};

pub const DEFAULT_CLAUSE_CAP: usize = 200_000_000;

/// Tseitin encoding with full biconditionals.
///
/// Every input variable and every `And`/`Xor` node gets one CNF variable;
/// shared nodes are encoded once and `Not` is a negated literal. An n-ary
/// `Xor` is chained left to right through binary intermediates. The root
/// literal is returned separately and is not part of the clause set; the
/// constants encode as no root (`true`: no clauses, `false`: one empty
/// clause).
pub fn tseitin(store: &ExprStore, e: ExprId) -> (Cnf, Option<Lit>) {
    tseitin_with_cap(store, e, usize::MAX).expect("uncapped encoding")
}

pub fn tseitin_with_cap(
    store: &ExprStore,
    e: ExprId,
    cap: usize,
) -> Result<(Cnf, Option<Lit>), SolveError> {
    let mut cnf = Cnf::default();
    match store.node(e) {
        Node::False => {
            cnf.clauses.push(Vec::new());
            return Ok((cnf, None));
        }
        Node::True => return Ok((cnf, None)),
        _ => {}
    }

    let mut lit_of: HashMap<ExprId, Lit> = HashMap::new();
    for id in store.reachable(e) {
        let lit = match store.node(id) {
            Node::False | Node::True => unreachable!("canonical formulas have no nested constants"),
            Node::Var(q) => {
                let v = cnf.fresh_var();
                cnf.inputs.push((*q, v));
                Lit::positive(v)
            }
            Node::Not(c) => !lit_of[c],
            Node::And(cs) => {
                let out = Lit::positive(cnf.fresh_var());
                let ins: Vec<Lit> = cs.iter().map(|c| lit_of[c]).collect();
                for &l in &ins {
                    cnf.add_clause([!out, l]);
                }
                cnf.add_clause(std::iter::once(out).chain(ins.iter().map(|&l| !l)));
                out
            }
            Node::Xor(cs) => {
                let mut acc = lit_of[&cs[0]];
                for c in &cs[1..] {
                    let l = lit_of[c];
                    let t = Lit::positive(cnf.fresh_var());
                    cnf.add_clause([!t, acc, l]);
                    cnf.add_clause([!t, !acc, !l]);
                    cnf.add_clause([t, !acc, l]);
                    cnf.add_clause([t, acc, !l]);
                    acc = t;
                }
                acc
            }
        };
        if cnf.clauses.len() > cap {
            return Err(SolveError::SizeCap { cap });
        }
        lit_of.insert(id, lit);
    }
    Ok((cnf, Some(lit_of[&e])))
}
