use std::fmt::Write as _;

use crate::boolform::{ExprId, ExprStore, Node};
use crate::circuit::QubitId;

const RESERVED: &[&str] = &[
    "and",
    "or",
    "not",
    "xor",
    "true",
    "false",
    "let",
    "ite",
    "distinct",
    "par",
    "forall",
    "exists",
    "as",
    "assert",
    "define-fun",
    "declare-const",
    "check-sat",
    "exit",
    "Bool",
];

fn symbol(name: String) -> String {
    if RESERVED.contains(&name.as_str()) {
        format!("|{name}|")
    } else {
        name
    }
}

/// Pure Boolean SMT-LIB2 script asserting `e`.
///
/// Inputs are declared in variable order with `declare-const`; every `And`
/// and `Xor` node gets a `define-fun` named `$n<id>` so shared subterms are
/// written once; a single `assert` on the root is followed by `check-sat`.
pub fn emit_smtlib(store: &ExprStore, e: ExprId, name: &dyn Fn(QubitId) -> String) -> String {
    let mut out = String::new();
    let nodes = store.reachable(e);
    for &id in &nodes {
        if let Node::Var(q) = store.node(id) {
            let _ = writeln!(out, "(declare-const {} Bool)", symbol(name(*q)));
        }
    }
    let term = |id: ExprId| -> String {
        fn atom(store: &ExprStore, id: ExprId, name: &dyn Fn(QubitId) -> String) -> String {
            match store.node(id) {
                Node::False => "false".into(),
                Node::True => "true".into(),
                Node::Var(q) => symbol(name(*q)),
                Node::Not(c) => format!("(not {})", atom(store, *c, name)),
                Node::And(_) | Node::Xor(_) => format!("$n{}", id.index()),
            }
        }
        atom(store, id, name)
    };
    for &id in &nodes {
        let (op, cs) = match store.node(id) {
            Node::And(cs) => ("and", cs),
            Node::Xor(cs) => ("xor", cs),
            _ => continue,
        };
        let args: Vec<String> = cs.iter().map(|&c| term(c)).collect();
        let _ = writeln!(
            out,
            "(define-fun $n{} () Bool ({op} {}))",
            id.index(),
            args.join(" ")
        );
    }
    let _ = writeln!(out, "(assert {})", term(e));
    out.push_str("(check-sat)\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn name(q: QubitId) -> String {
        ["a", "b", "and"][q.index()].to_string()
    }

    #[test]
    fn false_script() {
        let s = ExprStore::new();
        assert_eq!(
            emit_smtlib(&s, ExprId::FALSE, &name),
            "(assert false)\n(check-sat)\n"
        );
    }

    #[test]
    fn shared_nodes_are_defined_once() {
        let mut s = ExprStore::new();
        let a = s.var(QubitId(0));
        let b = s.var(QubitId(1));
        let ab = s.and2(a, b);
        let nab = s.not(ab);
        let x = s.xor2(ab, a);
        let e = s.or([x, nab]);
        let text = emit_smtlib(&s, e, &name);
        assert_eq!(text.matches("(define-fun").count(), 3);
        assert!(text.starts_with("(declare-const a Bool)\n(declare-const b Bool)\n"));
        assert!(text.ends_with("(check-sat)\n"));
        assert_eq!(text.matches("(assert").count(), 1);
    }

    #[test]
    fn reserved_names_are_quoted() {
        let mut s = ExprStore::new();
        let v = s.var(QubitId(2));
        assert!(emit_smtlib(&s, v, &name).contains("(declare-const |and| Bool)"));
    }
}
