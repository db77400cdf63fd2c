use std::fmt::Write as _;

use thiserror::Error;

use super::{Cnf, Lit, Var};
use crate::circuit::QubitId;

/// Writes `cnf` plus the asserted root as a DIMACS file.
///
/// Input variables are listed first as `c var <n> = <qubit>` comments. The
/// header counts the root unit clause when there is one.
pub fn emit_dimacs(cnf: &Cnf, root: Option<Lit>, name: &dyn Fn(QubitId) -> String) -> String {
    let mut out = String::new();
    for &(q, v) in &cnf.inputs {
        let _ = writeln!(out, "c var {} = {}", v.0, name(q));
    }
    let _ = writeln!(
        out,
        "p cnf {} {}",
        cnf.num_vars,
        cnf.clauses.len() + usize::from(root.is_some())
    );
    for clause in cnf
        .clauses
        .iter()
        .map(Vec::as_slice)
        .chain(root.as_ref().map(std::slice::from_ref))
    {
        for l in clause {
            let _ = write!(out, "{l} ");
        }
        out.push_str("0\n");
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DimacsError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
}

/// Reads a DIMACS CNF file. Comment lines of the form `c var <n> = <name>`
/// are returned as the input mapping.
pub fn parse_dimacs(text: &str) -> Result<(Cnf, Vec<(Var, String)>), DimacsError> {
    let err = |line: usize, message: &str| DimacsError::Malformed {
        line,
        message: message.to_string(),
    };
    let mut cnf = Cnf::default();
    let mut names = Vec::new();
    let mut declared: Option<(u32, usize)> = None;
    let mut current: Vec<Lit> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('c') {
            let mut words = rest.split_whitespace();
            if let (Some("var"), Some(v), Some("="), Some(name)) =
                (words.next(), words.next(), words.next(), words.next())
            {
                let v: u32 = v
                    .parse()
                    .map_err(|_| err(lineno, "bad variable in mapping comment"))?;
                names.push((Var(v), name.to_string()));
            }
            continue;
        }
        if let Some(rest) = line.strip_prefix("p cnf") {
            let nums: Vec<&str> = rest.split_whitespace().collect();
            let [v, c] = nums.as_slice() else {
                return Err(err(lineno, "header must be `p cnf <vars> <clauses>`"));
            };
            let v = v.parse().map_err(|_| err(lineno, "bad variable count"))?;
            let c = c.parse().map_err(|_| err(lineno, "bad clause count"))?;
            declared = Some((v, c));
            cnf.num_vars = v;
            continue;
        }
        let Some((num_vars, _)) = declared else {
            return Err(err(lineno, "clause before header"));
        };
        for tok in line.split_whitespace() {
            let x: i32 = tok.parse().map_err(|_| err(lineno, "bad literal"))?;
            if x == 0 {
                cnf.clauses.push(std::mem::take(&mut current));
            } else {
                if x.unsigned_abs() > num_vars {
                    return Err(err(lineno, "literal exceeds declared variable count"));
                }
                current.push(Lit::from_dimacs(x));
            }
        }
    }
    let Some((_, num_clauses)) = declared else {
        return Err(err(0, "missing header"));
    };
    if !current.is_empty() {
        return Err(err(text.lines().count(), "unterminated clause"));
    }
    if cnf.clauses.len() != num_clauses {
        return Err(err(0, "clause count does not match header"));
    }
    Ok((cnf, names))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolform::{ExprId, ExprStore};
    use crate::satcore::tseitin;

    fn name(q: QubitId) -> String {
        format!("q{}", q.0)
    }

    #[test]
    fn empty_clause_file() {
        let s = ExprStore::new();
        let (cnf, root) = tseitin(&s, ExprId::FALSE);
        assert_eq!(emit_dimacs(&cnf, root, &name), "p cnf 0 1\n0\n");
    }

    #[test]
    fn single_variable_file() {
        let mut s = ExprStore::new();
        let q = s.var(QubitId(0));
        let (cnf, root) = tseitin(&s, q);
        assert_eq!(
            emit_dimacs(&cnf, root, &name),
            "c var 1 = q0\np cnf 1 1\n1 0\n"
        );
    }

    #[test]
    fn parse_round_trip() {
        let mut s = ExprStore::new();
        let a = s.var(QubitId(0));
        let b = s.var(QubitId(1));
        let e = s.xor2(a, b);
        let (cnf, root) = tseitin(&s, e);
        let text = emit_dimacs(&cnf, root, &name);
        let (parsed, names) = parse_dimacs(&text).unwrap();
        assert_eq!(parsed.num_vars, cnf.num_vars);
        assert_eq!(parsed.clauses.len(), cnf.clauses.len() + 1);
        assert_eq!(names, vec![(Var(1), "q0".into()), (Var(2), "q1".into())]);
    }

    #[test]
    fn malformed_inputs() {
        assert!(parse_dimacs("1 0\n").is_err());
        assert!(parse_dimacs("p cnf 1 1\n2 0\n").is_err());
        assert!(parse_dimacs("p cnf 1 2\n1 0\n").is_err());
        assert!(parse_dimacs("p cnf 1 1\n1\n").is_err());
    }
}
