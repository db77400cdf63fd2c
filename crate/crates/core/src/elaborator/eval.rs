use std::collections::HashMap;

use crate::frontend::Expr;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalError {
    UnboundIdentifier(String),
    Overflow,
}

/// Evaluates a compile-time expression with checked 64-bit arithmetic.
pub fn eval_expr(e: &Expr, env: &HashMap<String, i64>) -> Result<i64, EvalError> {
    let bin = |a: &Expr, b: &Expr, op: fn(i64, i64) -> Option<i64>| -> Result<i64, EvalError> {
        op(eval_expr(a, env)?, eval_expr(b, env)?).ok_or(EvalError::Overflow)
    };
    match e {
        Expr::Literal(n) => Ok(*n),
        Expr::Ident(name) => env
            .get(name)
            .copied()
            .ok_or_else(|| EvalError::UnboundIdentifier(name.clone())),
        Expr::Negation(inner) => eval_expr(inner, env)?
            .checked_neg()
            .ok_or(EvalError::Overflow),
        Expr::Sum(a, b) => bin(a, b, i64::checked_add),
        Expr::Difference(a, b) => bin(a, b, i64::checked_sub),
        Expr::Product(a, b) => bin(a, b, i64::checked_mul),
        Expr::Paren(inner) => eval_expr(inner, env),
    }
}

/// Inclusive loop bounds; the direction is taken from the evaluated bounds.
#[derive(Debug, Clone)]
pub struct LoopRange {
    next: Option<i64>,
    last: i64,
    step: i64,
}

impl Iterator for LoopRange {
    type Item = i64;

    fn next(&mut self) -> Option<i64> {
        let cur = self.next?;
        self.next = if cur == self.last {
            None
        } else {
            Some(cur + self.step)
        };
        Some(cur)
    }
}

pub fn loop_range(from: i64, to: i64) -> LoopRange {
    LoopRange {
        next: Some(from),
        last: to,
        step: if from <= to { 1 } else { -1 },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_program;
    use crate::frontend::StmtKind;

    fn expr(src: &str) -> Expr {
        let p = parse_program(&format!("let _ = {src};")).unwrap();
        match &p.statements[0].kind {
            StmtKind::Let(_, e) => e.clone(),
            _ => unreachable!(),
        }
    }

    fn env(pairs: &[(&str, i64)]) -> HashMap<String, i64> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn arithmetic() {
        assert_eq!(
            eval_expr(&expr("m + (m - 1)"), &env(&[("m", 1750)])),
            Ok(3499)
        );
        assert_eq!(eval_expr(&expr("2 * i - 1"), &env(&[("i", 3)])), Ok(5));
        assert_eq!(eval_expr(&expr("-(3) + 3"), &env(&[])), Ok(0));
        assert_eq!(eval_expr(&expr("-2 * 3 + 10"), &env(&[])), Ok(4));
    }

    #[test]
    fn errors() {
        assert_eq!(
            eval_expr(&expr("k + 1"), &env(&[])),
            Err(EvalError::UnboundIdentifier("k".into()))
        );
        assert_eq!(
            eval_expr(&expr("9223372036854775807 + 1"), &env(&[])),
            Err(EvalError::Overflow)
        );
        assert_eq!(
            eval_expr(&expr("3037000500 * 3037000500"), &env(&[])),
            Err(EvalError::Overflow)
        );
    }

    #[test]
    fn ranges() {
        assert_eq!(loop_range(2, 4).collect::<Vec<_>>(), vec![2, 3, 4]);
        assert_eq!(loop_range(4, 2).collect::<Vec<_>>(), vec![4, 3, 2]);
        assert_eq!(loop_range(3, 3).collect::<Vec<_>>(), vec![3]);
        assert_eq!(loop_range(i64::MAX - 1, i64::MAX).count(), 2);
    }
}
