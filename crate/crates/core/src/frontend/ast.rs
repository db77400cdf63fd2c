use std::fmt::{self, Write as _};

use super::Location;

/// Compile-time integer expression.
///
/// Shapes mirror the grammar's `expr`/`term`/`factor` layering: the right
/// operand of `Sum`/`Difference` is a term, the right operand of `Product`
/// is a factor, and `Negation` wraps a term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Literal(i64),
    Ident(String),
    Negation(Box<Expr>),
    Sum(Box<Expr>, Box<Expr>),
    Difference(Box<Expr>, Box<Expr>),
    Product(Box<Expr>, Box<Expr>),
    Paren(Box<Expr>),
}

/// A register reference such as `q[i - 1]` or `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reg {
    pub name: String,
    pub index: Option<Expr>,
    pub loc: Location,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StmtKind {
    Let(String, Expr),
    Borrow(Reg),
    BorrowSkip(Reg),
    Alloc(Reg),
    Release(String),
    X(Reg),
    Cnot(Reg, Reg),
    Ccnot(Reg, Reg, Reg),
    For {
        var: String,
        from: Expr,
        to: Expr,
        body: Vec<Stmt>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub loc: Location,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProgramAst {
    pub statements: Vec<Stmt>,
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Literal(n) => write!(f, "{n}"),
            Expr::Ident(name) => f.write_str(name),
            Expr::Negation(e) => write!(f, "-{e}"),
            Expr::Sum(a, b) => write!(f, "{a} + {b}"),
            Expr::Difference(a, b) => write!(f, "{a} - {b}"),
            Expr::Product(a, b) => write!(f, "{a} * {b}"),
            Expr::Paren(e) => write!(f, "({e})"),
        }
    }
}

impl fmt::Display for Reg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.index {
            Some(idx) => write!(f, "{}[{idx}]", self.name),
            None => f.write_str(&self.name),
        }
    }
}

fn print_block(out: &mut String, stmts: &[Stmt], depth: usize) {
    for stmt in stmts {
        let pad = "    ".repeat(depth);
        let _ = match &stmt.kind {
            StmtKind::Let(name, e) => writeln!(out, "{pad}let {name} = {e};"),
            StmtKind::Borrow(r) => writeln!(out, "{pad}borrow {r};"),
            StmtKind::BorrowSkip(r) => writeln!(out, "{pad}borrow@ {r};"),
            StmtKind::Alloc(r) => writeln!(out, "{pad}alloc {r};"),
            StmtKind::Release(name) => writeln!(out, "{pad}release {name};"),
            StmtKind::X(r) => writeln!(out, "{pad}X[{r}];"),
            StmtKind::Cnot(a, b) => writeln!(out, "{pad}CNOT[{a}, {b}];"),
            StmtKind::Ccnot(a, b, c) => writeln!(out, "{pad}CCNOT[{a}, {b}, {c}];"),
            StmtKind::For {
                var,
                from,
                to,
                body,
            } => {
                let _ = writeln!(out, "{pad}for {var} = {from} to {to} {{");
                print_block(out, body, depth + 1);
                writeln!(out, "{pad}}}")
            }
        };
    }
}

impl fmt::Display for ProgramAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        print_block(&mut out, &self.statements, 0);
        f.write_str(&out)
    }
}

/// Structural equality that ignores source locations.
pub fn same_structure(a: &ProgramAst, b: &ProgramAst) -> bool {
    fn regs(a: &Reg, b: &Reg) -> bool {
        a.name == b.name && a.index == b.index
    }
    fn stmts(a: &[Stmt], b: &[Stmt]) -> bool {
        a.len() == b.len()
            && a.iter().zip(b).all(|(x, y)| match (&x.kind, &y.kind) {
                (StmtKind::Let(n1, e1), StmtKind::Let(n2, e2)) => n1 == n2 && e1 == e2,
                (StmtKind::Borrow(r1), StmtKind::Borrow(r2))
                | (StmtKind::BorrowSkip(r1), StmtKind::BorrowSkip(r2))
                | (StmtKind::Alloc(r1), StmtKind::Alloc(r2))
                | (StmtKind::X(r1), StmtKind::X(r2)) => regs(r1, r2),
                (StmtKind::Release(n1), StmtKind::Release(n2)) => n1 == n2,
                (StmtKind::Cnot(a1, b1), StmtKind::Cnot(a2, b2)) => regs(a1, a2) && regs(b1, b2),
                (StmtKind::Ccnot(a1, b1, c1), StmtKind::Ccnot(a2, b2, c2)) => {
                    regs(a1, a2) && regs(b1, b2) && regs(c1, c2)
                }
                (
                    StmtKind::For {
                        var: v1,
                        from: f1,
                        to: t1,
                        body: b1,
                    },
                    StmtKind::For {
                        var: v2,
                        from: f2,
                        to: t2,
                        body: b2,
                    },
                ) => v1 == v2 && f1 == f2 && t1 == t2 && stmts(b1, b2),
                _ => false,
            })
    }
    stmts(&a.statements, &b.statements)
}
