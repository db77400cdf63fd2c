use super::ast::{Expr, ProgramAst, Reg, Stmt, StmtKind};
use super::lexer::{Keyword, Token, TokenKind};
use super::{FrontendError, Location};

/// Recursive-descent parser over the token stream of one program.
struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
}

const STATEMENT_START: &[&str] = &[
    "'let'",
    "'borrow'",
    "'borrow@'",
    "'alloc'",
    "'release'",
    "'X'",
    "'CNOT'",
    "'CCNOT'",
    "'for'",
];
const FACTOR_START: &[&str] = &["number", "identifier", "'('"];
const EXPR_START: &[&str] = &["number", "identifier", "'('", "'-'", "'+'"];

impl<'t> Parser<'t> {
    fn peek(&self) -> Option<&'t Token> {
        self.tokens.get(self.pos)
    }

    fn end_loc(&self) -> Location {
        self.tokens
            .last()
            .map_or(Location { line: 1, column: 1 }, |t| Location {
                line: t.loc.line,
                column: t.loc.column + t.lexeme.chars().count(),
            })
    }

    fn error(&self, expected: &[&str]) -> FrontendError {
        let (at, found) = match self.peek() {
            Some(tok) => (tok.loc, tok.kind.to_string()),
            None => (self.end_loc(), "end of input".to_string()),
        };
        FrontendError::Parse {
            at,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found,
        }
    }

    fn at_punct(&self, c: char) -> bool {
        matches!(self.peek(), Some(Token { kind: TokenKind::Punct(p), .. }) if *p == c)
    }

    fn at_operator(&self, c: char) -> bool {
        matches!(self.peek(), Some(Token { kind: TokenKind::Operator(p), .. }) if *p == c)
    }

    fn expect_punct(&mut self, c: char) -> Result<(), FrontendError> {
        if self.at_punct(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&[&format!("'{c}'")]))
        }
    }

    fn expect_operator(&mut self, c: char) -> Result<(), FrontendError> {
        if self.at_operator(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&[&format!("'{c}'")]))
        }
    }

    fn expect_keyword(&mut self, kw: Keyword) -> Result<(), FrontendError> {
        match self.peek() {
            Some(Token {
                kind: TokenKind::Keyword(k),
                ..
            }) if *k == kw => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.error(&[&format!("'{}'", kw.as_str())])),
        }
    }

    fn expect_ident(&mut self) -> Result<(String, Location), FrontendError> {
        match self.peek() {
            Some(Token {
                kind: TokenKind::Ident(name),
                loc,
                ..
            }) => {
                self.pos += 1;
                Ok((name.clone(), *loc))
            }
            _ => Err(self.error(&["identifier"])),
        }
    }

    fn program(&mut self) -> Result<ProgramAst, FrontendError> {
        let mut statements = vec![self.statement()?];
        while self.peek().is_some() {
            statements.push(self.statement()?);
        }
        Ok(ProgramAst { statements })
    }

    fn statement(&mut self) -> Result<Stmt, FrontendError> {
        let Some(tok) = self.peek() else {
            return Err(self.error(STATEMENT_START));
        };
        let loc = tok.loc;
        let TokenKind::Keyword(kw) = tok.kind else {
            return Err(self.error(STATEMENT_START));
        };
        if kw == Keyword::To {
            return Err(self.error(STATEMENT_START));
        }
        self.pos += 1;
        let kind = match kw {
            Keyword::Let => {
                let (name, _) = self.expect_ident()?;
                self.expect_operator('=')?;
                let e = self.expr()?;
                self.expect_punct(';')?;
                StmtKind::Let(name, e)
            }
            Keyword::Borrow | Keyword::BorrowSkip | Keyword::Alloc => {
                let r = self.reg()?;
                self.expect_punct(';')?;
                match kw {
                    Keyword::Borrow => StmtKind::Borrow(r),
                    Keyword::BorrowSkip => StmtKind::BorrowSkip(r),
                    _ => StmtKind::Alloc(r),
                }
            }
            Keyword::Release => {
                let (name, _) = self.expect_ident()?;
                self.expect_punct(';')?;
                StmtKind::Release(name)
            }
            Keyword::X => {
                self.expect_punct('[')?;
                let r = self.reg()?;
                self.expect_punct(']')?;
                self.expect_punct(';')?;
                StmtKind::X(r)
            }
            Keyword::Cnot => {
                self.expect_punct('[')?;
                let a = self.reg()?;
                self.expect_punct(',')?;
                let b = self.reg()?;
                self.expect_punct(']')?;
                self.expect_punct(';')?;
                StmtKind::Cnot(a, b)
            }
            Keyword::Ccnot => {
                self.expect_punct('[')?;
                let a = self.reg()?;
                self.expect_punct(',')?;
                let b = self.reg()?;
                self.expect_punct(',')?;
                let c = self.reg()?;
                self.expect_punct(']')?;
                self.expect_punct(';')?;
                StmtKind::Ccnot(a, b, c)
            }
            Keyword::For => {
                let (var, _) = self.expect_ident()?;
                self.expect_operator('=')?;
                let from = self.expr()?;
                self.expect_keyword(Keyword::To)?;
                let to = self.expr()?;
                self.expect_punct('{')?;
                let mut body = Vec::new();
                while !self.at_punct('}') {
                    if self.peek().is_none() {
                        let mut expected = STATEMENT_START.to_vec();
                        expected.push("'}'");
                        return Err(self.error(&expected));
                    }
                    body.push(self.statement()?);
                }
                self.pos += 1;
                StmtKind::For {
                    var,
                    from,
                    to,
                    body,
                }
            }
            Keyword::To => unreachable!(),
        };
        Ok(Stmt { kind, loc })
    }

    fn reg(&mut self) -> Result<Reg, FrontendError> {
        let (name, loc) = self.expect_ident()?;
        let index = if self.at_punct('[') {
            self.pos += 1;
            let e = self.expr()?;
            self.expect_punct(']')?;
            Some(e)
        } else {
            None
        };
        Ok(Reg { name, index, loc })
    }

    fn expr(&mut self) -> Result<Expr, FrontendError> {
        let mut lhs = if self.at_operator('-') {
            self.pos += 1;
            Expr::Negation(Box::new(self.term()?))
        } else if self.at_operator('+') {
            self.pos += 1;
            self.term()?
        } else {
            if !matches!(
                self.peek().map(|t| &t.kind),
                Some(TokenKind::Number(_) | TokenKind::Ident(_) | TokenKind::Punct('('))
            ) {
                return Err(self.error(EXPR_START));
            }
            self.term()?
        };
        loop {
            if self.at_operator('+') {
                self.pos += 1;
                lhs = Expr::Sum(Box::new(lhs), Box::new(self.term()?));
            } else if self.at_operator('-') {
                self.pos += 1;
                lhs = Expr::Difference(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, FrontendError> {
        let mut lhs = self.factor()?;
        while self.at_operator('*') {
            self.pos += 1;
            lhs = Expr::Product(Box::new(lhs), Box::new(self.factor()?));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr, FrontendError> {
        match self.peek().map(|t| &t.kind) {
            Some(TokenKind::Number(n)) => {
                self.pos += 1;
                Ok(Expr::Literal(*n))
            }
            Some(TokenKind::Ident(name)) => {
                self.pos += 1;
                Ok(Expr::Ident(name.clone()))
            }
            Some(TokenKind::Punct('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect_punct(')')?;
                Ok(Expr::Paren(Box::new(e)))
            }
            _ => Err(self.error(FACTOR_START)),
        }
    }
}

/// Parses a token stream into a program. The first error aborts parsing.
pub fn parse(tokens: &[Token]) -> Result<ProgramAst, FrontendError> {
    Parser { tokens, pos: 0 }.program()
}
