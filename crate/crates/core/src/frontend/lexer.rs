use std::fmt;

use super::{FrontendError, Location};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Keyword {
    Let,
    Borrow,
    BorrowSkip,
    Alloc,
    Release,
    X,
    Cnot,
    Ccnot,
    For,
    To,
}

impl Keyword {
    pub fn as_str(self) -> &'static str {
        match self {
            Keyword::Let => "let",
            Keyword::Borrow => "borrow",
            Keyword::BorrowSkip => "borrow@",
            Keyword::Alloc => "alloc",
            Keyword::Release => "release",
            Keyword::X => "X",
            Keyword::Cnot => "CNOT",
            Keyword::Ccnot => "CCNOT",
            Keyword::For => "for",
            Keyword::To => "to",
        }
    }

    fn from_word(word: &str) -> Option<Keyword> {
        Some(match word {
            "let" => Keyword::Let,
            "borrow" => Keyword::Borrow,
            "alloc" => Keyword::Alloc,
            "release" => Keyword::Release,
            "X" => Keyword::X,
            "CNOT" => Keyword::Cnot,
            "CCNOT" => Keyword::Ccnot,
            "for" => Keyword::For,
            "to" => Keyword::To,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Keyword(Keyword),
    Ident(String),
    Number(i64),
    /// One of `+ - * =`.
    Operator(char),
    /// One of `[ ] ( ) { } , ;`.
    Punct(char),
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Keyword(k) => write!(f, "'{}'", k.as_str()),
            TokenKind::Ident(name) => write!(f, "identifier '{name}'"),
            TokenKind::Number(n) => write!(f, "number {n}"),
            TokenKind::Operator(c) | TokenKind::Punct(c) => write!(f, "'{c}'"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    pub loc: Location,
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    src: &'a str,
    line: usize,
    column: usize,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Cursor {
            chars: src.char_indices().peekable(),
            src,
            line: 1,
            column: 1,
        }
    }

    fn loc(&self) -> Location {
        Location {
            line: self.line,
            column: self.column,
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().map(|&(_, c)| c)
    }

    fn peek_second(&self) -> Option<char> {
        let mut it = self.chars.clone();
        it.next();
        it.next().map(|(_, c)| c)
    }

    fn offset(&mut self) -> usize {
        self.chars.peek().map_or(self.src.len(), |&(i, _)| i)
    }

    fn bump(&mut self) -> Option<char> {
        let (_, c) = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }
}

/// Splits QBorrow source text into tokens, dropping whitespace and comments.
pub fn tokenize(source: &str) -> Result<Vec<Token>, FrontendError> {
    let mut cur = Cursor::new(source);
    let mut tokens = Vec::new();

    while let Some(c) = cur.peek() {
        let loc = cur.loc();
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                cur.bump();
            }
            '/' if cur.peek_second() == Some('/') => {
                while let Some(c) = cur.peek() {
                    if c == '\r' || c == '\n' {
                        break;
                    }
                    cur.bump();
                }
            }
            '/' if cur.peek_second() == Some('*') => {
                cur.bump();
                cur.bump();
                let mut closed = false;
                while let Some(c) = cur.bump() {
                    if c == '*' && cur.peek() == Some('/') {
                        cur.bump();
                        closed = true;
                        break;
                    }
                }
                if !closed {
                    return Err(FrontendError::UnterminatedComment { at: loc });
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = cur.offset();
                while matches!(cur.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
                    cur.bump();
                }
                let end = cur.offset();
                let word = &source[start..end];
                let kind = if word == "borrow" && cur.peek() == Some('@') {
                    cur.bump();
                    TokenKind::Keyword(Keyword::BorrowSkip)
                } else if let Some(kw) = Keyword::from_word(word) {
                    TokenKind::Keyword(kw)
                } else {
                    TokenKind::Ident(word.to_string())
                };
                let lexeme = source[start..cur.offset()].to_string();
                tokens.push(Token { kind, lexeme, loc });
            }
            c if c.is_ascii_digit() => {
                let start = cur.offset();
                while matches!(cur.peek(), Some(c) if c.is_ascii_digit()) {
                    cur.bump();
                }
                let lexeme = source[start..cur.offset()].to_string();
                let value = lexeme
                    .parse::<i64>()
                    .map_err(|_| FrontendError::IntegerOverflow {
                        at: loc,
                        literal: lexeme.clone(),
                    })?;
                tokens.push(Token {
                    kind: TokenKind::Number(value),
                    lexeme,
                    loc,
                });
            }
            '+' | '-' | '*' | '=' => {
                cur.bump();
                tokens.push(Token {
                    kind: TokenKind::Operator(c),
                    lexeme: c.to_string(),
                    loc,
                });
            }
            '[' | ']' | '(' | ')' | '{' | '}' | ',' | ';' => {
                cur.bump();
                tokens.push(Token {
                    kind: TokenKind::Punct(c),
                    lexeme: c.to_string(),
                    loc,
                });
            }
            other => {
                return Err(FrontendError::UnexpectedChar {
                    at: loc,
                    found: other,
                })
            }
        }
    }
    Ok(tokens)
}
