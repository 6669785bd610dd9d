//! Recursive-descent parser for the ASCII formula syntax.
//!
//! ```text
//! imp   := and ["->" imp]
//! and   := unary {"&" unary}
//! unary := "~" unary | "@" nominal unary | "dia" modality unary
//!        | "box" modality unary | modality unary | atom
//! atom  := "bot" | prop | nominal | pred "(" term {"," term} ")"
//!        | "?" var ["(" term ")"] | "(" imp ")"
//! ```
//!
//! A declared modality name doubles as its own prefix operator, so `D p` and
//! `box D p` denote the same formula. When a modality is itself named `box`,
//! `box m X` with `m` a declared modality is read as the explicit form.

use thiserror::Error;

use super::{Formula, Ident, Signature, Sort};
use crate::theory::{Pattern, TermPattern};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SyntaxError {
    #[error("unexpected character `{ch}` at offset {pos}")]
    Lex { pos: usize, ch: char },
    #[error("expected {expected} at offset {pos}, found {found}")]
    Unexpected {
        pos: usize,
        expected: String,
        found: String,
    },
    #[error("undeclared identifier `{name}` at offset {pos}")]
    Undeclared { pos: usize, name: String },
    #[error("`{name}` at offset {pos} is a {found}, expected a {expected}")]
    Sort {
        pos: usize,
        name: String,
        expected: String,
        found: Sort,
    },
    #[error("predicate `{name}` at offset {pos} has arity {expected}, applied to {found} terms")]
    Arity {
        pos: usize,
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("metavariable `?{name}` at offset {pos} is not allowed in a ground formula")]
    Metavariable { pos: usize, name: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Var(String),
    LParen,
    RParen,
    Tilde,
    Amp,
    Arrow,
    At,
    Comma,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Var(s) => format!("`?{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Tilde => "`~`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::At => "`@`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, SyntaxError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let word_end = |mut j: usize| {
        while j < bytes.len()
            && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_' || bytes[j] == b'\'')
        {
            j += 1;
        }
        j
    };
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'~' => Tok::Tilde,
            b'&' => Tok::Amp,
            b'@' => Tok::At,
            b',' => Tok::Comma,
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 1;
                Tok::Arrow
            }
            b'?' if bytes
                .get(i + 1)
                .is_some_and(|b| b.is_ascii_alphabetic() || *b == b'_') =>
            {
                let end = word_end(i + 1);
                let name = text[i + 1..end].to_string();
                i = end - 1;
                Tok::Var(name)
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let end = word_end(i);
                let name = text[i..end].to_string();
                i = end - 1;
                Tok::Ident(name)
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(SyntaxError::Lex { pos: i, ch });
            }
        };
        i += 1;
        out.push((start, tok));
    }
    out.push((text.len(), Tok::Eof));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    sig: &'a Signature,
    allow_vars: bool,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> (usize, Tok) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &str) -> SyntaxError {
        SyntaxError::Unexpected {
            pos: self.offset(),
            expected: expected.into(),
            found: self.peek().describe(),
        }
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<(), SyntaxError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn ident_of_sort(&mut self, want: Sort, what: &str) -> Result<Ident, SyntaxError> {
        let (pos, tok) = self.bump();
        let Tok::Ident(name) = tok else {
            self.pos -= 1;
            return Err(self.unexpected(what));
        };
        match self.sig.sort_of(&name) {
            None => Err(SyntaxError::Undeclared { pos, name }),
            Some(s) if s == want => Ok(Ident::new(&name)),
            Some(found) => Err(SyntaxError::Sort {
                pos,
                name,
                expected: what.into(),
                found,
            }),
        }
    }

    fn var(&mut self, pos: usize, name: String) -> Result<Ident, SyntaxError> {
        if self.allow_vars {
            Ok(Ident::new(&name))
        } else {
            Err(SyntaxError::Metavariable { pos, name })
        }
    }

    fn imp(&mut self) -> Result<Pattern, SyntaxError> {
        let lhs = self.and()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.imp()?;
            return Ok(Pattern::Imp(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Pattern, SyntaxError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let rhs = self.unary()?;
            lhs = Pattern::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn is_modality(&self, tok: &Tok) -> bool {
        matches!(tok, Tok::Ident(s) if self.sig.sort_of(s) == Some(Sort::Modality))
    }

    fn unary(&mut self) -> Result<Pattern, SyntaxError> {
        match self.peek().clone() {
            Tok::Tilde => {
                self.bump();
                Ok(Pattern::not(self.unary()?))
            }
            Tok::At => {
                self.bump();
                let a = self.ident_of_sort(Sort::Nominal, "nominal")?;
                Ok(Pattern::At(a, Box::new(self.unary()?)))
            }
            Tok::Ident(w) if w == "dia" => {
                self.bump();
                let m = self.ident_of_sort(Sort::Modality, "modality")?;
                let body = self.unary()?;
                Ok(Pattern::not(Pattern::Nec(m, Box::new(Pattern::not(body)))))
            }
            Tok::Ident(w) if w == "box" => {
                let explicit = self.is_modality(self.peek_at(1));
                if explicit || !self.is_modality(&Tok::Ident(w)) {
                    self.bump();
                    let m = self.ident_of_sort(Sort::Modality, "modality")?;
                    Ok(Pattern::Nec(m, Box::new(self.unary()?)))
                } else {
                    self.bump();
                    Ok(Pattern::Nec(Ident::new("box"), Box::new(self.unary()?)))
                }
            }
            ref t if self.is_modality(t) => {
                let m = self.ident_of_sort(Sort::Modality, "modality")?;
                Ok(Pattern::Nec(m, Box::new(self.unary()?)))
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Pattern, SyntaxError> {
        let (pos, tok) = self.bump();
        match tok {
            Tok::LParen => {
                let inner = self.imp()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(w) if w == "bot" => Ok(Pattern::Bot),
            Tok::Var(name) => {
                let v = self.var(pos, name)?;
                if *self.peek() == Tok::LParen {
                    self.bump();
                    let t = self.term()?;
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(Pattern::Applied(v, t))
                } else {
                    Ok(Pattern::Var(v))
                }
            }
            Tok::Ident(name) => match self.sig.sort_of(&name) {
                None => Err(SyntaxError::Undeclared { pos, name }),
                Some(Sort::Prop) => Ok(Pattern::Prop(Ident::new(&name))),
                Some(Sort::Nominal) => Ok(Pattern::Nominal(Ident::new(&name))),
                Some(Sort::Predicate(arity)) => {
                    if *self.peek() != Tok::LParen {
                        return Err(SyntaxError::Arity {
                            pos,
                            name,
                            expected: arity,
                            found: 0,
                        });
                    }
                    self.bump();
                    let mut terms = vec![self.term()?];
                    while *self.peek() == Tok::Comma {
                        self.bump();
                        terms.push(self.term()?);
                    }
                    self.expect(Tok::RParen, "`,` or `)`")?;
                    if terms.len() != arity {
                        return Err(SyntaxError::Arity {
                            pos,
                            name,
                            expected: arity,
                            found: terms.len(),
                        });
                    }
                    Ok(Pattern::Pred(Ident::new(&name), terms))
                }
                Some(found) => Err(SyntaxError::Sort {
                    pos,
                    name,
                    expected: "formula".into(),
                    found,
                }),
            },
            other => Err(SyntaxError::Unexpected {
                pos,
                expected: "a formula".into(),
                found: other.describe(),
            }),
        }
    }

    fn term(&mut self) -> Result<TermPattern, SyntaxError> {
        if let Tok::Var(name) = self.peek().clone() {
            let pos = self.offset();
            self.bump();
            return Ok(TermPattern::Var(self.var(pos, name)?));
        }
        Ok(TermPattern::Const(
            self.ident_of_sort(Sort::Time, "time constant")?,
        ))
    }
}

fn parse_with(text: &str, sig: &Signature, allow_vars: bool) -> Result<Pattern, SyntaxError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        sig,
        allow_vars,
    };
    let out = p.imp()?;
    if *p.peek() != Tok::Eof {
        return Err(p.unexpected("end of input"));
    }
    Ok(out)
}

/// Parses a ground formula; every identifier must be declared in `sig`.
pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula, SyntaxError> {
    let pat = parse_with(text, sig, false)?;
    Ok(pat
        .to_formula()
        .expect("metavariables are rejected while parsing"))
}

/// Parses a pattern: a formula that may contain `?phi`, `?phi(?t)` and
/// term variables `?t`.
pub fn parse_pattern(text: &str, sig: &Signature) -> Result<Pattern, SyntaxError> {
    parse_with(text, sig, true)
}
