// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The Pathfinder Authors

//! Recursive-descent parser for the filter grammar:
//!
//! ```text
//! expr   := term (OR term)*
//! term   := factor (AND factor)*
//! factor := atom | "(" expr ")"
//! atom   := ident cmp number
//!         | number "<=" ident "<=" number
//!         | ident IN "(" string ("," string)* ")"
//!         | ident "=" string
//! cmp    := < | <= | > | >= | =
//! ```
//!
//! Keywords are case-insensitive and strings are double-quoted (`\"` and
//! `\\` escapes). `ident = "s"` is shorthand for `ident IN ("s")`.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{AtomicPredicate, BoolExpr, Bound, Interval};
use crate::error::{Error, Result};
use crate::relation::{AttributeKind, Schema};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(f64),
    Str(String),
    LParen,
    RParen,
    Comma,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    And,
    Or,
    In,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier {s:?}"),
            Tok::Num(n) => format!("number {n}"),
            Tok::Str(s) => format!("string {s:?}"),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Comma => "','".into(),
            Tok::Lt => "'<'".into(),
            Tok::Le => "'<='".into(),
            Tok::Gt => "'>'".into(),
            Tok::Ge => "'>='".into(),
            Tok::Eq => "'='".into(),
            Tok::And => "AND".into(),
            Tok::Or => "OR".into(),
            Tok::In => "IN".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn syntax(pos: usize, msg: impl Into<String>) -> Error {
    Error::Syntax {
        pos,
        msg: msg.into(),
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'(' => {
                out.push((start, Tok::LParen));
                i += 1;
            }
            b')' => {
                out.push((start, Tok::RParen));
                i += 1;
            }
            b',' => {
                out.push((start, Tok::Comma));
                i += 1;
            }
            b'=' => {
                out.push((start, Tok::Eq));
                i += 1;
            }
            b'<' | b'>' => {
                let eq = bytes.get(i + 1) == Some(&b'=');
                let tok = match (c, eq) {
                    (b'<', false) => Tok::Lt,
                    (b'<', true) => Tok::Le,
                    (_, false) => Tok::Gt,
                    (_, true) => Tok::Ge,
                };
                out.push((start, tok));
                i += if eq { 2 } else { 1 };
            }
            b'"' => {
                i += 1;
                let mut s = String::new();
                loop {
                    match bytes.get(i) {
                        None => return Err(syntax(start, "unterminated string")),
                        Some(b'"') => {
                            i += 1;
                            break;
                        }
                        Some(b'\\') => {
                            match bytes.get(i + 1) {
                                Some(&e @ (b'"' | b'\\')) => s.push(e as char),
                                _ => return Err(syntax(i, "invalid escape")),
                            }
                            i += 2;
                        }
                        Some(_) => {
                            // Copy one UTF-8 scalar.
                            let ch = text[i..].chars().next().unwrap_or('\u{fffd}');
                            s.push(ch);
                            i += ch.len_utf8();
                        }
                    }
                }
                out.push((start, Tok::Str(s)));
            }
            b'0'..=b'9' | b'.' | b'-' | b'+' => {
                i += 1;
                while i < bytes.len() {
                    let d = bytes[i];
                    let exp_sign = (d == b'-' || d == b'+') && matches!(bytes[i - 1], b'e' | b'E');
                    if d.is_ascii_digit() || d == b'.' || d == b'e' || d == b'E' || exp_sign {
                        i += 1;
                    } else {
                        break;
                    }
                }
                let lit = &text[start..i];
                let v: f64 = lit
                    .parse()
                    .map_err(|_| syntax(start, format!("invalid number {lit:?}")))?;
                if !v.is_finite() {
                    return Err(syntax(start, format!("number out of range {lit:?}")));
                }
                out.push((start, Tok::Num(v)));
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let word = &text[start..i];
                let tok = if word.eq_ignore_ascii_case("and") {
                    Tok::And
                } else if word.eq_ignore_ascii_case("or") {
                    Tok::Or
                } else if word.eq_ignore_ascii_case("in") {
                    Tok::In
                } else {
                    Tok::Ident(word.to_string())
                };
                out.push((start, tok));
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(syntax(start, format!("unexpected character {ch:?}")));
            }
        }
    }
    out.push((text.len(), Tok::Eof));
    Ok(out)
}

struct Parser<'s> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    schema: &'s Schema,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn next(&mut self) -> (usize, Tok) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<()> {
        let (pos, t) = self.next();
        if t == want {
            Ok(())
        } else {
            Err(syntax(
                pos,
                format!("expected {}, found {}", want.describe(), t.describe()),
            ))
        }
    }

    fn expr(&mut self) -> Result<BoolExpr> {
        let mut terms = alloc::vec![self.term()?];
        while *self.peek() == Tok::Or {
            self.next();
            terms.push(self.term()?);
        }
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            BoolExpr::Or(terms)
        })
    }

    fn term(&mut self) -> Result<BoolExpr> {
        let mut factors = alloc::vec![self.factor()?];
        while *self.peek() == Tok::And {
            self.next();
            factors.push(self.factor()?);
        }
        Ok(if factors.len() == 1 {
            factors.pop().unwrap()
        } else {
            BoolExpr::And(factors)
        })
    }

    fn factor(&mut self) -> Result<BoolExpr> {
        if *self.peek() == Tok::LParen {
            self.next();
            let e = self.expr()?;
            self.expect(Tok::RParen)?;
            return Ok(e);
        }
        self.atom().map(BoolExpr::Atom)
    }

    fn attribute(&mut self, want: AttributeKind) -> Result<usize> {
        let (pos, t) = self.next();
        let Tok::Ident(name) = t else {
            return Err(syntax(
                pos,
                format!("expected attribute name, found {}", t.describe()),
            ));
        };
        let attr = self
            .schema
            .index_of(&name)
            .ok_or_else(|| Error::UnknownAttribute(name.clone()))?;
        let kind = self.schema.kind(attr);
        if kind != want {
            return Err(Error::PredicateKind {
                attr: name,
                kind: kind.name(),
            });
        }
        Ok(attr)
    }

    fn number(&mut self) -> Result<f64> {
        match self.next() {
            (_, Tok::Num(v)) => Ok(v),
            (pos, t) => Err(syntax(
                pos,
                format!("expected number, found {}", t.describe()),
            )),
        }
    }

    fn atom(&mut self) -> Result<AtomicPredicate> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Num(lo) => {
                self.next();
                self.expect(Tok::Le)?;
                let attr = self.attribute(AttributeKind::Numeric)?;
                self.expect(Tok::Le)?;
                let hi = self.number()?;
                if lo > hi {
                    return Err(Error::EmptyRange(self.schema.name(attr).to_string()));
                }
                Ok(AtomicPredicate::range(attr, Interval::closed(lo, hi)))
            }
            Tok::Ident(name) => {
                let attr = self
                    .schema
                    .index_of(&name)
                    .ok_or_else(|| Error::UnknownAttribute(name.clone()))?;
                let kind = self.schema.kind(attr);
                let op_pos = self.toks[self.at + 1].0;
                match self.toks[self.at + 1].1.clone() {
                    Tok::In => {
                        self.attribute(AttributeKind::Categorical)?;
                        self.next();
                        self.expect(Tok::LParen)?;
                        let mut values = BTreeSet::new();
                        loop {
                            match self.next() {
                                (_, Tok::Str(s)) => {
                                    values.insert(s);
                                }
                                (p, t) => {
                                    return Err(syntax(
                                        p,
                                        format!("expected string, found {}", t.describe()),
                                    ))
                                }
                            }
                            match self.next() {
                                (_, Tok::Comma) => continue,
                                (_, Tok::RParen) => break,
                                (p, t) => {
                                    return Err(syntax(
                                        p,
                                        format!("expected ',' or ')', found {}", t.describe()),
                                    ))
                                }
                            }
                        }
                        Ok(AtomicPredicate::InSet { attr, values })
                    }
                    Tok::Eq if matches!(self.toks.get(self.at + 2), Some((_, Tok::Str(_)))) => {
                        self.attribute(AttributeKind::Categorical)?;
                        self.next();
                        let Tok::Str(s) = self.next().1 else {
                            unreachable!()
                        };
                        Ok(AtomicPredicate::in_set(attr, [s]))
                    }
                    op @ (Tok::Lt | Tok::Le | Tok::Gt | Tok::Ge | Tok::Eq) => {
                        if kind != AttributeKind::Numeric {
                            return Err(Error::PredicateKind {
                                attr: name,
                                kind: kind.name(),
                            });
                        }
                        self.next();
                        self.next();
                        let v = self.number()?;
                        let interval = match op {
                            Tok::Lt => Interval::new(None, Some(Bound::exclusive(v))),
                            Tok::Le => Interval::at_most(v),
                            Tok::Gt => Interval::new(Some(Bound::exclusive(v)), None),
                            Tok::Ge => Interval::at_least(v),
                            _ => Interval::point(v),
                        };
                        Ok(AtomicPredicate::range(attr, interval))
                    }
                    t => Err(syntax(
                        op_pos,
                        format!("expected comparison or IN, found {}", t.describe()),
                    )),
                }
            }
            t => Err(syntax(
                pos,
                format!("expected predicate, found {}", t.describe()),
            )),
        }
    }
}

/// Parses filter text against a schema, resolving attribute names.
pub fn parse_filter(text: &str, schema: &Schema) -> Result<BoolExpr> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        at: 0,
        schema,
    };
    let e = p.expr()?;
    match p.next() {
        (_, Tok::Eof) => Ok(e),
        (pos, t) => Err(syntax(pos, format!("unexpected {}", t.describe()))),
    }
}
