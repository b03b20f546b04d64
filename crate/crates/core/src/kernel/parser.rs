//! Expression parser for algebra elements.
//!
//! Grammar (documented in the README):
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := factor ('*' factor)*
//! factor   := '-' factor | power
//! power    := atom ('^' exponent)?
//! atom     := rational | generator | '(' expr ')'
//! exponent := '-'? integer
//! rational := integer ('/' integer)?
//! ```
//!
//! Negative exponents are only valid in group algebras, and only on bases
//! that reduce to a single group word (times a nonzero scalar).

use std::str::FromStr;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::kernel::{AlgebraElement, AlgebraFamily};
use crate::rat::Rat;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
}

struct Lexer {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let start = i;
        match b {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'+' => {
                toks.push((Tok::Plus, start));
                i += 1;
            }
            b'-' => {
                toks.push((Tok::Minus, start));
                i += 1;
            }
            b'*' => {
                toks.push((Tok::Star, start));
                i += 1;
            }
            b'^' => {
                toks.push((Tok::Caret, start));
                i += 1;
            }
            b'/' => {
                toks.push((Tok::Slash, start));
                i += 1;
            }
            b'(' => {
                toks.push((Tok::LParen, start));
                i += 1;
            }
            b')' => {
                toks.push((Tok::RParen, start));
                i += 1;
            }
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n = BigInt::from_str(&text[start..i]).expect("digits");
                toks.push((Tok::Int(n), start));
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                toks.push((Tok::Ident(text[start..i].to_string()), start));
            }
            _ => {
                return Err(Error::Parse {
                    pos: start,
                    msg: format!("unexpected character `{}`", text[start..].chars().next().unwrap()),
                })
            }
        }
    }
    Ok(toks)
}

struct Parser<'a> {
    lexer: Lexer,
    family: &'a AlgebraFamily,
    gens: Vec<String>,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.lexer.toks.get(self.lexer.pos).map(|(t, _)| t)
    }

    fn peek_pos(&self) -> usize {
        self.lexer
            .toks
            .get(self.lexer.pos)
            .map_or(self.end, |(_, p)| *p)
    }

    fn next(&mut self) -> Option<(Tok, usize)> {
        let t = self.lexer.toks.get(self.lexer.pos).cloned();
        if t.is_some() {
            self.lexer.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<usize> {
        match self.next() {
            Some((t, p)) if t == want => Ok(p),
            Some((_, p)) => Err(Error::Parse {
                pos: p,
                msg: format!("expected {what}"),
            }),
            None => Err(Error::Parse {
                pos: self.end,
                msg: format!("expected {what}, found end of input"),
            }),
        }
    }

    fn expr(&mut self) -> Result<AlgebraElement> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.next();
                    acc = acc.add(&self.term()?);
                }
                Some(Tok::Minus) => {
                    self.next();
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<AlgebraElement> {
        let mut acc = self.factor()?;
        while self.peek() == Some(&Tok::Star) {
            self.next();
            acc = acc.mul(&self.factor()?)?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<AlgebraElement> {
        if self.peek() == Some(&Tok::Minus) {
            self.next();
            return Ok(self.factor()?.neg());
        }
        self.power()
    }

    fn power(&mut self) -> Result<AlgebraElement> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        let caret_pos = self.peek_pos();
        self.next();
        let mut negative = false;
        if self.peek() == Some(&Tok::Minus) {
            self.next();
            negative = true;
        }
        let (tok, pos) = self.next().ok_or(Error::Parse {
            pos: self.end,
            msg: "expected an integer exponent".into(),
        })?;
        let Tok::Int(n) = tok else {
            return Err(Error::Parse {
                pos,
                msg: "expected an integer exponent".into(),
            });
        };
        let mag = i64::try_from(n).map_err(|_| Error::Parse {
            pos,
            msg: "exponent too large".into(),
        })?;
        let exp = if negative { -mag } else { mag };
        if exp < 0 && !self.family.is_group_algebra() {
            return Err(Error::NegativeExponent { pos: caret_pos });
        }
        base.pow(exp).map_err(|e| match e {
            Error::Invalid(msg) => Error::Parse {
                pos: caret_pos,
                msg,
            },
            other => other,
        })
    }

    fn atom(&mut self) -> Result<AlgebraElement> {
        match self.next() {
            Some((Tok::Int(n), _)) => {
                // A rational literal may continue with `/ integer`.
                if self.peek() == Some(&Tok::Slash) {
                    self.next();
                    let (tok, pos) = self.next().ok_or(Error::Parse {
                        pos: self.end,
                        msg: "expected a denominator".into(),
                    })?;
                    let Tok::Int(d) = tok else {
                        return Err(Error::Parse {
                            pos,
                            msg: "expected a denominator".into(),
                        });
                    };
                    if d == BigInt::from(0) {
                        return Err(Error::Parse {
                            pos,
                            msg: "zero denominator".into(),
                        });
                    }
                    let c: Rat = format!("{n}/{d}").parse()?;
                    Ok(AlgebraElement::scalar(self.family.clone(), c))
                } else {
                    Ok(AlgebraElement::scalar(
                        self.family.clone(),
                        Rat::from_bigint(n),
                    ))
                }
            }
            Some((Tok::Ident(name), pos)) => {
                match self.gens.iter().position(|g| g == &name) {
                    Some(idx) => Ok(AlgebraElement::from_word(
                        self.family.clone(),
                        self.family.generator_word(idx),
                    )),
                    None => Err(Error::UnknownGenerator { pos, name }),
                }
            }
            Some((Tok::LParen, _)) => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Some((_, pos)) => Err(Error::Parse {
                pos,
                msg: "expected a literal, generator, or `(`".into(),
            }),
            None => Err(Error::Parse {
                pos: self.end,
                msg: "unexpected end of input".into(),
            }),
        }
    }
}

/// Parse an expression into an exact element of `family`.
pub fn parse(family: &AlgebraFamily, text: &str) -> Result<AlgebraElement> {
    let toks = lex(text)?;
    let mut p = Parser {
        lexer: Lexer { toks, pos: 0 },
        family,
        gens: family.generator_names(),
        end: text.len(),
    };
    let e = p.expr()?;
    if let Some((_, pos)) = p.next() {
        return Err(Error::Parse {
            pos,
            msg: "trailing input".into(),
        });
    }
    Ok(e)
}

impl AlgebraElement {
    pub fn parse(family: &AlgebraFamily, text: &str) -> Result<AlgebraElement> {
        parse(family, text)
    }
}
