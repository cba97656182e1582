//! Text form of exact numbers.
//!
//! Accepted shapes:
//!
//! ```text
//! 3            -7/8          5/2^3
//! sqrt2/4      -3*sqrt2      (-4 + 4*sqrt2)/2^2
//! ```
//!
//! A denominator must be a power of two, written either as `2^k` or as its
//! decimal value. A numerator with more than one term needs parentheses when
//! a denominator follows.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use super::Quad;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedToken,
    UnexpectedEnd,
    NotPowerOfTwo,
    AmbiguousDenominator,
    ExponentTooLarge,
    Irrational,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = match self {
            ParseErrorKind::UnexpectedToken => "unexpected token",
            ParseErrorKind::UnexpectedEnd => "unexpected end of input",
            ParseErrorKind::NotPowerOfTwo => "denominator is not a power of two",
            ParseErrorKind::AmbiguousDenominator => "multi-term numerator needs parentheses",
            ParseErrorKind::ExponentTooLarge => "exponent too large",
            ParseErrorKind::Irrational => "expected a dyadic rational",
        };
        f.write_str(msg)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse number {input:?}: {kind} at {token:?}")]
pub struct ParseError {
    pub input: String,
    pub token: String,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Sqrt2,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(n) => write!(f, "{n}"),
            Tok::Sqrt2 => f.write_str("sqrt2"),
            Tok::Plus => f.write_str("+"),
            Tok::Minus => f.write_str("-"),
            Tok::Star => f.write_str("*"),
            Tok::Slash => f.write_str("/"),
            Tok::Caret => f.write_str("^"),
            Tok::LParen => f.write_str("("),
            Tok::RParen => f.write_str(")"),
        }
    }
}

struct Parser<'a> {
    input: &'a str,
    toks: Vec<Tok>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, token: impl Into<String>, kind: ParseErrorKind) -> ParseError {
        ParseError {
            input: self.input.to_string(),
            token: token.into(),
            kind,
        }
    }

    fn lex(input: &'a str) -> Result<Self, ParseError> {
        let mut toks = Vec::new();
        let bytes = input.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i];
            match c {
                b' ' | b'\t' => {
                    i += 1;
                    continue;
                }
                b'0'..=b'9' => {
                    let start = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    let n: BigInt = input[start..i].parse().expect("digits");
                    toks.push(Tok::Int(n));
                    continue;
                }
                b's' if input[i..].starts_with("sqrt2") => {
                    toks.push(Tok::Sqrt2);
                    i += 5;
                    continue;
                }
                b'+' => toks.push(Tok::Plus),
                b'-' => toks.push(Tok::Minus),
                b'*' => toks.push(Tok::Star),
                b'/' => toks.push(Tok::Slash),
                b'^' => toks.push(Tok::Caret),
                b'(' => toks.push(Tok::LParen),
                b')' => toks.push(Tok::RParen),
                _ => {
                    let rest: String = input[i..]
                        .chars()
                        .take_while(|c| !c.is_whitespace())
                        .collect();
                    return Err(ParseError {
                        input: input.to_string(),
                        token: rest,
                        kind: ParseErrorKind::UnexpectedToken,
                    });
                }
            }
            i += 1;
        }
        Ok(Parser {
            input,
            toks,
            pos: 0,
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Result<Tok, ParseError> {
        let t = self
            .toks
            .get(self.pos)
            .cloned()
            .ok_or_else(|| self.err("", ParseErrorKind::UnexpectedEnd))?;
        self.pos += 1;
        Ok(t)
    }

    fn expect_int(&mut self) -> Result<BigInt, ParseError> {
        match self.next()? {
            Tok::Int(n) => Ok(n),
            t => Err(self.err(t.to_string(), ParseErrorKind::UnexpectedToken)),
        }
    }

    /// `[sign] (INT ["*" sqrt2] | sqrt2)` → (rational part, sqrt2 part)
    fn term(&mut self) -> Result<(BigInt, BigInt), ParseError> {
        let mut negate = false;
        while let Some(Tok::Plus | Tok::Minus) = self.peek() {
            if self.next()? == Tok::Minus {
                negate = !negate;
            }
        }
        let (p, q) = match self.next()? {
            Tok::Sqrt2 => (BigInt::zero(), BigInt::one()),
            Tok::Int(n) => {
                if self.peek() == Some(&Tok::Star) {
                    self.pos += 1;
                    match self.next()? {
                        Tok::Sqrt2 => (BigInt::zero(), n),
                        t => return Err(self.err(t.to_string(), ParseErrorKind::UnexpectedToken)),
                    }
                } else {
                    (n, BigInt::zero())
                }
            }
            t => return Err(self.err(t.to_string(), ParseErrorKind::UnexpectedToken)),
        };
        Ok(if negate { (-p, -q) } else { (p, q) })
    }

    fn sum(&mut self) -> Result<(BigInt, BigInt, usize), ParseError> {
        let (mut p, mut q) = self.term()?;
        let mut terms = 1;
        while let Some(Tok::Plus | Tok::Minus) = self.peek() {
            let (tp, tq) = self.term()?;
            p += tp;
            q += tq;
            terms += 1;
        }
        Ok((p, q, terms))
    }

    fn denominator_exponent(&mut self) -> Result<u32, ParseError> {
        let base = self.expect_int()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            if base != BigInt::from(2) {
                return Err(self.err(base.to_string(), ParseErrorKind::NotPowerOfTwo));
            }
            let e = self.expect_int()?;
            return e
                .to_u32()
                .ok_or_else(|| self.err(e.to_string(), ParseErrorKind::ExponentTooLarge));
        }
        if base.is_positive() {
            let tz = base.trailing_zeros().unwrap_or(0);
            if base == (BigInt::one() << tz) {
                return u32::try_from(tz)
                    .map_err(|_| self.err(base.to_string(), ParseErrorKind::ExponentTooLarge));
            }
        }
        Err(self.err(base.to_string(), ParseErrorKind::NotPowerOfTwo))
    }

    fn number(&mut self) -> Result<Quad, ParseError> {
        let (p, q, terms, parenthesized) = if self.peek() == Some(&Tok::LParen) {
            self.pos += 1;
            let (p, q, terms) = self.sum()?;
            match self.next()? {
                Tok::RParen => {}
                t => return Err(self.err(t.to_string(), ParseErrorKind::UnexpectedToken)),
            }
            (p, q, terms, true)
        } else {
            let (p, q, terms) = self.sum()?;
            (p, q, terms, false)
        };
        let mut exp = 0;
        if let Some(tok) = self.peek() {
            if *tok != Tok::Slash {
                return Err(self.err(tok.to_string(), ParseErrorKind::UnexpectedToken));
            }
            if terms > 1 && !parenthesized {
                return Err(self.err("/", ParseErrorKind::AmbiguousDenominator));
            }
            self.pos += 1;
            exp = self.denominator_exponent()?;
        }
        if let Some(tok) = self.peek() {
            return Err(self.err(tok.to_string(), ParseErrorKind::UnexpectedToken));
        }
        Ok(Quad::new(p, q, exp))
    }
}

pub fn parse_number(text: &str) -> Result<Quad, ParseError> {
    let mut parser = Parser::lex(text.trim())?;
    if parser.toks.is_empty() {
        return Err(parser.err("", ParseErrorKind::UnexpectedEnd));
    }
    parser.number()
}

pub fn format_number(a: &Quad) -> String {
    a.to_string()
}
