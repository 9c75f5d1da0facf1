//! Text form of differential polynomials.
//!
//! ```text
//! poly   := ('+'|'-')? term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := atom ('^' NAT)?
//! atom   := RATIONAL | SYMBOL | '(' poly ')'
//! SYMBOL := NAME DIGITS?      trailing digits are the derivative order
//! RATIONAL := INT ('/' POSINT)?
//! ```
//!
//! A single leading sign is accepted so that printed polynomials with a
//! negative leading coefficient parse back.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::poly::DiffPoly;
use super::symbol::SymbolTable;
use super::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Name(String, u32),
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
            Tok::Name(n, 0) => write!(f, "{n}"),
            Tok::Name(n, o) => write!(f, "{n}{o}"),
            Tok::Plus => write!(f, "+"),
            Tok::Minus => write!(f, "-"),
            Tok::Star => write!(f, "*"),
            Tok::Slash => write!(f, "/"),
            Tok::Caret => write!(f, "^"),
            Tok::LParen => write!(f, "("),
            Tok::RParen => write!(f, ")"),
        }
    }
}

/// Parse failure with the offending token index (0-based), its byte offset
/// in the input and the set of tokens that would have been accepted.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("parse error at token {token} (byte {position}): found {found}, expected one of {}", expected.join(", "))]
pub struct ParseError {
    pub token: usize,
    pub position: usize,
    pub found: String,
    pub expected: Vec<String>,
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let tok = if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            Tok::Int(text[start..i].parse().unwrap())
        } else if c.is_ascii_alphabetic() || c == '_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphabetic() || bytes[i] == b'_') {
                i += 1;
            }
            let name = text[start..i].to_string();
            let dstart = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let order = if dstart == i {
                0
            } else {
                text[dstart..i].parse().map_err(|_| ParseError {
                    token: out.len(),
                    position: dstart,
                    found: text[dstart..i].to_string(),
                    expected: vec!["derivative order".into()],
                })?
            };
            Tok::Name(name, order)
        } else {
            i += 1;
            match c {
                '+' => Tok::Plus,
                '-' => Tok::Minus,
                '*' => Tok::Star,
                '/' => Tok::Slash,
                '^' => Tok::Caret,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                _ => {
                    return Err(ParseError {
                        token: out.len(),
                        position: start,
                        found: c.to_string(),
                        expected: vec!["operator".into(), "number".into(), "symbol".into(), "(".into(), ")".into()],
                    })
                }
            }
        };
        out.push((tok, start));
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    len: usize,
    table: &'a SymbolTable,
}

const ATOM: &[&str] = &["number", "symbol", "("];

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        let (found, position) = match self.toks.get(self.pos) {
            Some((t, p)) => (t.to_string(), *p),
            None => ("end of input".to_string(), self.len),
        };
        ParseError { token: self.pos, position, found, expected: expected.iter().map(|s| s.to_string()).collect() }
    }

    fn poly(&mut self) -> Result<DiffPoly, ParseError> {
        let negate = match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                true
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        let first = self.term()?;
        let mut acc = if negate { -first } else { first };
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc += self.term()?;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc -= self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<DiffPoly, ParseError> {
        let mut acc = self.factor()?;
        while let Some(Tok::Star) = self.peek() {
            self.pos += 1;
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<DiffPoly, ParseError> {
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.pos += 1;
            match self.peek() {
                Some(Tok::Int(n)) => {
                    let e: u32 = n.try_into().map_err(|_| self.error(&["exponent"]))?;
                    self.pos += 1;
                    return Ok(base.pow(e));
                }
                _ => return Err(self.error(&["exponent"])),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<DiffPoly, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                if let Some(Tok::Slash) = self.peek() {
                    self.pos += 1;
                    match self.peek().cloned() {
                        Some(Tok::Int(d)) if !d.is_zero() => {
                            self.pos += 1;
                            Ok(DiffPoly::constant(Rational::new(n, d)))
                        }
                        _ => Err(self.error(&["positive integer"])),
                    }
                } else {
                    Ok(DiffPoly::constant(Rational::from_integer(n)))
                }
            }
            Some(Tok::Name(name, order)) => match self.table.symbol(&name, order) {
                Some(sym) => {
                    self.pos += 1;
                    Ok(DiffPoly::var(sym))
                }
                None => Err(self.error(&["symbol without derivative order"])),
            },
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.poly()?;
                match self.peek() {
                    Some(Tok::RParen) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    _ => Err(self.error(&["+", "-", "*", "^", ")"])),
                }
            }
            _ => Err(self.error(ATOM)),
        }
    }
}

/// Parses with the default [`SymbolTable`].
pub fn parse(text: &str) -> Result<DiffPoly, ParseError> {
    parse_with(text, &SymbolTable::default())
}

pub fn parse_with(text: &str, table: &SymbolTable) -> Result<DiffPoly, ParseError> {
    let toks = tokenize(text)?;
    let mut parser = Parser { toks, pos: 0, len: text.len(), table };
    let p = parser.poly()?;
    if parser.pos != parser.toks.len() {
        return Err(parser.error(&["+", "-", "*", "^"]));
    }
    Ok(p)
}

fn write_rational(f: &mut fmt::Formatter<'_>, c: &Rational) -> fmt::Result {
    if c.is_integer() {
        write!(f, "{}", c.numer())
    } else {
        write!(f, "{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for DiffPoly {
    /// Terms in descending lexicographic order, factors ascending, e.g.
    /// `u3 + 4*u*u2 + 3*u1^2 + 6*u^2*u1 + u^4`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if m.is_one() {
                write_rational(f, &mag)?;
            } else if mag.is_one() {
                write!(f, "{m}")?;
            } else {
                write_rational(f, &mag)?;
                write!(f, "*{m}")?;
            }
        }
        Ok(())
    }
}
