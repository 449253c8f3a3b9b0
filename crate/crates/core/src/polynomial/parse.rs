//! Recursive-descent parser for polynomial expressions.
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := base ('^' uint)?
//! base   := var | rational | '(' expr ')'
//! var    := 'x' uint
//! ```
//!
//! Rationals are written `p/q` or as decimals; powers are expanded
//! immediately, so the result is always in normal form.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{ExponentVector, Polynomial, Rational};
use crate::error::{Error, Result};

const MAX_POWER: u32 = 64;

/// Parses `text` as a polynomial in `x1..x{dim}`.
pub fn parse(text: &str, dim: usize) -> Result<Polynomial> {
    if dim == 0 {
        return Err(Error::UnsupportedDimension(0));
    }
    let mut parser = Parser { src: text.as_bytes(), pos: 0, dim };
    let p = parser.expr()?;
    parser.skip_ws();
    if parser.pos < parser.src.len() {
        return Err(parser.syntax("unexpected trailing input"));
    }
    Ok(p)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    dim: usize,
}

impl Parser<'_> {
    fn syntax(&self, message: &str) -> Error {
        Error::Syntax { position: self.pos, message: message.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn digits(&mut self) -> &[u8] {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        &self.src[start..self.pos]
    }

    fn uint(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        let d = self.digits();
        if d.is_empty() {
            self.pos = start;
            return Err(self.syntax("expected an unsigned integer"));
        }
        std::str::from_utf8(d)
            .unwrap()
            .parse()
            .map_err(|_| Error::Syntax { position: start, message: "integer too large".into() })
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let mut negate = false;
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                negate = true;
            }
            Some(b'+') => self.pos += 1,
            _ => {}
        }
        let first = self.term()?;
        let mut acc = if negate { first.neg() } else { first };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = acc.mul(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Polynomial> {
        let base = self.base()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        self.skip_ws();
        let exp_pos = self.pos;
        if matches!(self.src.get(self.pos), Some(b'-') | Some(b'.')) {
            return Err(Error::NonIntegerExponent { position: exp_pos });
        }
        let k = self.uint()?;
        if matches!(self.src.get(self.pos), Some(b'.') | Some(b'/')) {
            return Err(Error::NonIntegerExponent { position: exp_pos });
        }
        if k > MAX_POWER as u64 {
            return Err(Error::Syntax { position: exp_pos, message: format!("exponent exceeds {MAX_POWER}") });
        }
        Ok(base.pow(k as u32))
    }

    fn base(&mut self) -> Result<Polynomial> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.syntax("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(b'x') => {
                self.pos += 1;
                let start = self.pos;
                let d = self.digits();
                if d.is_empty() {
                    return Err(Error::Syntax { position: start, message: "expected variable index".into() });
                }
                let index: usize = std::str::from_utf8(d).unwrap().parse().unwrap_or(usize::MAX);
                if index == 0 || index > self.dim {
                    return Err(Error::VariableOutOfRange { index, dim: self.dim });
                }
                Ok(Polynomial::variable(self.dim, index - 1))
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let q = self.number()?;
                Ok(Polynomial::monomial(ExponentVector::zeros(self.dim), q))
            }
            Some(_) => Err(self.syntax("expected variable, number or '('")),
            None => Err(self.syntax("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<Rational> {
        let start = self.pos;
        let int_part = std::str::from_utf8(self.digits()).unwrap().to_string();
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            let frac = std::str::from_utf8(self.digits()).unwrap().to_string();
            if int_part.is_empty() && frac.is_empty() {
                return Err(Error::Syntax { position: start, message: "malformed number".into() });
            }
            let digits = format!("{}{}", int_part, frac);
            let numer: BigInt = digits.parse().unwrap_or_else(|_| BigInt::zero());
            let denom = num_traits::pow(BigInt::from(10), frac.len());
            return Ok(Rational::new(numer, denom));
        }
        let numer: BigInt = int_part.parse().map_err(|_| Error::Syntax {
            position: start,
            message: "malformed number".into(),
        })?;
        self.skip_ws();
        if self.src.get(self.pos) == Some(&b'/') {
            self.pos += 1;
            self.skip_ws();
            let dpos = self.pos;
            let d = self.digits();
            if d.is_empty() {
                return Err(Error::Syntax { position: dpos, message: "expected denominator".into() });
            }
            let denom: BigInt = std::str::from_utf8(d).unwrap().parse().unwrap();
            if denom.is_zero() {
                return Err(Error::Syntax { position: dpos, message: "zero denominator".into() });
            }
            return Ok(Rational::new(numer, denom));
        }
        Ok(Rational::new(numer, BigInt::one()))
    }
}
