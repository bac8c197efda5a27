//! Parser for coefficient and forcing expressions.
//!
//! Grammar: integers, `p/q` via division, the variable `x`, `+ - * / ^`,
//! parentheses, integer powers of any subexpression and rational powers
//! `x^(p/q)` of the variable. Decimal literals are rejected.

use crate::arith::{qi, Q};
use crate::closed::ClosedForm;
use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

pub fn parse_expr(src: &str) -> Result<ClosedForm> {
    let mut p = Parser { s: src.as_bytes(), pos: 0 };
    let v = p.sum()?;
    p.ws();
    if p.pos != p.s.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(v)
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.pos).copied()
    }

    fn sum(&mut self) -> Result<ClosedForm> {
        let mut v = self.product()?;
        while let Some(c) = self.peek() {
            match c {
                b'+' => {
                    self.pos += 1;
                    v = v.add(&self.product()?);
                }
                b'-' => {
                    self.pos += 1;
                    v = v.sub(&self.product()?);
                }
                _ => break,
            }
        }
        Ok(v)
    }

    fn product(&mut self) -> Result<ClosedForm> {
        let mut v = self.unary()?;
        while let Some(c) = self.peek() {
            match c {
                b'*' => {
                    self.pos += 1;
                    v = v.mul(&self.unary()?);
                }
                b'/' => {
                    self.pos += 1;
                    let at = self.pos;
                    let d = self.unary()?;
                    if d.is_zero() {
                        return Err(Error::Parse { pos: at, msg: "division by zero".into() });
                    }
                    v = v.div(&d).map_err(|_| Error::Parse {
                        pos: at,
                        msg: "cannot divide by a sum of fractional powers".into(),
                    })?;
                }
                _ => break,
            }
        }
        Ok(v)
    }

    fn unary(&mut self) -> Result<ClosedForm> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(self.unary()?.neg())
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<ClosedForm> {
        let is_var = matches!(self.peek(), Some(b'x'));
        let base = self.atom()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        let at = self.pos;
        let e = self.exponent()?;
        if e.is_integer() {
            let n = e.to_integer().to_i64().ok_or_else(|| self.err("exponent too large"))?;
            if n >= 0 {
                return Ok(base.pow(n as usize));
            }
            let inv = base
                .inv()
                .map_err(|_| Error::Parse { pos: at, msg: "negative power of a non-invertible expression".into() })?;
            return Ok(inv.pow((-n) as usize));
        }
        if !is_var || base != ClosedForm::x() {
            return Err(Error::Parse { pos: at, msg: "fractional powers are only allowed on x".into() });
        }
        Ok(ClosedForm::monomial(qi(1), &e))
    }

    /// `n`, `-n`, or a parenthesized rational `(p/q)` / `(-p/q)`.
    fn exponent(&mut self) -> Result<Q> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let neg = self.eat(b'-');
                let n = self.integer()?;
                let d = if self.eat(b'/') { self.integer()? } else { BigInt::from(1) };
                if !self.eat(b')') {
                    return Err(self.err("expected `)` after exponent"));
                }
                if d.is_zero() {
                    return Err(self.err("zero denominator in exponent"));
                }
                let v = Q::new(n, d);
                Ok(if neg { -v } else { v })
            }
            Some(b'-') => {
                self.pos += 1;
                Ok(-Q::from_integer(self.integer()?))
            }
            _ => Ok(Q::from_integer(self.integer()?)),
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an integer"));
        }
        if self.pos < self.s.len() && (self.s[self.pos] == b'.' || self.s[self.pos] == b'e') {
            let lit: String = String::from_utf8_lossy(&self.s[start..]).chars().take_while(|c| !c.is_whitespace()).collect();
            return Err(Error::Parse {
                pos: start,
                msg: format!("decimal literal `{lit}` is not exact; write it as a fraction such as 1/2"),
            });
        }
        let txt = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
        Ok(txt.parse().unwrap())
    }

    fn atom(&mut self) -> Result<ClosedForm> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.sum()?;
                if !self.eat(b')') {
                    return Err(self.err("expected `)`"));
                }
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => Ok(ClosedForm::constant(Q::from_integer(self.integer()?))),
            Some(b'.') => Err(self.err("decimal literals are not exact; write them as fractions such as 1/2")),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.s.len() && self.s[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let id = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
                match id {
                    "x" => Ok(ClosedForm::x()),
                    "i" | "I" => Err(Error::Parse { pos: start, msg: "complex scalars are not supported".into() }),
                    _ => Err(Error::Parse { pos: start, msg: format!("unknown identifier `{id}`; the variable is x") }),
                }
            }
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}
