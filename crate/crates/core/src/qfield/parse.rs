//! Parser for the canonical textual rendering of Laurent polynomials and
//! scalars, used by cache files and test fixtures.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::laurent::LaurentPoly;
use super::scalar::Scalar;
use crate::error::{Error, Result};

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    fn skip_ws(&mut self) {
        while self.peek().map(|c| c.is_ascii_whitespace()).unwrap_or(false) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected '{c}'")))
        }
    }

    fn error(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at byte {} in {:?}", self.pos, self.src))
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let neg = self.eat('-');
        let start = self.pos;
        while self.peek().map(|c| c.is_ascii_digit()).unwrap_or(false) {
            self.bump();
        }
        if self.pos == start {
            return Err(self.error("expected digits"));
        }
        let n: BigInt = self.src[start..self.pos].parse().unwrap();
        Ok(if neg { -n } else { n })
    }

    fn exponent(&mut self) -> Result<i64> {
        self.skip_ws();
        let neg = self.eat('-');
        let start = self.pos;
        while self.peek().map(|c| c.is_ascii_digit()).unwrap_or(false) {
            self.bump();
        }
        if self.pos == start {
            return Err(self.error("expected exponent digits"));
        }
        let n: i64 = self.src[start..self.pos]
            .parse()
            .map_err(|_| self.error("exponent out of range"))?;
        Ok(if neg { -n } else { n })
    }

    /// `q`, `q^e`; returns the exponent.
    fn q_part(&mut self) -> Result<i64> {
        self.expect('q')?;
        if self.eat('^') {
            self.exponent()
        } else {
            Ok(1)
        }
    }

    /// One term: `c`, `c*q^e`, `c/d`, `c/d*q^e`, `q^e`, `q`.
    fn term(&mut self) -> Result<(i64, BigRational)> {
        self.skip_ws();
        if self.peek() == Some('q') {
            let e = self.q_part()?;
            return Ok((e, BigRational::one()));
        }
        let numer = self.integer()?;
        self.skip_ws();
        let mut coeff = BigRational::from_integer(numer);
        if self.peek() == Some('/') {
            // Disambiguate "1/2*q" from a scalar's "…)/(…" — the caller
            // handles ratios; here '/' always means a rational coefficient.
            self.bump();
            let denom = self.integer()?;
            coeff /= BigRational::from_integer(denom);
        }
        self.skip_ws();
        if self.eat('*') {
            let e = self.q_part()?;
            Ok((e, coeff))
        } else {
            Ok((0, coeff))
        }
    }

    fn poly(&mut self) -> Result<LaurentPoly> {
        self.skip_ws();
        let mut out = LaurentPoly::zero();
        let mut sign = if self.eat('-') { -1 } else { 1 };
        loop {
            let (e, c) = self.term()?;
            let c = if sign < 0 { -c } else { c };
            out += &LaurentPoly::monomial(e, c);
            self.skip_ws();
            if self.eat('+') {
                sign = 1;
            } else if self.eat('-') {
                sign = -1;
            } else {
                break;
            }
        }
        Ok(out)
    }
}

/// Parses the canonical polynomial grammar, e.g. `q^-1 + 2 + 3*q^2`.
pub fn parse_laurent(src: &str) -> Result<LaurentPoly> {
    let mut cur = Cursor::new(src);
    let p = cur.poly()?;
    cur.skip_ws();
    if cur.pos != cur.src.len() {
        return Err(cur.error("trailing input"));
    }
    Ok(p)
}

/// Parses a scalar: either a bare polynomial or `(num)/(den)`.
pub fn parse_scalar(src: &str) -> Result<Scalar> {
    let mut cur = Cursor::new(src);
    cur.skip_ws();
    if cur.peek() == Some('(') {
        cur.expect('(')?;
        let num = cur.poly()?;
        cur.expect(')')?;
        cur.skip_ws();
        cur.expect('/')?;
        cur.skip_ws();
        cur.expect('(')?;
        let den = cur.poly()?;
        cur.expect(')')?;
        cur.skip_ws();
        if cur.pos != cur.src.len() {
            return Err(cur.error("trailing input"));
        }
        if den.is_zero() {
            return Err(cur.error("zero denominator"));
        }
        Ok(Scalar::new(num, den))
    } else {
        let p = cur.poly()?;
        cur.skip_ws();
        if cur.pos != cur.src.len() {
            return Err(cur.error("trailing input"));
        }
        Ok(Scalar::from(p))
    }
}
