//! Recursive-descent parser for map expressions.
//!
//! ```text
//! list   := map ("," map)*
//! map    := affine | power | exp | named
//! affine := [INT] "x" (("+"|"-") UINT)?
//! power  := "x^" UINT (("+"|"-") UINT)?
//! exp    := UINT "^x"
//! named  := "sigma" | "succ" | "deriv" | "square"
//!         | "addc:" INT ("," INT)* | "ca:" UINT | "perm:" UINT
//!         | "ws:" REAL ":" INT | "matquad:" INT "," INT "," INT "," INT
//! ```
//!
//! Whitespace is ignored everywhere. Inside `addc:` a comma continues the
//! coefficient list only when it is followed by a bare integer that ends at a
//! comma or at the end of input, so `addc:1,1,2x` reads as two maps.

use super::MapExpr;
use crate::error::{Error, Result};

struct Parser {
    /// Non-whitespace characters with their offsets in the original text.
    chars: Vec<(usize, char)>,
    pos: usize,
    end_offset: usize,
}

impl Parser {
    fn new(text: &str) -> Self {
        Parser {
            chars: text
                .char_indices()
                .filter(|(_, c)| !c.is_whitespace())
                .collect(),
            pos: 0,
            end_offset: text.len(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.peek_at(0)
    }

    fn peek_at(&self, ahead: usize) -> Option<char> {
        self.chars.get(self.pos + ahead).map(|&(_, c)| c)
    }

    fn offset(&self) -> usize {
        self.chars
            .get(self.pos)
            .map_or(self.end_offset, |&(o, _)| o)
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            pos: self.offset(),
            msg: msg.into(),
        })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            match self.peek() {
                Some(found) => self.error(format!("expected `{c}`, found `{found}`")),
                None => self.error(format!("expected `{c}`, found end of input")),
            }
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn digits(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            s.push(c);
            self.pos += 1;
        }
        s
    }

    fn unsigned(&mut self) -> Result<u64> {
        let start = self.pos;
        let s = self.digits();
        if s.is_empty() {
            return self.error("expected an integer");
        }
        s.parse().or_else(|_| {
            self.pos = start;
            self.error("integer too large")
        })
    }

    fn signed(&mut self) -> Result<i64> {
        let start = self.pos;
        let negative = self.eat('-');
        let magnitude = self.unsigned()?;
        let value = if negative {
            0i64.checked_sub_unsigned(magnitude)
        } else {
            i64::try_from(magnitude).ok()
        };
        value.map_or_else(
            || {
                self.pos = start;
                self.error("integer out of range")
            },
            Ok,
        )
    }

    fn real(&mut self) -> Result<f64> {
        let mut s = self.digits();
        if s.is_empty() {
            return self.error("expected a number");
        }
        if self.peek() == Some('.') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
            s.push('.');
            s.push_str(&self.digits());
        }
        Ok(s.parse().expect("digits form a valid float"))
    }

    fn word(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek().filter(char::is_ascii_alphabetic) {
            s.push(c);
            self.pos += 1;
        }
        s
    }

    /// Optional `(+|-) UINT` tail.
    fn constant_tail(&mut self) -> Result<i64> {
        let negative = match self.peek() {
            Some('+') => false,
            Some('-') => true,
            _ => return Ok(0),
        };
        self.pos += 1;
        let start = self.pos;
        let magnitude = self.unsigned()?;
        let value = if negative {
            0i64.checked_sub_unsigned(magnitude)
        } else {
            i64::try_from(magnitude).ok()
        };
        value.map_or_else(
            || {
                self.pos = start;
                self.error("integer out of range")
            },
            Ok,
        )
    }

    /// True if the input at the cursor is a bare integer ending at `,` or end.
    fn bare_int_follows(&self) -> bool {
        let mut i = 0;
        if self.peek_at(0) == Some('-') {
            i += 1;
        }
        let digits_start = i;
        while self.peek_at(i).is_some_and(|c| c.is_ascii_digit()) {
            i += 1;
        }
        i > digits_start && matches!(self.peek_at(i), None | Some(','))
    }

    fn map(&mut self) -> Result<MapExpr> {
        match self.peek() {
            None => self.error("expected a map expression"),
            Some('x') => {
                self.pos += 1;
                if self.eat('^') {
                    let exp = self.unsigned()?;
                    let exp = u32::try_from(exp).or_else(|_| self.error("exponent too large"))?;
                    let c = self.constant_tail()?;
                    Ok(MapExpr::PowerPlus { exp, c })
                } else {
                    let b = self.constant_tail()?;
                    Ok(MapExpr::Affine { a: 1, b })
                }
            }
            Some(c) if c.is_ascii_digit() || c == '-' => {
                let start = self.pos;
                let lead = self.signed()?;
                if self.eat('^') {
                    self.expect('x')?;
                    let base = u64::try_from(lead).or_else(|_| {
                        self.pos = start;
                        self.error("exponential base must be nonnegative")
                    })?;
                    Ok(MapExpr::Exp { base })
                } else if self.eat('x') {
                    let b = self.constant_tail()?;
                    Ok(MapExpr::Affine { a: lead, b })
                } else {
                    self.error("expected `x` or `^x` after the coefficient")
                }
            }
            Some(c) if c.is_ascii_alphabetic() => self.named(),
            Some(c) => self.error(format!("unexpected `{c}`")),
        }
    }

    fn named(&mut self) -> Result<MapExpr> {
        let start = self.pos;
        let name = self.word();
        let expr = match name.as_str() {
            "sigma" => MapExpr::Dickson,
            "succ" => MapExpr::Affine { a: 1, b: 1 },
            "deriv" => MapExpr::PolyDeriv,
            "square" => MapExpr::PolySquare,
            "addc" => {
                self.expect(':')?;
                let mut coeffs = vec![self.signed()?];
                while self.peek() == Some(',') {
                    self.pos += 1;
                    if !self.bare_int_follows() {
                        self.pos -= 1;
                        break;
                    }
                    coeffs.push(self.signed()?);
                }
                MapExpr::PolyAddConst(coeffs)
            }
            "ca" => {
                self.expect(':')?;
                let at = self.pos;
                let rule = self.unsigned()?;
                match u8::try_from(rule) {
                    Ok(r) => MapExpr::CaRule(r),
                    Err(_) => {
                        self.pos = at;
                        return self.error("rule number must be in 0..=255");
                    }
                }
            }
            "perm" => {
                self.expect(':')?;
                MapExpr::Perm(self.unsigned()?)
            }
            "ws" => {
                self.expect(':')?;
                let epsilon = self.real()?;
                self.expect(':')?;
                let shift = self.signed()?;
                MapExpr::WsMap { epsilon, shift }
            }
            "matquad" => {
                self.expect(':')?;
                let mut m = [0i64; 4];
                for (i, slot) in m.iter_mut().enumerate() {
                    if i > 0 {
                        self.expect(',')?;
                    }
                    *slot = self.signed()?;
                }
                MapExpr::MatQuad(m)
            }
            _ => {
                self.pos = start;
                return Err(Error::UnknownName(name));
            }
        };
        Ok(expr)
    }
}

pub fn parse_map(text: &str) -> Result<MapExpr> {
    let mut p = Parser::new(text);
    let expr = p.map()?;
    if !p.at_end() {
        return p.error("unexpected trailing input");
    }
    Ok(expr)
}

pub fn parse_map_list(text: &str) -> Result<Vec<MapExpr>> {
    let mut p = Parser::new(text);
    let mut maps = vec![p.map()?];
    while p.eat(',') {
        maps.push(p.map()?);
    }
    if !p.at_end() {
        return p.error("expected `,` or end of input");
    }
    Ok(maps)
}
