//! Recursive-descent parser for field expressions.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('-' | '+') unary | power
//! power  := atom ('^' int)?           int may be signed or parenthesised
//! atom   := number | name | func '(' expr ')' | '(' expr ')'
//! ```
//!
//! Names: `x`, `y`, `z` (= x + iy), `i`, `pi`, `e`. Functions: `exp`, `sin`,
//! `cos`, `sinh`, `cosh`, `conj`, `re`, `im`.

use num_complex::Complex64;

use super::{CExpr, Expr};
use crate::error::{Error, Result};

/// Parses a real-valued expression; rejects anything with a nonzero
/// imaginary part.
pub fn parse_real(text: &str) -> Result<Expr> {
    let c = parse_complex(text)?;
    if !c.is_real() {
        return Err(Error::Parse {
            pos: 0,
            msg: "expression is not real-valued".into(),
        });
    }
    Ok(c.re)
}

pub fn parse_complex(text: &str) -> Result<CExpr> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
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

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", c as char)))
        }
    }

    fn expr(&mut self) -> Result<CExpr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = lhs.add(&self.term()?);
            } else if self.eat(b'-') {
                lhs = lhs.sub(&self.term()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<CExpr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = lhs.mul(&self.unary()?);
            } else if self.eat(b'/') {
                lhs = lhs.div(&self.unary()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<CExpr> {
        if self.eat(b'-') {
            Ok(self.unary()?.neg())
        } else if self.eat(b'+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<CExpr> {
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let n = if self.eat(b'(') {
            let n = self.integer()?;
            self.expect(b')')?;
            n
        } else {
            self.integer()?
        };
        Ok(base.powi(n))
    }

    fn integer(&mut self) -> Result<i32> {
        let neg = self.eat(b'-');
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("exponent must be an integer literal"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        let n: i32 = digits
            .parse()
            .map_err(|_| self.err("exponent out of range"))?;
        Ok(if neg { -n } else { n })
    }

    fn number(&mut self) -> Result<f64> {
        let start = self.pos;
        let bytes = self.src;
        let mut i = self.pos;
        while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
            i += 1;
        }
        if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
            let mut j = i + 1;
            if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                j += 1;
            }
            if j < bytes.len() && bytes[j].is_ascii_digit() {
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                i = j;
            }
        }
        self.pos = i;
        std::str::from_utf8(&bytes[start..i])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse {
                pos: start,
                msg: "malformed number".into(),
            })
    }

    fn atom(&mut self) -> Result<CExpr> {
        match self.peek() {
            None => Err(self.err("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                Ok(CExpr::real(Expr::constant(self.number()?)))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii name");
                self.name(name, start)
            }
            Some(_) => Err(self.err("unexpected character")),
        }
    }

    fn name(&mut self, name: &str, start: usize) -> Result<CExpr> {
        let func: Option<fn(&CExpr) -> CExpr> = match name {
            "exp" => Some(CExpr::exp),
            "sin" => Some(CExpr::sin),
            "cos" => Some(CExpr::cos),
            "sinh" => Some(CExpr::sinh),
            "cosh" => Some(CExpr::cosh),
            "conj" => Some(CExpr::conj),
            "re" => Some(CExpr::re_part),
            "im" => Some(CExpr::im_part),
            _ => None,
        };
        if let Some(f) = func {
            self.expect(b'(')?;
            let arg = self.expr()?;
            self.expect(b')')?;
            return Ok(f(&arg));
        }
        match name {
            "x" => Ok(CExpr::real(Expr::x())),
            "y" => Ok(CExpr::real(Expr::y())),
            "z" => Ok(CExpr::z()),
            "i" => Ok(CExpr::i()),
            "pi" => Ok(CExpr::real(Expr::constant(std::f64::consts::PI))),
            "e" => Ok(CExpr::constant(Complex64::new(std::f64::consts::E, 0.0))),
            _ => Err(Error::Parse {
                pos: start,
                msg: format!("unknown name `{name}`"),
            }),
        }
    }
}
