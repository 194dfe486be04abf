//! The coefficient expression mini-language of problem files.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//!   expr   := term (('+' | '-') term)*
//!   term   := factor ('*' factor)*
//!   factor := atom ('^' uint)?
//!   atom   := number 'i'? | 'z'<d> | 'zb'<d> | 'exp' '(' expr ')'
//!           | '(' expr ')' | '-' factor
//! ```
//!
//! Numbers are decimal with an optional fractional part and exponent; they
//! parse into exact rationals, so series-backend coefficients stay exact.
//! `z1..zn` are the complex coordinates, `zb1..zbn` their conjugates.

use dbar_core::coeff::CRat;
use dbar_core::series::{SeriesCoeff, SeriesCtx};
use dbar_core::Coeff;
use num::complex::Complex64;
use num::{BigInt, BigRational, Zero};

#[derive(Clone, Debug)]
pub enum Expr {
    Const(BigRational, BigRational),
    /// Coordinate (0-based); `conj` marks z̄.
    Var { index: usize, conj: bool },
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, u32),
    Exp(Box<Expr>),
}

#[derive(Debug)]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "column {}: {}", self.offset + 1, self.message)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    n: usize,
}

pub fn parse(src: &str, n: usize) -> Result<Expr, ParseError> {
    let mut p = Parser { src: src.as_bytes(), pos: 0, n };
    p.skip_ws();
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

impl<'a> Parser<'a> {
    fn error(&self, message: &str) -> ParseError {
        ParseError { offset: self.pos, message: message.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            self.skip_ws();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                let rhs = self.term()?;
                acc = Expr::Add(Box::new(acc), Box::new(rhs));
            } else if self.eat(b'-') {
                let rhs = self.term()?;
                acc = Expr::Sub(Box::new(acc), Box::new(rhs));
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.factor()?;
        while self.eat(b'*') {
            let rhs = self.factor()?;
            acc = Expr::Mul(Box::new(acc), Box::new(rhs));
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let start = self.pos;
            let mut value: u32 = 0;
            let mut any = false;
            while let Some(c) = self.peek() {
                if c.is_ascii_digit() {
                    any = true;
                    value = value
                        .checked_mul(10)
                        .and_then(|v| v.checked_add((c - b'0') as u32))
                        .ok_or_else(|| self.error("exponent too large"))?;
                    self.pos += 1;
                } else {
                    break;
                }
            }
            self.skip_ws();
            if !any {
                self.pos = start;
                return Err(self.error("expected a nonnegative integer exponent"));
            }
            return Ok(Expr::Pow(Box::new(base), value));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        self.skip_ws();
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                self.skip_ws();
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(e)
            }
            Some(b'-') => {
                self.pos += 1;
                self.skip_ws();
                Ok(Expr::Neg(Box::new(self.factor()?)))
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            _ => Err(self.error("expected a number, coordinate, 'exp' or '('")),
        }
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        let mut digits = String::new();
        let mut frac_len = 0usize;
        let mut seen_dot = false;
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                digits.push(c as char);
                if seen_dot {
                    frac_len += 1;
                }
                self.pos += 1;
            } else if c == b'.' && !seen_dot {
                seen_dot = true;
                self.pos += 1;
            } else {
                break;
            }
        }
        if digits.is_empty() {
            self.pos = start;
            return Err(self.error("malformed number"));
        }
        // Optional decimal exponent.
        let mut exp10: i64 = 0;
        if matches!(self.peek(), Some(b'e') | Some(b'E')) {
            let save = self.pos;
            self.pos += 1;
            let neg = if self.peek() == Some(b'-') {
                self.pos += 1;
                true
            } else {
                if self.peek() == Some(b'+') {
                    self.pos += 1;
                }
                false
            };
            let mut val: i64 = 0;
            let mut any = false;
            while let Some(c) = self.peek() {
                if c.is_ascii_digit() {
                    any = true;
                    val = val * 10 + (c - b'0') as i64;
                    self.pos += 1;
                } else {
                    break;
                }
            }
            if any {
                exp10 = if neg { -val } else { val };
            } else {
                self.pos = save; // it was an identifier boundary, not an exponent
            }
        }
        let numer: BigInt = digits.parse().map_err(|_| self.error("malformed number"))?;
        let mut value = BigRational::new(numer, BigInt::from(10u8).pow(frac_len as u32));
        if exp10 > 0 {
            value *= BigRational::from_integer(BigInt::from(10u8).pow(exp10 as u32));
        } else if exp10 < 0 {
            value /= BigRational::from_integer(BigInt::from(10u8).pow((-exp10) as u32));
        }
        // Trailing 'i' makes the literal imaginary.
        if self.peek() == Some(b'i') {
            self.pos += 1;
            self.skip_ws();
            return Ok(Expr::Const(BigRational::zero(), value));
        }
        self.skip_ws();
        Ok(Expr::Const(value, BigRational::zero()))
    }

    fn ident(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() {
                self.pos += 1;
            } else {
                break;
            }
        }
        let word = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let result = if word == "exp" {
            self.skip_ws();
            if !self.eat(b'(') {
                return Err(self.error("expected '(' after exp"));
            }
            let inner = self.expr()?;
            if !self.eat(b')') {
                return Err(self.error("expected ')'"));
            }
            return Ok(Expr::Exp(Box::new(inner)));
        } else if word == "i" {
            Expr::Const(BigRational::zero(), BigRational::from_integer(1.into()))
        } else if let Some(rest) = word.strip_prefix("zb") {
            let idx: usize =
                rest.parse().map_err(|_| self.error("malformed conjugate coordinate"))?;
            if idx == 0 || idx > self.n {
                return Err(self.error(&format!("coordinate zb{idx} out of range 1..={}", self.n)));
            }
            Expr::Var { index: idx - 1, conj: true }
        } else if let Some(rest) = word.strip_prefix('z') {
            let idx: usize = rest.parse().map_err(|_| self.error("malformed coordinate"))?;
            if idx == 0 || idx > self.n {
                return Err(self.error(&format!("coordinate z{idx} out of range 1..={}", self.n)));
            }
            Expr::Var { index: idx - 1, conj: false }
        } else {
            return Err(self.error(&format!("unknown identifier '{word}'")));
        };
        self.skip_ws();
        Ok(result)
    }
}

/// Evaluates an expression into an exact truncated series.
pub fn eval_series(e: &Expr, ctx: &SeriesCtx, acc: u32) -> Result<SeriesCoeff, String> {
    match e {
        Expr::Const(re, im) => {
            let c = CRat::new(re.clone(), im.clone());
            Ok(with_acc(SeriesCoeff::constant(ctx, &c), acc, ctx))
        }
        Expr::Var { index, conj } => {
            let mut zp = vec![0u32; ctx.n];
            let mut zb = vec![0u32; ctx.n];
            if *conj {
                zb[*index] = 1;
            } else {
                zp[*index] = 1;
            }
            Ok(SeriesCoeff::monomial(ctx, dbar_core::coeff::crat(1, 0), &zp, &zb, acc))
        }
        Expr::Add(a, b) => Ok(eval_series(a, ctx, acc)?.add(&eval_series(b, ctx, acc)?)),
        Expr::Sub(a, b) => Ok(eval_series(a, ctx, acc)?.sub(&eval_series(b, ctx, acc)?)),
        Expr::Mul(a, b) => Ok(eval_series(a, ctx, acc)?.mul(&eval_series(b, ctx, acc)?)),
        Expr::Neg(a) => Ok(eval_series(a, ctx, acc)?.neg()),
        Expr::Pow(a, k) => Ok(eval_series(a, ctx, acc)?.pow(*k)),
        Expr::Exp(a) => eval_series(a, ctx, acc)?.exp().map_err(|e| e.to_string()),
    }
}

fn with_acc(s: SeriesCoeff, acc: u32, ctx: &SeriesCtx) -> SeriesCoeff {
    // Adding the zero series of the requested accuracy clamps the result.
    let cap = SeriesCoeff::new(ctx, acc);
    s.add(&cap)
}

/// Evaluates an expression numerically at a point.
pub fn eval_point(e: &Expr, z: &[Complex64]) -> Complex64 {
    match e {
        Expr::Const(re, im) => {
            use num::ToPrimitive;
            Complex64::new(re.to_f64().unwrap_or(f64::NAN), im.to_f64().unwrap_or(f64::NAN))
        }
        Expr::Var { index, conj } => {
            if *conj {
                z[*index].conj()
            } else {
                z[*index]
            }
        }
        Expr::Add(a, b) => eval_point(a, z) + eval_point(b, z),
        Expr::Sub(a, b) => eval_point(a, z) - eval_point(b, z),
        Expr::Mul(a, b) => eval_point(a, z) * eval_point(b, z),
        Expr::Neg(a) => -eval_point(a, z),
        Expr::Pow(a, k) => eval_point(a, z).powu(*k),
        Expr::Exp(a) => eval_point(a, z).exp(),
    }
}
