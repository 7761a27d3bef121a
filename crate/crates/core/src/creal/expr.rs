use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use super::small::Small;
use super::{int, CReal, Modulus, Q};

/// Expressions over one real variable `x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    X,
    Const(Q),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    /// Division by a constant.
    Div(Box<Expr>, Q),
    Abs(Box<Expr>),
    Min(Box<Expr>, Box<Expr>),
    Max(Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("at {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("division by an expression in x or by zero")]
    BadDivision,
}

impl Expr {
    pub fn eval(&self, x: &Q) -> Q {
        match self {
            Expr::X => x.clone(),
            Expr::Const(c) => c.clone(),
            Expr::Neg(a) => -a.eval(x),
            Expr::Add(a, b) => a.eval(x) + b.eval(x),
            Expr::Sub(a, b) => a.eval(x) - b.eval(x),
            Expr::Mul(a, b) => a.eval(x) * b.eval(x),
            Expr::Div(a, c) => a.eval(x) / c,
            Expr::Abs(a) => a.eval(x).abs(),
            Expr::Min(a, b) => a.eval(x).min(b.eval(x)),
            Expr::Max(a, b) => a.eval(x).max(b.eval(x)),
        }
    }

    /// Evaluation over `i128` rationals, `None` on overflow.
    pub fn eval_small(&self, x: Small) -> Option<Small> {
        match self {
            Expr::X => Some(x),
            Expr::Const(c) => Small::from_q(c),
            Expr::Neg(a) => a.eval_small(x)?.neg(),
            Expr::Add(a, b) => a.eval_small(x)?.add(b.eval_small(x)?),
            Expr::Sub(a, b) => a.eval_small(x)?.sub(b.eval_small(x)?),
            Expr::Mul(a, b) => a.eval_small(x)?.mul(b.eval_small(x)?),
            Expr::Div(a, c) => a.eval_small(x)?.mul(Small::recip_of(c)?),
            Expr::Abs(a) => a.eval_small(x)?.abs(),
            Expr::Min(a, b) => a.eval_small(x)?.min(b.eval_small(x)?),
            Expr::Max(a, b) => a.eval_small(x)?.max(b.eval_small(x)?),
        }
    }

    pub fn eval_real(&self, x: &CReal) -> CReal {
        match self {
            Expr::X => x.clone(),
            Expr::Const(c) => CReal::from_rational(c.clone()),
            Expr::Neg(a) => a.eval_real(x).neg(),
            Expr::Add(a, b) => a.eval_real(x).add(&b.eval_real(x)),
            Expr::Sub(a, b) => a.eval_real(x).sub(&b.eval_real(x)),
            Expr::Mul(a, b) => a.eval_real(x).mul(&b.eval_real(x)),
            Expr::Div(a, c) => a.eval_real(x).scale(&c.recip()),
            Expr::Abs(a) => a.eval_real(x).abs(),
            Expr::Min(a, b) => a.eval_real(x).min(&b.eval_real(x)),
            Expr::Max(a, b) => a.eval_real(x).max(&b.eval_real(x)),
        }
    }

    /// The expression with `x` replaced by `inner`.
    pub fn compose(&self, inner: &Expr) -> Expr {
        let go = |a: &Expr| Box::new(a.compose(inner));
        match self {
            Expr::X => inner.clone(),
            Expr::Const(c) => Expr::Const(c.clone()),
            Expr::Neg(a) => Expr::Neg(go(a)),
            Expr::Add(a, b) => Expr::Add(go(a), go(b)),
            Expr::Sub(a, b) => Expr::Sub(go(a), go(b)),
            Expr::Mul(a, b) => Expr::Mul(go(a), go(b)),
            Expr::Div(a, c) => Expr::Div(go(a), c.clone()),
            Expr::Abs(a) => Expr::Abs(go(a)),
            Expr::Min(a, b) => Expr::Min(go(a), go(b)),
            Expr::Max(a, b) => Expr::Max(go(a), go(b)),
        }
    }

    fn constant(&self) -> Option<Q> {
        match self {
            Expr::X => None,
            _ => {
                if self.mentions_x() {
                    None
                } else {
                    Some(self.eval(&Q::zero()))
                }
            }
        }
    }

    fn mentions_x(&self) -> bool {
        match self {
            Expr::X => true,
            Expr::Const(_) => false,
            Expr::Neg(a) | Expr::Abs(a) | Expr::Div(a, _) => a.mentions_x(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Min(a, b) | Expr::Max(a, b) => {
                a.mentions_x() || b.mentions_x()
            }
        }
    }

    /// Range and Lipschitz constant over `[lo, hi]` by interval arithmetic.
    fn bounds(&self, lo: &Q, hi: &Q) -> ((Q, Q), Q) {
        let sup = |(a, b): &(Q, Q)| a.abs().max(b.abs());
        match self {
            Expr::X => ((lo.clone(), hi.clone()), Q::one()),
            Expr::Const(c) => ((c.clone(), c.clone()), Q::zero()),
            Expr::Neg(a) => {
                let ((l, h), lip) = a.bounds(lo, hi);
                ((-h, -l), lip)
            }
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                let ((al, ah), la) = a.bounds(lo, hi);
                let ((bl, bh), lb) = b.bounds(lo, hi);
                let range = if matches!(self, Expr::Add(..)) {
                    (al + bl, ah + bh)
                } else {
                    (al - bh, ah - bl)
                };
                (range, la + lb)
            }
            Expr::Mul(a, b) => {
                let (ra, la) = a.bounds(lo, hi);
                let (rb, lb) = b.bounds(lo, hi);
                let corners = [&ra.0 * &rb.0, &ra.0 * &rb.1, &ra.1 * &rb.0, &ra.1 * &rb.1];
                let min = corners.iter().min().unwrap().clone();
                let max = corners.iter().max().unwrap().clone();
                (( min, max), la * sup(&rb) + lb * sup(&ra))
            }
            Expr::Div(a, c) => {
                let ((l, h), lip) = a.bounds(lo, hi);
                let (l, h) = (&l / c, &h / c);
                let range = if c.is_negative() { (h, l) } else { (l, h) };
                (range, lip / c.abs())
            }
            Expr::Abs(a) => {
                let ((l, h), lip) = a.bounds(lo, hi);
                let low = if l.is_negative() && h.is_positive() { Q::zero() } else { l.abs().min(h.abs()) };
                ((low, l.abs().max(h.abs())), lip)
            }
            Expr::Min(a, b) | Expr::Max(a, b) => {
                let ((al, ah), la) = a.bounds(lo, hi);
                let ((bl, bh), lb) = b.bounds(lo, hi);
                let range = if matches!(self, Expr::Min(..)) {
                    (al.min(bl), ah.min(bh))
                } else {
                    (al.max(bl), ah.max(bh))
                };
                (range, la.max(lb))
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::X => write!(f, "x"),
            Expr::Const(c) => write!(f, "{}", super::show(c)),
            Expr::Neg(a) => write!(f, "-({})", a),
            Expr::Add(a, b) => write!(f, "({} + {})", a, b),
            Expr::Sub(a, b) => write!(f, "({} - {})", a, b),
            Expr::Mul(a, b) => write!(f, "({} * {})", a, b),
            Expr::Div(a, c) => write!(f, "({} / {})", a, super::show(c)),
            Expr::Abs(a) => write!(f, "abs({})", a),
            Expr::Min(a, b) => write!(f, "min({}, {})", a, b),
            Expr::Max(a, b) => write!(f, "max({}, {})", a, b),
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    param: Option<Q>,
}

impl Parser<'_> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, ExprError> {
        Err(ExprError::Syntax {
            pos: self.pos,
            message: message.into(),
        })
    }

    fn skip(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip();
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

    fn expect(&mut self, c: u8) -> Result<(), ExprError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected '{}'", c as char))
        }
    }

    fn sum(&mut self) -> Result<Expr, ExprError> {
        let mut acc = self.product()?;
        loop {
            if self.eat(b'+') {
                acc = Expr::Add(Box::new(acc), Box::new(self.product()?));
            } else if self.eat(b'-') {
                acc = Expr::Sub(Box::new(acc), Box::new(self.product()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn product(&mut self) -> Result<Expr, ExprError> {
        let mut acc = self.power()?;
        loop {
            if self.eat(b'*') {
                acc = Expr::Mul(Box::new(acc), Box::new(self.power()?));
            } else if self.eat(b'/') {
                let d = self.power()?;
                match d.constant() {
                    Some(c) if !c.is_zero() => acc = Expr::Div(Box::new(acc), c),
                    _ => return Err(ExprError::BadDivision),
                }
            } else if matches!(self.peek(), Some(b'x' | b'n' | b'(' | b'a' | b'm')) {
                acc = Expr::Mul(Box::new(acc), Box::new(self.power()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.unary()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let start = self.pos;
        let n = self.natural()?;
        if n == 0 || n > 64 {
            self.pos = start;
            return self.err("exponent must be between 1 and 64");
        }
        Ok((1..n).fold(base.clone(), |acc, _| Expr::Mul(Box::new(acc), Box::new(base.clone()))))
    }

    fn natural(&mut self) -> Result<u32, ExprError> {
        self.skip();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a number");
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .or_else(|_| self.err("number too large"))
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.eat(b'-') {
            return Ok(Expr::Neg(Box::new(self.power()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.sum()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(b'|') => {
                self.pos += 1;
                let e = self.sum()?;
                self.expect(b'|')?;
                Ok(Expr::Abs(Box::new(e)))
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let mut v = Q::from_integer(std::str::from_utf8(&self.src[start..self.pos]).unwrap().parse::<BigInt>().unwrap());
                if self.src.get(self.pos) == Some(&b'.') {
                    self.pos += 1;
                    let fs = self.pos;
                    while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                        self.pos += 1;
                    }
                    let digits = std::str::from_utf8(&self.src[fs..self.pos]).unwrap();
                    if !digits.is_empty() {
                        let num: BigInt = digits.parse().unwrap();
                        v += Q::new(num, BigInt::from(10).pow(digits.len() as u32));
                    }
                }
                Ok(Expr::Const(v))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let word = std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();
                match word.as_str() {
                    "x" => Ok(Expr::X),
                    "n" if self.param.is_some() => Ok(Expr::Const(self.param.clone().unwrap())),
                    "abs" => {
                        self.expect(b'(')?;
                        let e = self.sum()?;
                        self.expect(b')')?;
                        Ok(Expr::Abs(Box::new(e)))
                    }
                    "min" | "max" => {
                        self.expect(b'(')?;
                        let a = self.sum()?;
                        self.expect(b',')?;
                        let b = self.sum()?;
                        self.expect(b')')?;
                        Ok(if word == "min" {
                            Expr::Min(Box::new(a), Box::new(b))
                        } else {
                            Expr::Max(Box::new(a), Box::new(b))
                        })
                    }
                    _ => {
                        self.pos = start;
                        self.err(format!("unknown name '{}'", word))
                    }
                }
            }
            _ => self.err("expected an expression"),
        }
    }
}

pub fn parse_expr(src: &str) -> Result<Expr, ExprError> {
    parse_with(src, None)
}

/// Parses with the name `n` bound to a constant.
pub fn parse_with(src: &str, param: Option<Q>) -> Result<Expr, ExprError> {
    let mut p = Parser {
        src: src.as_bytes(),
        pos: 0,
        param,
    };
    let e = p.sum()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(e)
}

/// A function `[lo, hi] -> R` given by an expression, with a Lipschitz
/// constant derived by interval arithmetic.
#[derive(Clone, Debug)]
pub struct RealFn {
    pub source: String,
    pub expr: Expr,
    pub domain: (Q, Q),
    lipschitz: Q,
    modulus: Option<Modulus>,
}

impl RealFn {
    pub fn parse(src: &str) -> Result<RealFn, ExprError> {
        RealFn::on(src, Q::zero(), Q::one())
    }

    pub fn on(src: &str, lo: Q, hi: Q) -> Result<RealFn, ExprError> {
        Ok(RealFn::from_expr(src.trim(), parse_expr(src)?, lo, hi))
    }

    /// Member `n` of the family written with the name `n`.
    pub fn member(src: &str, n: u64) -> Result<RealFn, ExprError> {
        let expr = parse_with(src, Some(int(n as i64)))?;
        Ok(RealFn::from_expr(&format!("{} at n = {}", src.trim(), n), expr, Q::zero(), Q::one()))
    }

    pub fn from_expr(source: &str, expr: Expr, lo: Q, hi: Q) -> RealFn {
        let (_, lipschitz) = expr.bounds(&lo, &hi);
        RealFn {
            source: source.to_string(),
            expr,
            domain: (lo, hi),
            lipschitz,
            modulus: None,
        }
    }

    pub fn with_modulus(mut self, g: Modulus) -> RealFn {
        self.modulus = Some(g);
        self
    }

    pub fn eval(&self, x: &Q) -> Q {
        self.expr.eval(x)
    }

    pub fn eval_real(&self, x: &CReal) -> CReal {
        self.expr.eval_real(x)
    }

    pub fn eval_small(&self, x: Small) -> Option<Small> {
        self.expr.eval_small(x)
    }

    pub fn in_domain(&self, x: &Q) -> bool {
        &self.domain.0 <= x && x <= &self.domain.1
    }

    pub fn lipschitz(&self) -> &Q {
        &self.lipschitz
    }

    /// Range enclosure on the domain.
    pub fn range(&self) -> (Q, Q) {
        self.expr.bounds(&self.domain.0, &self.domain.1).0
    }

    /// `k |-> ceil(L) * k + 1`
    pub fn auto_modulus(&self) -> Modulus {
        let c = self.lipschitz.ceil().to_integer();
        let c: u64 = c.try_into().unwrap_or(u64::MAX);
        Modulus::affine(c, 1)
    }

    /// The attached modulus, or the derived one.
    pub fn modulus(&self) -> Modulus {
        self.modulus.clone().unwrap_or_else(|| self.auto_modulus())
    }

    pub fn has_modulus(&self) -> bool {
        self.modulus.is_some()
    }
}

impl fmt::Display for RealFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.source)
    }
}
