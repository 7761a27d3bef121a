use std::fmt;
use std::sync::Arc;

use super::ExprError;
use crate::majorizer::NatFn;

/// Expressions over a natural variable `k`, evaluated with saturation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModExpr {
    K,
    /// Family index.
    N,
    Num(u64),
    Add(Box<ModExpr>, Box<ModExpr>),
    Mul(Box<ModExpr>, Box<ModExpr>),
    Max(Box<ModExpr>, Box<ModExpr>),
    Pow2(Box<ModExpr>),
}

impl ModExpr {
    pub fn eval(&self, k: u64) -> u64 {
        self.eval_at(0, k)
    }

    /// Value with the family index set to `n`.
    pub fn eval_at(&self, n: u64, k: u64) -> u64 {
        match self {
            ModExpr::K => k,
            ModExpr::N => n,
            ModExpr::Num(n) => *n,
            ModExpr::Add(a, b) => a.eval_at(n, k).saturating_add(b.eval_at(n, k)),
            ModExpr::Mul(a, b) => a.eval_at(n, k).saturating_mul(b.eval_at(n, k)),
            ModExpr::Max(a, b) => a.eval_at(n, k).max(b.eval_at(n, k)),
            ModExpr::Pow2(a) => {
                let e = a.eval_at(n, k);
                if e >= 64 {
                    u64::MAX
                } else {
                    1u64 << e
                }
            }
        }
    }

    pub fn parse(src: &str) -> Result<ModExpr, ExprError> {
        let mut p = Parser { src: src.as_bytes(), pos: 0 };
        let e = p.sum()?;
        if p.peek().is_some() {
            return p.err("trailing input");
        }
        Ok(e)
    }
}

impl fmt::Display for ModExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModExpr::K => write!(f, "k"),
            ModExpr::N => write!(f, "n"),
            ModExpr::Num(n) => write!(f, "{}", n),
            ModExpr::Add(a, b) => write!(f, "({} + {})", a, b),
            ModExpr::Mul(a, b) => write!(f, "({} * {})", a, b),
            ModExpr::Max(a, b) => write!(f, "max({}, {})", a, b),
            ModExpr::Pow2(a) => write!(f, "pow2({})", a),
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err<T>(&self, message: &str) -> Result<T, ExprError> {
        Err(ExprError::Syntax {
            pos: self.pos,
            message: message.to_string(),
        })
    }

    fn peek(&mut self) -> Option<u8> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
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
            self.err(&format!("expected '{}'", c as char))
        }
    }

    fn sum(&mut self) -> Result<ModExpr, ExprError> {
        let mut acc = self.product()?;
        while self.eat(b'+') {
            acc = ModExpr::Add(Box::new(acc), Box::new(self.product()?));
        }
        Ok(acc)
    }

    fn product(&mut self) -> Result<ModExpr, ExprError> {
        let mut acc = self.atom()?;
        loop {
            if self.eat(b'*') {
                acc = ModExpr::Mul(Box::new(acc), Box::new(self.atom()?));
            } else if matches!(self.peek(), Some(b'k' | b'n' | b'(' | b'm' | b'p')) {
                acc = ModExpr::Mul(Box::new(acc), Box::new(self.atom()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn atom(&mut self) -> Result<ModExpr, ExprError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.sum()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                match std::str::from_utf8(&self.src[start..self.pos]).unwrap().parse() {
                    Ok(n) => Ok(ModExpr::Num(n)),
                    Err(_) => self.err("number too large"),
                }
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let word = std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();
                match word.as_str() {
                    "k" => Ok(ModExpr::K),
                    "n" => Ok(ModExpr::N),
                    "max" => {
                        self.expect(b'(')?;
                        let a = self.sum()?;
                        self.expect(b',')?;
                        let b = self.sum()?;
                        self.expect(b')')?;
                        Ok(ModExpr::Max(Box::new(a), Box::new(b)))
                    }
                    "pow2" => {
                        self.expect(b'(')?;
                        let a = self.sum()?;
                        self.expect(b')')?;
                        Ok(ModExpr::Pow2(Box::new(a)))
                    }
                    _ => {
                        self.pos = start;
                        self.err(&format!("unknown name '{}'", word))
                    }
                }
            }
            _ => self.err("expected an expression"),
        }
    }
}

/// A function `N -> N` used as a modulus of continuity or of convergence.
#[derive(Clone)]
pub struct Modulus {
    pub source: String,
    f: NatFn,
}

impl fmt::Debug for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Modulus({})", self.source)
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.source)
    }
}

impl Modulus {
    pub fn parse(src: &str) -> Result<Modulus, ExprError> {
        let e = ModExpr::parse(src)?;
        Ok(Modulus {
            source: src.trim().to_string(),
            f: Arc::new(move |k| e.eval(k)),
        })
    }

    pub fn from_fn(source: impl Into<String>, f: impl Fn(u64) -> u64 + Send + Sync + 'static) -> Modulus {
        Modulus {
            source: source.into(),
            f: Arc::new(f),
        }
    }

    /// `k |-> a * k + b`
    pub fn affine(a: u64, b: u64) -> Modulus {
        Modulus::from_fn(format!("{}k + {}", a, b), move |k| a.saturating_mul(k).saturating_add(b))
    }

    pub fn at(&self, k: u64) -> u64 {
        (self.f)(k)
    }

    /// `max_{i <= k} g(i)`, the least monotone majorant at `k`.
    pub fn closure_at(&self, k: u64) -> u64 {
        (0..=k).map(|i| self.at(i)).max().unwrap_or(0)
    }

    pub fn closure(&self) -> Modulus {
        let g = self.clone();
        Modulus::from_fn(format!("closure({})", self.source), move |k| g.closure_at(k))
    }

    pub fn is_monotone_upto(&self, n: u64) -> bool {
        (0..n).all(|k| self.at(k) <= self.at(k + 1))
    }
}

/// A family `n |-> g_n` of moduli written over `k` and `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModFamily {
    pub source: String,
    pub expr: ModExpr,
}

impl ModFamily {
    pub fn parse(src: &str) -> Result<ModFamily, ExprError> {
        Ok(ModFamily {
            source: src.trim().to_string(),
            expr: ModExpr::parse(src)?,
        })
    }

    pub fn at(&self, n: u64, k: u64) -> u64 {
        self.expr.eval_at(n, k)
    }

    pub fn member(&self, n: u64) -> Modulus {
        let e = self.expr.clone();
        Modulus::from_fn(format!("{} at n = {}", self.source, n), move |k| e.eval_at(n, k))
    }
}
