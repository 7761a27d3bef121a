//! Exact constructive reals on top of arbitrary precision rationals.

mod expr;
mod modulus;
mod partition;
mod small;

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::majorizer::Seq;

pub use expr::{parse_expr, Expr, ExprError, RealFn};
pub use modulus::{ModExpr, ModFamily, Modulus};
pub use partition::{riemann_sum, Partition, Tag};
pub use small::Small;

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// `2^-n`
pub fn dyadic(n: u32) -> Q {
    Q::new(BigInt::one(), BigInt::one() << n as usize)
}

/// Nearest multiple of `2^-p`.
pub fn round_dyadic(x: &Q, p: u32) -> Q {
    let scale = BigInt::one() << p as usize;
    let scaled = x * Q::from_integer(scale.clone());
    let half = q(1, 2);
    Q::new((scaled + half).floor().to_integer(), scale)
}

pub fn ceil_int(x: &Q) -> BigInt {
    x.ceil().to_integer()
}

/// Number of bits needed so that `2^bits >= x` for `x >= 1`.
pub fn bits_above(x: &Q) -> u32 {
    let c = ceil_int(x);
    if c <= BigInt::one() {
        return 0;
    }
    (c - BigInt::one()).bits() as u32
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CRealError {
    #[error("point {0} outside the domain")]
    DomainViolation(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
}

type Approx = Arc<dyn Fn(u32) -> Q + Send + Sync>;

/// A real given by approximations `approx(n)` within `2^-(n+1)` of its value,
/// so that any two approximations satisfy `|q_n - q_{n+i}| < 2^-n`.
#[derive(Clone)]
pub struct CReal {
    exact: Option<Q>,
    approx: Approx,
}

impl fmt::Debug for CReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.exact {
            Some(v) => write!(f, "CReal({})", v),
            None => write!(f, "CReal(~{})", self.approx(20)),
        }
    }
}

impl CReal {
    pub fn from_rational(v: Q) -> CReal {
        let c = v.clone();
        CReal {
            exact: Some(v),
            approx: Arc::new(move |_| c.clone()),
        }
    }

    pub fn from_int(n: i64) -> CReal {
        CReal::from_rational(int(n))
    }

    /// Trusts `f(n)` to lie within `2^-(n+1)` of the value.
    pub fn from_fast_sequence(f: impl Fn(u32) -> Q + Send + Sync + 'static) -> CReal {
        CReal {
            exact: None,
            approx: Arc::new(f),
        }
    }

    /// Clamps an arbitrary rational sequence into a fast-converging one: the
    /// sequence is frozen at the first step that moves by `2^-(k+1)` or more.
    pub fn from_raw(raw: impl Fn(u32) -> Q + Send + Sync + 'static) -> CReal {
        let raw = Arc::new(raw);
        CReal::from_fast_sequence(move |n| hat(&*raw, n + 1))
    }

    pub fn exact(&self) -> Option<&Q> {
        self.exact.as_ref()
    }

    /// Within `2^-(n+1)` of the value.
    pub fn approx(&self, n: u32) -> Q {
        (self.approx)(n)
    }

    /// `[x](k)`, within `2^-k` of the value.
    pub fn approx_at(&self, k: u32) -> Q {
        self.approx(k)
    }

    fn lift2(&self, other: &CReal, exact: impl Fn(&Q, &Q) -> Q + Send + Sync + 'static, shift: u32) -> CReal {
        if let (Some(a), Some(b)) = (&self.exact, &other.exact) {
            return CReal::from_rational(exact(a, b));
        }
        let (x, y) = (self.clone(), other.clone());
        CReal::from_fast_sequence(move |n| round_dyadic(&exact(&x.approx(n + shift), &y.approx(n + shift)), n + shift + 1))
    }

    fn lift1(&self, exact: impl Fn(&Q) -> Q + Send + Sync + 'static) -> CReal {
        if let Some(a) = &self.exact {
            return CReal::from_rational(exact(a));
        }
        let x = self.clone();
        CReal::from_fast_sequence(move |n| exact(&x.approx(n)))
    }

    pub fn add(&self, other: &CReal) -> CReal {
        self.lift2(other, |a, b| a + b, 2)
    }

    pub fn sub(&self, other: &CReal) -> CReal {
        self.lift2(other, |a, b| a - b, 2)
    }

    pub fn neg(&self) -> CReal {
        self.lift1(|a| -a)
    }

    pub fn abs(&self) -> CReal {
        self.lift1(|a| a.abs())
    }

    pub fn min(&self, other: &CReal) -> CReal {
        self.lift2(other, |a, b| a.min(b).clone(), 1)
    }

    pub fn max(&self, other: &CReal) -> CReal {
        self.lift2(other, |a, b| a.max(b).clone(), 1)
    }

    pub fn scale(&self, c: &Q) -> CReal {
        if let Some(a) = &self.exact {
            return CReal::from_rational(a * c);
        }
        let x = self.clone();
        let c = c.clone();
        let shift = bits_above(&(c.abs() + Q::one()));
        CReal::from_fast_sequence(move |n| round_dyadic(&(&c * x.approx(n + shift + 1)), n + 2))
    }

    pub fn mul(&self, other: &CReal) -> CReal {
        if let (Some(a), Some(b)) = (&self.exact, &other.exact) {
            return CReal::from_rational(a * b);
        }
        let bx = self.approx(0).abs() + Q::one();
        let by = other.approx(0).abs() + Q::one();
        let shift = 1 + bits_above(&(bx + by));
        let (x, y) = (self.clone(), other.clone());
        CReal::from_fast_sequence(move |n| round_dyadic(&(x.approx(n + shift) * y.approx(n + shift)), n + 3))
    }
}

/// Clamping: `raw(n)` unless some earlier step moved too far.
fn hat(raw: &dyn Fn(u32) -> Q, n: u32) -> Q {
    let mut prev = raw(0);
    for k in 0..n {
        let next = raw(k + 1);
        if (&next - &prev).abs() >= dyadic(k + 1) {
            return prev;
        }
        prev = next;
    }
    prev
}

pub fn from_rational(v: Q) -> CReal {
    CReal::from_rational(v)
}

pub fn approx_at(x: &CReal, k: u32) -> Q {
    x.approx_at(k)
}

/// Outcome of comparing two reals up to a precision.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EqVerdict {
    EqualAt { k: u32 },
    Apart { n: u32, gap: String },
    Undecided { k: u32 },
}

/// Apart at `n` when `|[x](n) - [y](n)| > 2^-(n-1)`; equal at `k` when the
/// approximations at `k` are within `2^-k`.
pub fn eq_real(x: &CReal, y: &CReal, k: u32) -> EqVerdict {
    for n in 0..=k {
        let d = (x.approx_at(n) - y.approx_at(n)).abs();
        if d > dyadic(n) * int(2) {
            return EqVerdict::Apart { n, gap: d.to_string() };
        }
    }
    let d = (x.approx_at(k) - y.approx_at(k)).abs();
    if d <= dyadic(k) {
        EqVerdict::EqualAt { k }
    } else {
        EqVerdict::Undecided { k }
    }
}

/// `sum_{n >= 1} a(n) / 2^n` for digits `a(1), a(2), ...` followed by a
/// constant tail. Nonzero digits count as 1.
pub fn binary_real(digits: &[u64], tail: u64) -> CReal {
    let mut v = Q::zero();
    for (i, d) in digits.iter().enumerate() {
        if *d != 0 {
            v += dyadic(i as u32 + 1);
        }
    }
    if tail != 0 {
        v += dyadic(digits.len() as u32);
    }
    CReal::from_rational(v)
}

/// `b(f)(k) = 0` if `f(k) = 0` and `1` otherwise.
pub fn binarize(f: &Seq) -> Seq {
    Seq::new(
        f.prefix.iter().map(|&v| u64::from(v != 0)).collect(),
        u64::from(f.tail != 0),
    )
}

/// `[I(f, 0, x)](k) = sum_{i=0}^{i(x)} f(i/2^k) / 2^k` with `i(x) = ceil(x * 2^k)`.
pub fn integral(f: &RealFn, x: &CReal, k: u32) -> Q {
    let scale = BigInt::one() << k as usize;
    let xs = match x.exact() {
        Some(v) => v.clone(),
        None => x.approx(k + 2),
    };
    let top = ceil_int(&(xs * Q::from_integer(scale.clone())));
    let top = top.to_i64().unwrap_or(0).max(0);
    let step = Q::new(BigInt::one(), scale);
    let mut sum = Q::zero();
    for i in 0..=top {
        sum += f.eval(&(&step * int(i)));
    }
    sum * step
}

/// `[I(f, 0, b)](p) - [I(f, 0, a)](p)` for rationals `a <= b`, summing only
/// the grid points in between.
pub fn integral_between(f: &RealFn, a: &Q, b: &Q, p: u32) -> Q {
    let scale = Q::from_integer(BigInt::one() << p as usize);
    let lo = ceil_int(&(a * &scale));
    let hi = ceil_int(&(b * &scale));
    let mut sum = Q::zero();
    let mut i = lo + BigInt::one();
    while i <= hi {
        sum += f.eval(&(Q::from_integer(i.clone()) / &scale));
        i += BigInt::one();
    }
    sum / scale
}

/// Precision at which `integral` is within `1/k` of `I(f, 0, x)` on `[0, 1]`
/// for a function with modulus `g`.
pub fn integral_precision(f: &RealFn, g: &Modulus, k: u64) -> u32 {
    let bound = f.eval(&Q::zero()).abs() + int(g.closure_at(1) as i64) + Q::one();
    let need = std::cmp::max(
        int(g.closure_at(2 * k) as i64 + 1),
        bound * int(4 * k as i64),
    );
    bits_above(&need)
}

/// `[I(f, 0, x)](p)` at the precision from `integral_precision`.
pub fn integral_converged(f: &RealFn, g: &Modulus, x: &CReal, k: u64) -> Q {
    integral(f, x, integral_precision(f, g, k))
}

/// `(f(x + e) - f(x)) / e`, exact over rational `e`.
pub fn diff_quotient(f: &RealFn, x: &CReal, eps: &Q) -> Result<CReal, CRealError> {
    if eps.is_zero() {
        return Err(CRealError::DomainViolation("difference quotient with step 0".into()));
    }
    let e = CReal::from_rational(eps.clone());
    let moved = x.add(&e);
    for p in [x, &moved] {
        if let Some(v) = p.exact() {
            if !f.in_domain(v) {
                return Err(CRealError::DomainViolation(v.to_string()));
            }
        }
    }
    Ok(f.eval_real(&moved).sub(&f.eval_real(x)).scale(&eps.recip()))
}

/// Renders a rational as `n/d` or `n`.
pub fn show(v: &Q) -> String {
    if v.denom().is_one() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(src: &str) -> RealFn {
        RealFn::parse(src).unwrap()
    }

    #[test]
    fn arithmetic_on_rationals() {
        assert_eq!(from_rational(q(1, 2)).approx_at(10), q(1, 2));
        let s = from_rational(q(1, 3)).add(&from_rational(q(1, 6)));
        assert!(matches!(eq_real(&s, &from_rational(q(1, 2)), 30), EqVerdict::EqualAt { .. }));
    }

    #[test]
    fn self_difference_is_zero() {
        let x = CReal::from_raw(|n| Q::one() - dyadic(n) * q(1, 3));
        let d = x.sub(&x).abs();
        assert!(matches!(eq_real(&d, &CReal::from_int(0), 40), EqVerdict::EqualAt { .. }));
    }

    #[test]
    fn eq_real_examples() {
        let r = CReal::from_raw(|n| q(1, 2) + dyadic(n + 2));
        let half = from_rational(q(1, 2));
        for k in 0..40 {
            assert_eq!(eq_real(&half, &r, k), EqVerdict::EqualAt { k });
        }
        assert!(matches!(
            eq_real(&CReal::from_int(0), &CReal::from_int(1), 10),
            EqVerdict::Apart { n: 2, .. }
        ));
    }

    #[test]
    fn hat_clamps_jumps() {
        let wild = CReal::from_raw(|n| if n < 3 { Q::zero() } else { int(5) });
        for n in 0..10 {
            for i in 0..5 {
                assert!((wild.approx(n) - wild.approx(n + i)).abs() < dyadic(n));
            }
        }
    }

    #[test]
    fn lazy_arithmetic_meets_error_bound() {
        let third = CReal::from_raw(|n| Q::new(BigInt::one() << n as usize, BigInt::from(3) << n as usize) + dyadic(n + 3));
        let prod = third.mul(&third).add(&third.scale(&int(-2)));
        let want = q(1, 9) - q(2, 3);
        for n in 0..30 {
            assert!((prod.approx(n) - &want).abs() <= dyadic(n + 1), "n = {}", n);
        }
    }

    #[test]
    fn binary_expansions() {
        assert_eq!(binary_real(&[1], 0).exact().unwrap(), &q(1, 2));
        assert_eq!(binary_real(&[], 1).exact().unwrap(), &Q::one());
        assert_eq!(binary_real(&[0, 1, 1], 0).exact().unwrap(), &q(3, 8));
        let parity = Seq::new((0..6).map(|k| k % 2).collect(), 0);
        assert_eq!(binarize(&parity).prefix, vec![0, 1, 0, 1, 0, 1]);
    }

    #[test]
    fn integral_examples() {
        assert_eq!(integral(&f("1"), &from_rational(q(1, 2)), 3), q(5, 8));
        assert_eq!(integral(&f("0"), &from_rational(q(1, 2)), 7), Q::zero());
        let v = integral(&f("x"), &CReal::from_int(1), 12);
        assert!((v - q(1, 2)).abs() <= dyadic(10));
    }

    #[test]
    fn integral_between_is_a_difference() {
        let g = f("x*x - x/3");
        for (a, b) in [(q(1, 5), q(2, 3)), (q(0, 1), q(1, 1)), (q(1, 2), q(1, 2))] {
            let whole = integral(&g, &from_rational(b.clone()), 9) - integral(&g, &from_rational(a.clone()), 9);
            assert_eq!(integral_between(&g, &a, &b, 9), whole);
        }
    }

    #[test]
    fn difference_quotients() {
        let x = from_rational(q(1, 3));
        assert_eq!(diff_quotient(&f("x"), &x, &q(1, 7)).unwrap().exact().unwrap(), &Q::one());
        let zero = CReal::from_int(0);
        assert_eq!(diff_quotient(&f("x*x"), &zero, &q(1, 4)).unwrap().exact().unwrap(), &q(1, 4));
        assert!(matches!(
            diff_quotient(&f("x"), &x, &Q::zero()),
            Err(CRealError::DomainViolation(_))
        ));
    }
}
