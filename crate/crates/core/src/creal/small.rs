//! Reduced rationals over `i128` with overflow detection.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};

use super::Q;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Small {
    n: i128,
    d: i128,
}

impl Small {
    pub fn new(n: i128, d: i128) -> Option<Small> {
        if d == 0 {
            return None;
        }
        let g = n.gcd(&d);
        let (mut n, mut d) = (n / g.max(1), d / g.max(1));
        if d < 0 {
            n = n.checked_neg()?;
            d = d.checked_neg()?;
        }
        Some(Small { n, d })
    }

    pub fn from_q(v: &Q) -> Option<Small> {
        Some(Small {
            n: v.numer().to_i128()?,
            d: v.denom().to_i128()?,
        })
    }

    pub fn to_q(self) -> Q {
        Q::new(BigInt::from(self.n), BigInt::from(self.d))
    }

    pub fn add(self, o: Small) -> Option<Small> {
        let g = self.d.gcd(&o.d);
        let (a, b) = (self.d / g, o.d / g);
        let n = self.n.checked_mul(b)?.checked_add(o.n.checked_mul(a)?)?;
        Small::new(n, self.d.checked_mul(b)?)
    }

    pub fn sub(self, o: Small) -> Option<Small> {
        self.add(o.neg()?)
    }

    pub fn mul(self, o: Small) -> Option<Small> {
        let g1 = self.n.gcd(&o.d).max(1);
        let g2 = o.n.gcd(&self.d).max(1);
        let n = (self.n / g1).checked_mul(o.n / g2)?;
        let d = (self.d / g2).checked_mul(o.d / g1)?;
        Small::new(n, d)
    }

    pub fn neg(self) -> Option<Small> {
        Some(Small { n: self.n.checked_neg()?, d: self.d })
    }

    pub fn abs(self) -> Option<Small> {
        Some(Small { n: self.n.checked_abs()?, d: self.d })
    }

    pub fn cmp(self, o: Small) -> Option<Ordering> {
        Some(self.n.checked_mul(o.d)?.cmp(&o.n.checked_mul(self.d)?))
    }

    pub fn min(self, o: Small) -> Option<Small> {
        Some(if self.cmp(o)? == Ordering::Greater { o } else { self })
    }

    pub fn max(self, o: Small) -> Option<Small> {
        Some(if self.cmp(o)? == Ordering::Less { o } else { self })
    }

    pub fn recip_of(c: &Q) -> Option<Small> {
        if c.numer().is_negative() {
            Small::new(-c.denom().to_i128()?, -c.numer().to_i128()?)
        } else {
            Small::new(c.denom().to_i128()?, c.numer().to_i128()?)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::creal::q;

    #[test]
    fn agrees_with_big_rationals() {
        let vals = [q(1, 3), q(-5, 7), q(22, 4), q(0, 1)];
        for a in &vals {
            for b in &vals {
                let (sa, sb) = (Small::from_q(a).unwrap(), Small::from_q(b).unwrap());
                assert_eq!(sa.add(sb).unwrap().to_q(), a + b);
                assert_eq!(sa.sub(sb).unwrap().to_q(), a - b);
                assert_eq!(sa.mul(sb).unwrap().to_q(), a * b);
                assert_eq!(sa.max(sb).unwrap().to_q(), a.clone().max(b.clone()));
            }
        }
    }

    #[test]
    fn overflow_is_reported() {
        let big = Small::new(i128::MAX / 2, 1).unwrap();
        assert!(big.mul(big).is_none());
        assert!(big.add(big).and_then(|s| s.add(big)).is_none());
    }
}
