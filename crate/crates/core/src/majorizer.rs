//! Bounded checks of the majorizability relation `<=*` at types 0, 1 and 2.
//!
//! `x <=*_{s -> t} y` holds when every `v <=*_s u` gives both
//! `x v <=*_t y u` and `y v <=*_t y u`.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::kernel::FinType;

pub type NatFn = Arc<dyn Fn(u64) -> u64 + Send + Sync>;
pub type SeqFn = Arc<dyn Fn(&Seq) -> u64 + Send + Sync>;

/// An eventually constant sequence of naturals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Seq {
    pub prefix: Vec<u64>,
    pub tail: u64,
}

impl Seq {
    pub fn new(prefix: Vec<u64>, tail: u64) -> Seq {
        Seq { prefix, tail }
    }

    pub fn constant(c: u64) -> Seq {
        Seq::new(Vec::new(), c)
    }

    pub fn at(&self, n: u64) -> u64 {
        self.prefix.get(n as usize).copied().unwrap_or(self.tail)
    }

    /// Decides `self <=*_1 other`.
    pub fn star_leq(&self, other: &Seq) -> bool {
        let horizon = self.prefix.len().max(other.prefix.len()) as u64;
        let mut running = 0;
        (0..=horizon).all(|m| {
            running = running.max(self.at(m)).max(other.at(m));
            running <= other.at(m)
        })
    }

    pub fn as_fn(&self) -> impl Fn(u64) -> u64 + '_ {
        move |n| self.at(n)
    }
}

impl fmt::Display for Seq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.prefix.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", v)?;
        }
        if !self.prefix.is_empty() {
            write!(f, ",")?;
        }
        write!(f, "{}...]", self.tail)
    }
}

/// A sampled argument witnessing failure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Sample {
    Nat(u64),
    Seq(Seq),
}

impl fmt::Display for Sample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sample::Nat(n) => write!(f, "{}", n),
            Sample::Seq(s) => write!(f, "{}", s),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum MajVerdict {
    Holds,
    FailsWithWitness { u: Sample, v: Sample },
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MajOutcome {
    pub verdict: MajVerdict,
    pub samples: usize,
}

impl MajOutcome {
    pub fn holds(&self) -> bool {
        self.verdict == MajVerdict::Holds
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MajError {
    #[error("invalid budget: {0}")]
    BudgetInvalid(String),
    #[error("value does not have type {0}")]
    WrongType(FinType),
}

/// Arguments to try. Type-1 checks use every `u <= max_arg`; type-2 checks
/// use every comparable pair of the family.
#[derive(Clone, Debug)]
pub struct SamplingPlan {
    pub max_arg: u64,
    pub family: Vec<Seq>,
}

impl SamplingPlan {
    pub fn up_to(max_arg: u64) -> SamplingPlan {
        SamplingPlan {
            max_arg,
            family: Vec::new(),
        }
    }

    pub fn with_family(family: Vec<Seq>) -> SamplingPlan {
        SamplingPlan { max_arg: 0, family }
    }

    /// 0/1 prefixes up to `len` followed by a constant 0 or 1 tail.
    pub fn binary(len: usize) -> SamplingPlan {
        let mut family = Vec::new();
        for l in 0..=len {
            for bits in 0..(1u64 << l) {
                let prefix: Vec<u64> = (0..l).map(|i| (bits >> i) & 1).collect();
                for tail in 0..2 {
                    family.push(Seq::new(prefix.clone(), tail));
                }
            }
        }
        SamplingPlan::with_family(family)
    }
}

/// Values that can be compared at types 0, 1 and 2.
#[derive(Clone)]
pub enum Value {
    Nat(u64),
    Fn1(NatFn),
    Fn2(SeqFn),
}

impl Value {
    pub fn fn1(f: impl Fn(u64) -> u64 + Send + Sync + 'static) -> Value {
        Value::Fn1(Arc::new(f))
    }

    pub fn fn2(f: impl Fn(&Seq) -> u64 + Send + Sync + 'static) -> Value {
        Value::Fn2(Arc::new(f))
    }
}

pub fn maj_base(x: u64, y: u64) -> bool {
    x <= y
}

pub fn maj_check(x: &Value, y: &Value, ty: &FinType, budget: &SamplingPlan) -> Result<MajOutcome, MajError> {
    match (x, y, ty.level()) {
        (Value::Nat(a), Value::Nat(b), 0) => Ok(MajOutcome {
            verdict: if maj_base(*a, *b) {
                MajVerdict::Holds
            } else {
                MajVerdict::FailsWithWitness {
                    u: Sample::Nat(*b),
                    v: Sample::Nat(*a),
                }
            },
            samples: 1,
        }),
        (Value::Fn1(f), Value::Fn1(g), 1) if ty == &FinType::one() => Ok(check_type1(f, g, budget.max_arg)),
        (Value::Fn2(f), Value::Fn2(g), 2) if ty == &FinType::two() => {
            if budget.family.is_empty() {
                return Err(MajError::BudgetInvalid("type-2 check needs a non-empty family".into()));
            }
            Ok(check_type2(f, g, &budget.family))
        }
        _ => Err(MajError::WrongType(ty.clone())),
    }
}

fn check_type1(x: &NatFn, y: &NatFn, max_arg: u64) -> MajOutcome {
    let mut samples = 0;
    for u in 0..=max_arg {
        let yu = y(u);
        for v in (0..=u).rev() {
            samples += 1;
            if x(v) > yu || y(v) > yu {
                return MajOutcome {
                    verdict: MajVerdict::FailsWithWitness {
                        u: Sample::Nat(u),
                        v: Sample::Nat(v),
                    },
                    samples,
                };
            }
        }
    }
    MajOutcome {
        verdict: MajVerdict::Holds,
        samples,
    }
}

fn check_type2(x: &SeqFn, y: &SeqFn, family: &[Seq]) -> MajOutcome {
    let mut samples = 0;
    for u in family {
        let yu = y(u);
        for v in family {
            if !v.star_leq(u) {
                continue;
            }
            samples += 1;
            if x(v) > yu || y(v) > yu {
                return MajOutcome {
                    verdict: MajVerdict::FailsWithWitness {
                        u: Sample::Seq(u.clone()),
                        v: Sample::Seq(v.clone()),
                    },
                    samples,
                };
            }
        }
    }
    MajOutcome {
        verdict: if samples == 0 {
            MajVerdict::Inconclusive
        } else {
            MajVerdict::Holds
        },
        samples,
    }
}

pub fn is_monotone(x: &Value, ty: &FinType, budget: &SamplingPlan) -> Result<MajOutcome, MajError> {
    maj_check(x, x, ty, budget)
}

/// `k |-> max_{n <= k} g(n)`
pub fn monotone_closure(g: NatFn) -> NatFn {
    Arc::new(move |k| (0..=k).map(|n| g(n)).max().unwrap_or(0))
}

/// Least zero of a sequence, searching one step past its prefix.
pub fn mu(f: &Seq) -> Option<u64> {
    (0..=f.prefix.len() as u64).find(|&n| f.at(n) == 0)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MuRefutation {
    pub sequence: Seq,
    pub mu: u64,
    pub majorant: u64,
}

/// A sequence majorized by the constant 1 whose least zero exceeds `b`,
/// so no bound on the least-zero functional depends only on a majorant.
pub fn refute_mu_majorant(b: u64) -> MuRefutation {
    let mut prefix = vec![1; (b + 1) as usize];
    prefix.push(0);
    let sequence = Seq::new(prefix, 1);
    let mu = mu(&sequence).expect("prefix ends with a zero");
    MuRefutation {
        sequence,
        mu,
        majorant: 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_below_successor() {
        let out = maj_check(
            &Value::fn1(|n| n),
            &Value::fn1(|n| n + 1),
            &FinType::one(),
            &SamplingPlan::up_to(20),
        )
        .unwrap();
        assert_eq!(out.verdict, MajVerdict::Holds);
    }

    #[test]
    fn spike_at_zero_is_not_a_majorant() {
        let out = maj_check(
            &Value::fn1(|n| n),
            &Value::fn1(|n| if n == 0 { 5 } else { 0 }),
            &FinType::one(),
            &SamplingPlan::up_to(20),
        )
        .unwrap();
        assert_eq!(
            out.verdict,
            MajVerdict::FailsWithWitness {
                u: Sample::Nat(1),
                v: Sample::Nat(1)
            }
        );
    }

    #[test]
    fn parity_is_not_monotone() {
        let out = is_monotone(&Value::fn1(|n| n % 2), &FinType::one(), &SamplingPlan::up_to(10)).unwrap();
        assert_eq!(
            out.verdict,
            MajVerdict::FailsWithWitness {
                u: Sample::Nat(2),
                v: Sample::Nat(1)
            }
        );
    }

    #[test]
    fn empty_family_is_rejected() {
        let f = Value::fn2(|s| s.at(0));
        assert!(matches!(
            maj_check(&f, &f, &FinType::two(), &SamplingPlan::up_to(3)),
            Err(MajError::BudgetInvalid(_))
        ));
    }

    #[test]
    fn star_order_on_sequences() {
        let one = Seq::constant(1);
        let bump = Seq::new(vec![0, 1], 0);
        assert!(bump.star_leq(&one));
        assert!(!one.star_leq(&bump));
        assert!(!bump.star_leq(&bump));
    }

    #[test]
    fn mu_refutation_shape() {
        let r = refute_mu_majorant(3);
        assert_eq!(r.mu, 4);
        assert_eq!(r.sequence.prefix, vec![1, 1, 1, 1, 0]);
        assert!(r.sequence.star_leq(&Seq::constant(1)));
    }

    #[test]
    fn closure_is_running_max() {
        let g: NatFn = Arc::new(|n| [3, 1, 4, 1, 5][n as usize % 5]);
        let c = monotone_closure(g);
        let got: Vec<u64> = (0..5).map(|k| c(k)).collect();
        assert_eq!(got, vec![3, 3, 4, 4, 5]);
    }
}
