use thiserror::Error;

use super::term::{Const, Term};

pub const DEFAULT_FUEL: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("fuel exhausted")]
    FuelExhausted,
    #[error("free variable {0} during evaluation")]
    OpenTerm(String),
    #[error("natural number overflow")]
    Overflow,
    #[error("stuck application: {0}")]
    Stuck(String),
}

/// Call-by-value evaluation of a closed term to a value.
pub fn evaluate(term: &Term) -> Result<Term, EvalError> {
    evaluate_with_fuel(term, DEFAULT_FUEL)
}

pub fn evaluate_with_fuel(term: &Term, fuel: u64) -> Result<Term, EvalError> {
    Machine { fuel }.eval(term)
}

/// Evaluates a closed term of type `O` to a natural number.
pub fn evaluate_nat(term: &Term) -> Result<u64, EvalError> {
    match evaluate(term)? {
        Term::Num(n) => Ok(n),
        other => Err(EvalError::Stuck(other.to_string())),
    }
}

struct Machine {
    fuel: u64,
}

impl Machine {
    fn tick(&mut self) -> Result<(), EvalError> {
        if self.fuel == 0 {
            return Err(EvalError::FuelExhausted);
        }
        self.fuel -= 1;
        Ok(())
    }

    fn eval(&mut self, t: &Term) -> Result<Term, EvalError> {
        self.tick()?;
        match t {
            Term::Num(_) | Term::Abs(..) => Ok(t.clone()),
            Term::Const(Const::Zero) => Ok(Term::Num(0)),
            Term::Const(_) => Ok(t.clone()),
            Term::Free(n) => Err(EvalError::OpenTerm(n.clone())),
            Term::Bound(i) => Err(EvalError::Stuck(format!("#{}", i))),
            Term::App(f, a) => {
                let fv = self.eval(f)?;
                let av = self.eval(a)?;
                self.apply(fv, av)
            }
        }
    }

    fn apply(&mut self, f: Term, a: Term) -> Result<Term, EvalError> {
        self.tick()?;
        if let Term::Abs(_, _, body) = &f {
            return self.eval(&body.open(&a));
        }
        let candidate = Term::app(f, a);
        let (head, args) = candidate.spine();
        let c = match head {
            Term::Const(c) => c.clone(),
            other => return Err(EvalError::Stuck(other.to_string())),
        };
        if args.len() < c.arity() {
            return Ok(candidate);
        }
        let args: Vec<Term> = args.into_iter().cloned().collect();
        match c {
            Const::Succ => {
                let n = nat(&args[0])?;
                Ok(Term::Num(n.checked_add(1).ok_or(EvalError::Overflow)?))
            }
            Const::Max => Ok(Term::Num(nat(&args[0])?.max(nat(&args[1])?))),
            Const::Rec(_) => {
                let n = nat(&args[2])?;
                let mut acc = args[0].clone();
                for i in 0..n {
                    let partial = self.apply(args[1].clone(), Term::Num(i))?;
                    acc = self.apply(partial, acc)?;
                }
                Ok(acc)
            }
            Const::Zero => Err(EvalError::Stuck("zero applied".into())),
        }
    }
}

fn nat(t: &Term) -> Result<u64, EvalError> {
    match t {
        Term::Num(n) => Ok(*n),
        other => Err(EvalError::Stuck(other.to_string())),
    }
}
