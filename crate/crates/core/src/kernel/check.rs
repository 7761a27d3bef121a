use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use super::term::Term;
use super::ty::FinType;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("type mismatch at {location}: expected {expected}, found {found}")]
    TypeMismatch {
        location: String,
        expected: FinType,
        found: FinType,
    },
    #[error("unbound variable {0}")]
    UnboundVariable(String),
    #[error("{location} has type {found} and cannot be applied")]
    NotAFunction { location: String, found: FinType },
    #[error("dangling bound index {0}")]
    DanglingIndex(usize),
}

/// Anything that can answer the type of a free variable.
pub trait TypeEnv {
    fn lookup(&self, name: &str) -> Option<FinType>;
}

impl TypeEnv for BTreeMap<String, FinType> {
    fn lookup(&self, name: &str) -> Option<FinType> {
        self.get(name).cloned()
    }
}

impl TypeEnv for HashMap<String, FinType> {
    fn lookup(&self, name: &str) -> Option<FinType> {
        self.get(name).cloned()
    }
}

impl<E: TypeEnv + ?Sized> TypeEnv for &E {
    fn lookup(&self, name: &str) -> Option<FinType> {
        (**self).lookup(name)
    }
}

/// An environment with a few extra bindings layered over a parent.
pub struct Layered<'a> {
    pub parent: &'a dyn TypeEnv,
    pub local: Vec<(String, FinType)>,
}

impl TypeEnv for Layered<'_> {
    fn lookup(&self, name: &str) -> Option<FinType> {
        self.local
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, t)| t.clone())
            .or_else(|| self.parent.lookup(name))
    }
}

pub fn type_check(term: &Term, env: &dyn TypeEnv) -> Result<FinType, TypeError> {
    infer(term, env, &mut Vec::new())
}

fn infer(term: &Term, env: &dyn TypeEnv, bound: &mut Vec<FinType>) -> Result<FinType, TypeError> {
    match term {
        Term::Num(_) => Ok(FinType::Base),
        Term::Const(c) => Ok(c.ty()),
        Term::Free(n) => env.lookup(n).ok_or_else(|| TypeError::UnboundVariable(n.clone())),
        Term::Bound(i) => bound
            .len()
            .checked_sub(i + 1)
            .map(|p| bound[p].clone())
            .ok_or(TypeError::DanglingIndex(*i)),
        Term::Abs(_, ty, body) => {
            bound.push(ty.clone());
            let r = infer(body, env, bound);
            bound.pop();
            Ok(FinType::arrow(ty.clone(), r?))
        }
        Term::App(f, a) => {
            let ft = infer(f, env, bound)?;
            let at = infer(a, env, bound)?;
            match ft {
                FinType::Arrow(dom, cod) => {
                    if *dom == at {
                        Ok(*cod)
                    } else {
                        Err(TypeError::TypeMismatch {
                            location: term.to_string(),
                            expected: *dom,
                            found: at,
                        })
                    }
                }
                FinType::Base => Err(TypeError::NotAFunction {
                    location: f.to_string(),
                    found: FinType::Base,
                }),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::Const;

    fn empty() -> BTreeMap<String, FinType> {
        BTreeMap::new()
    }

    #[test]
    fn recursor_type() {
        let t = Term::Const(Const::Rec(FinType::Base));
        assert_eq!(
            type_check(&t, &empty()).unwrap().to_string(),
            "(-> O (-> (-> O (-> O O)) (-> O O)))"
        );
    }

    #[test]
    fn succ_of_function_is_rejected() {
        let t = Term::succ(Term::lam("x", FinType::Base, Term::var("x")));
        match type_check(&t, &empty()) {
            Err(TypeError::TypeMismatch { expected, found, .. }) => {
                assert_eq!(expected, FinType::Base);
                assert_eq!(found, FinType::one());
            }
            other => panic!("{:?}", other),
        }
    }

    #[test]
    fn unbound_is_reported() {
        assert_eq!(
            type_check(&Term::var("q"), &empty()),
            Err(TypeError::UnboundVariable("q".into()))
        );
    }
}
