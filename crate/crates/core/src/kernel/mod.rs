//! Simply typed terms over the naturals with primitive recursion.

mod check;
mod eval;
pub mod library;
mod term;
mod ty;

pub use check::{type_check, Layered, TypeEnv, TypeError};
pub use eval::{evaluate, evaluate_nat, evaluate_with_fuel, EvalError, DEFAULT_FUEL};
pub use term::{prime_fresh, Const, Term};
pub use ty::FinType;
