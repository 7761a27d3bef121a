//! Formulas with standardness predicates, their syntax and normal forms.

mod ast;
mod normal;
mod parse;
mod signature;

pub use ast::{Formula, FormulaError, Quant, Rel};
pub use normal::{peel_standard, recognize_normal_form, Binder, NormalForm};
pub use parse::{parse_document, parse_formula, parse_term, parse_type, Document, ParseError};
pub use signature::{real, Signature, Symbol};

pub fn is_internal(f: &Formula) -> bool {
    f.is_internal()
}

pub fn relativize(f: &Formula) -> Result<Formula, FormulaError> {
    f.relativize()
}

pub fn free_vars(f: &Formula) -> std::collections::BTreeSet<String> {
    f.free_vars()
}

pub fn substitute_formula(f: &Formula, var: &str, with: &crate::kernel::Term) -> Formula {
    f.substitute(var, with)
}
