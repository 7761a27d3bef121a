use std::fmt;

use super::ast::{Formula, FormulaError, Quant};
use crate::kernel::FinType;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Binder {
    pub name: String,
    pub ty: FinType,
    /// Ranges over monotone objects only.
    pub mono: bool,
}

impl Binder {
    pub fn new(name: impl Into<String>, ty: FinType) -> Binder {
        Binder {
            name: name.into(),
            ty,
            mono: false,
        }
    }

    pub fn mono(name: impl Into<String>, ty: FinType) -> Binder {
        Binder {
            name: name.into(),
            ty,
            mono: true,
        }
    }
}

/// `(forall-st universals)(exists-st existentials) matrix` with an internal matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalForm {
    pub universals: Vec<Binder>,
    pub existentials: Vec<Binder>,
    pub matrix: Formula,
}

/// Peels a leading standard quantifier, looking through a monotonicity guard.
pub fn peel_standard(f: &Formula) -> Option<(Quant, Binder, &Formula)> {
    if let Some((q, x, ty, body)) = f.as_mono_standard() {
        return Some((q, Binder::mono(x, ty.clone()), body));
    }
    match f {
        Formula::Quant(q, x, ty, body) if q.is_standard() => Some((*q, Binder::new(x.clone(), ty.clone()), body)),
        _ => None,
    }
}

impl NormalForm {
    pub fn internal(matrix: Formula) -> NormalForm {
        NormalForm {
            universals: Vec::new(),
            existentials: Vec::new(),
            matrix,
        }
    }

    pub fn recognize(f: &Formula) -> Result<NormalForm, FormulaError> {
        let mut universals = Vec::new();
        let mut existentials = Vec::new();
        let mut cur = f;
        while let Some((q, b, body)) = peel_standard(cur) {
            match q {
                Quant::ForallSt if existentials.is_empty() => universals.push(b),
                Quant::ForallSt => {
                    return Err(FormulaError::NotNormalForm(format!(
                        "standard universal {} follows a standard existential",
                        b.name
                    )))
                }
                _ => existentials.push(b),
            }
            cur = body;
        }
        if cur.has_approx() {
            return Err(FormulaError::NotNormalForm("unresolved approx".into()));
        }
        if !cur.is_internal() {
            return Err(FormulaError::NotNormalForm(format!("matrix is not internal: {}", cur)));
        }
        Ok(NormalForm {
            universals,
            existentials,
            matrix: cur.clone(),
        })
    }

    pub fn render(&self) -> Formula {
        let inner = self
            .existentials
            .iter()
            .rev()
            .fold(self.matrix.clone(), |acc, b| Formula::exists_st(&b.name, b.ty.clone(), b.mono, acc));
        self.universals
            .iter()
            .rev()
            .fold(inner, |acc, b| Formula::forall_st(&b.name, b.ty.clone(), b.mono, acc))
    }

    /// Conjunction of two normal forms: tuples concatenate in order, and a
    /// binder already present is not repeated.
    pub fn merge(&self, other: &NormalForm) -> NormalForm {
        let mut universals = self.universals.clone();
        for b in &other.universals {
            if !universals.iter().any(|u| u.name == b.name) {
                universals.push(b.clone());
            }
        }
        let mut existentials = self.existentials.clone();
        for b in &other.existentials {
            if !existentials.iter().any(|u| u.name == b.name) {
                existentials.push(b.clone());
            }
        }
        NormalForm {
            universals,
            existentials,
            matrix: Formula::and(self.matrix.clone(), other.matrix.clone()),
        }
    }
}

pub fn recognize_normal_form(f: &Formula) -> Result<NormalForm, FormulaError> {
    NormalForm::recognize(f)
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}
