use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::kernel::{prime_fresh, FinType, Term};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Rel {
    /// `l = 0` read as `l =_0 r`
    Eq0,
    Leq0,
    LeqStar(FinType),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quant {
    Forall,
    Exists,
    ForallSt,
    ExistsSt,
    ForallMono,
    ExistsMono,
}

impl Quant {
    pub fn keyword(self) -> &'static str {
        match self {
            Quant::Forall => "forall",
            Quant::Exists => "exists",
            Quant::ForallSt => "forall-st",
            Quant::ExistsSt => "exists-st",
            Quant::ForallMono => "forall-mono",
            Quant::ExistsMono => "exists-mono",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Quant> {
        Some(match s {
            "forall" => Quant::Forall,
            "exists" => Quant::Exists,
            "forall-st" => Quant::ForallSt,
            "exists-st" => Quant::ExistsSt,
            "forall-mono" => Quant::ForallMono,
            "exists-mono" => Quant::ExistsMono,
            _ => return None,
        })
    }

    pub fn is_universal(self) -> bool {
        matches!(self, Quant::Forall | Quant::ForallSt | Quant::ForallMono)
    }

    pub fn is_standard(self) -> bool {
        matches!(self, Quant::ForallSt | Quant::ExistsSt)
    }

    pub fn dual(self) -> Quant {
        match self {
            Quant::Forall => Quant::Exists,
            Quant::Exists => Quant::Forall,
            Quant::ForallSt => Quant::ExistsSt,
            Quant::ExistsSt => Quant::ForallSt,
            Quant::ForallMono => Quant::ExistsMono,
            Quant::ExistsMono => Quant::ForallMono,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(Rel, Term, Term),
    St(Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Quant(Quant, String, FinType, Box<Formula>),
    /// Infinitesimal closeness of two reals, expanded before any other rewriting.
    Approx(Term, Term),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("formula is not internal: {0}")]
    NotInternal(String),
    #[error("not a normal form: {0}")]
    NotNormalForm(String),
}

impl Formula {
    pub fn atom(rel: Rel, l: Term, r: Term) -> Formula {
        Formula::Atom(rel, l, r)
    }

    pub fn eq0(l: Term, r: Term) -> Formula {
        Formula::Atom(Rel::Eq0, l, r)
    }

    /// `t = 0`
    pub fn holds(t: Term) -> Formula {
        Formula::Atom(Rel::Eq0, t, Term::Num(0))
    }

    pub fn leq_star(ty: FinType, l: Term, r: Term) -> Formula {
        Formula::Atom(Rel::LeqStar(ty), l, r)
    }

    pub fn not(a: Formula) -> Formula {
        Formula::Not(Box::new(a))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn quant(q: Quant, x: impl Into<String>, ty: FinType, body: Formula) -> Formula {
        Formula::Quant(q, x.into(), ty, Box::new(body))
    }

    pub fn forall(x: impl Into<String>, ty: FinType, body: Formula) -> Formula {
        Formula::quant(Quant::Forall, x, ty, body)
    }

    pub fn exists(x: impl Into<String>, ty: FinType, body: Formula) -> Formula {
        Formula::quant(Quant::Exists, x, ty, body)
    }

    /// `(forall x <=* b) body`
    pub fn forall_bounded(x: &str, ty: FinType, bound: Term, body: Formula) -> Formula {
        let guard = Formula::leq_star(ty.clone(), Term::var(x), bound);
        Formula::forall(x, ty, Formula::implies(guard, body))
    }

    /// `(exists x <=* b) body`
    pub fn exists_bounded(x: &str, ty: FinType, bound: Term, body: Formula) -> Formula {
        let guard = Formula::leq_star(ty.clone(), Term::var(x), bound);
        Formula::exists(x, ty, Formula::and(guard, body))
    }

    /// `(forall-mono x <=* b) body`
    pub fn forall_mono_bounded(x: &str, ty: FinType, bound: Term, body: Formula) -> Formula {
        let guard = Formula::leq_star(ty.clone(), Term::var(x), bound);
        Formula::quant(Quant::ForallMono, x, ty, Formula::implies(guard, body))
    }

    /// `(exists-mono x <=* b) body`
    pub fn exists_mono_bounded(x: &str, ty: FinType, bound: Term, body: Formula) -> Formula {
        let guard = Formula::leq_star(ty.clone(), Term::var(x), bound);
        Formula::quant(Quant::ExistsMono, x, ty, Formula::and(guard, body))
    }

    /// Standard universal, restricted to monotone objects when `mono` holds
    /// and the type is not `O`.
    pub fn forall_st(x: &str, ty: FinType, mono: bool, body: Formula) -> Formula {
        let body = if mono && !ty.is_base() {
            Formula::implies(Formula::leq_star(ty.clone(), Term::var(x), Term::var(x)), body)
        } else {
            body
        };
        Formula::quant(Quant::ForallSt, x, ty, body)
    }

    pub fn exists_st(x: &str, ty: FinType, mono: bool, body: Formula) -> Formula {
        let body = if mono && !ty.is_base() {
            Formula::and(Formula::leq_star(ty.clone(), Term::var(x), Term::var(x)), body)
        } else {
            body
        };
        Formula::quant(Quant::ExistsSt, x, ty, body)
    }

    pub fn conj(parts: Vec<Formula>) -> Option<Formula> {
        let mut it = parts.into_iter().rev();
        let last = it.next()?;
        Some(it.fold(last, |acc, p| Formula::and(p, acc)))
    }

    pub fn is_internal(&self) -> bool {
        match self {
            Formula::Atom(..) => true,
            Formula::St(_) | Formula::Approx(..) => false,
            Formula::Not(a) => a.is_internal(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => a.is_internal() && b.is_internal(),
            Formula::Quant(q, _, _, b) => !q.is_standard() && b.is_internal(),
        }
    }

    pub fn has_approx(&self) -> bool {
        match self {
            Formula::Approx(..) => true,
            Formula::Atom(..) | Formula::St(_) => false,
            Formula::Not(a) | Formula::Quant(_, _, _, a) => a.has_approx(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => a.has_approx() || b.has_approx(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom(_, l, r) | Formula::Approx(l, r) => {
                l.collect_free(out);
                r.collect_free(out);
            }
            Formula::St(t) => t.collect_free(out),
            Formula::Not(a) => a.collect_free(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_free(out);
                b.collect_free(out);
            }
            Formula::Quant(_, x, _, b) => {
                let mut inner = BTreeSet::new();
                b.collect_free(&mut inner);
                inner.remove(x);
                out.extend(inner);
            }
        }
    }

    /// Every name appearing anywhere, bound or free.
    pub fn all_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_names(&mut out);
        out
    }

    fn collect_names(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom(_, l, r) | Formula::Approx(l, r) => {
                l.collect_free(out);
                r.collect_free(out);
            }
            Formula::St(t) => t.collect_free(out),
            Formula::Not(a) => a.collect_names(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_names(out);
                b.collect_names(out);
            }
            Formula::Quant(_, x, _, b) => {
                out.insert(x.clone());
                b.collect_names(out);
            }
        }
    }

    pub fn mentions(&self, name: &str) -> bool {
        self.free_vars().contains(name)
    }

    /// Maps every term position, leaving binders alone.
    pub fn map_terms(&self, f: &mut dyn FnMut(&Term) -> Term) -> Formula {
        match self {
            Formula::Atom(r, a, b) => Formula::Atom(r.clone(), f(a), f(b)),
            Formula::Approx(a, b) => Formula::Approx(f(a), f(b)),
            Formula::St(t) => Formula::St(f(t)),
            Formula::Not(a) => Formula::not(a.map_terms(f)),
            Formula::And(a, b) => Formula::and(a.map_terms(f), b.map_terms(f)),
            Formula::Or(a, b) => Formula::or(a.map_terms(f), b.map_terms(f)),
            Formula::Implies(a, b) => Formula::implies(a.map_terms(f), b.map_terms(f)),
            Formula::Quant(q, x, t, b) => Formula::quant(*q, x.clone(), t.clone(), b.map_terms(f)),
        }
    }

    /// Capture-avoiding substitution of a term for a free variable.
    pub fn substitute(&self, var: &str, with: &Term) -> Formula {
        let fv = with.free_vars();
        self.subst_inner(var, with, &fv)
    }

    fn subst_inner(&self, var: &str, with: &Term, fv: &BTreeSet<String>) -> Formula {
        match self {
            Formula::Atom(r, a, b) => Formula::Atom(r.clone(), a.substitute(var, with), b.substitute(var, with)),
            Formula::Approx(a, b) => Formula::Approx(a.substitute(var, with), b.substitute(var, with)),
            Formula::St(t) => Formula::St(t.substitute(var, with)),
            Formula::Not(a) => Formula::not(a.subst_inner(var, with, fv)),
            Formula::And(a, b) => Formula::and(a.subst_inner(var, with, fv), b.subst_inner(var, with, fv)),
            Formula::Or(a, b) => Formula::or(a.subst_inner(var, with, fv), b.subst_inner(var, with, fv)),
            Formula::Implies(a, b) => Formula::implies(a.subst_inner(var, with, fv), b.subst_inner(var, with, fv)),
            Formula::Quant(q, x, t, b) => {
                if x == var || !b.mentions(var) {
                    return self.clone();
                }
                if fv.contains(x) {
                    let body_names = b.all_names();
                    let fresh = prime_fresh(x, |n| fv.contains(n) || body_names.contains(n) || n == var);
                    let renamed = b.substitute(x, &Term::var(&fresh));
                    Formula::quant(*q, fresh, t.clone(), renamed.subst_inner(var, with, fv))
                } else {
                    Formula::quant(*q, x.clone(), t.clone(), b.subst_inner(var, with, fv))
                }
            }
        }
    }

    /// Renames bound variables to positional names; alpha-equivalent
    /// formulas have identical canonical forms.
    pub fn canonical(&self) -> Formula {
        let mut counter = 0;
        self.canon(&mut counter)
    }

    fn canon(&self, counter: &mut usize) -> Formula {
        match self {
            Formula::Not(a) => Formula::not(a.canon(counter)),
            Formula::And(a, b) => Formula::and(a.canon(counter), b.canon(counter)),
            Formula::Or(a, b) => Formula::or(a.canon(counter), b.canon(counter)),
            Formula::Implies(a, b) => Formula::implies(a.canon(counter), b.canon(counter)),
            Formula::Quant(q, x, t, b) => {
                let name = format!("#{}", counter);
                *counter += 1;
                let body = b.substitute(x, &Term::var(&name));
                Formula::quant(*q, name, t.clone(), body.canon(counter))
            }
            other => other.clone(),
        }
    }

    pub fn alpha_eq(&self, other: &Formula) -> bool {
        self.canonical() == other.canonical()
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(_, l, r) | Formula::Approx(l, r) => 1 + l.size() + r.size(),
            Formula::St(t) => 1 + t.size(),
            Formula::Not(a) => 1 + a.size(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => 1 + a.size() + b.size(),
            Formula::Quant(_, _, _, b) => 1 + b.size(),
        }
    }

    /// Number of connectives, quantifiers and atoms.
    pub fn node_count(&self) -> usize {
        match self {
            Formula::Atom(..) | Formula::Approx(..) | Formula::St(_) => 1,
            Formula::Not(a) | Formula::Quant(_, _, _, a) => 1 + a.node_count(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => 1 + a.node_count() + b.node_count(),
        }
    }

    /// Every internal `forall`/`exists` becomes standard; bounded number
    /// quantifiers stay as they are.
    pub fn relativize(&self) -> Result<Formula, FormulaError> {
        if !self.is_internal() {
            return Err(FormulaError::NotInternal(self.to_string()));
        }
        Ok(self.relativize_inner())
    }

    fn relativize_inner(&self) -> Formula {
        match self {
            Formula::Not(a) => Formula::not(a.relativize_inner()),
            Formula::And(a, b) => Formula::and(a.relativize_inner(), b.relativize_inner()),
            Formula::Or(a, b) => Formula::or(a.relativize_inner(), b.relativize_inner()),
            Formula::Implies(a, b) => Formula::implies(a.relativize_inner(), b.relativize_inner()),
            Formula::Quant(q, x, t, b) => {
                if self.bounded_number_parts().is_some() {
                    return Formula::quant(*q, x.clone(), t.clone(), b.relativize_inner());
                }
                let body = b.relativize_inner();
                match q {
                    Quant::Forall => Formula::quant(Quant::ForallSt, x.clone(), t.clone(), body),
                    Quant::Exists => Formula::quant(Quant::ExistsSt, x.clone(), t.clone(), body),
                    Quant::ForallMono => Formula::forall_st(x, t.clone(), true, body),
                    Quant::ExistsMono => Formula::exists_st(x, t.clone(), true, body),
                    _ => Formula::quant(*q, x.clone(), t.clone(), body),
                }
            }
            other => other.clone(),
        }
    }

    /// `(forall n (implies (<=0 n t) _))` or `(exists n (and (<=0 n t) _))`.
    pub fn bounded_number_parts(&self) -> Option<(Quant, &str, &Term, &Formula)> {
        let Formula::Quant(q, x, t, b) = self else { return None };
        if !t.is_base() {
            return None;
        }
        let (guard, body) = match (q, b.as_ref()) {
            (Quant::Forall, Formula::Implies(g, body)) => (g, body),
            (Quant::Exists, Formula::And(g, body)) => (g, body),
            _ => return None,
        };
        match guard.as_ref() {
            Formula::Atom(Rel::Leq0, Term::Free(v), bound) if v == x && !bound.mentions(x) => {
                Some((*q, x.as_str(), bound, body.as_ref()))
            }
            _ => None,
        }
    }

    /// Recognizes `(exists v (and (<=* v b) body))` with `v` not in `b`.
    pub fn as_bounded_exists(&self) -> Option<(&str, &FinType, &Term, &Formula)> {
        match self {
            Formula::Quant(Quant::Exists, x, t, b) => match b.as_ref() {
                Formula::And(g, body) => match g.as_ref() {
                    Formula::Atom(Rel::LeqStar(_), Term::Free(v), bound) if v == x && !bound.mentions(x) => {
                        Some((x.as_str(), t, bound, body.as_ref()))
                    }
                    _ => None,
                },
                _ => None,
            },
            _ => None,
        }
    }

    /// Recognizes a standard quantifier restricted to monotone objects.
    pub fn as_mono_standard(&self) -> Option<(Quant, &str, &FinType, &Formula)> {
        let Formula::Quant(q, x, t, b) = self else { return None };
        let (guard, body) = match (q, b.as_ref()) {
            (Quant::ForallSt, Formula::Implies(g, body)) => (g, body),
            (Quant::ExistsSt, Formula::And(g, body)) => (g, body),
            _ => return None,
        };
        match guard.as_ref() {
            Formula::Atom(Rel::LeqStar(_), Term::Free(a), Term::Free(b)) if a == x && b == x => {
                Some((*q, x.as_str(), t, body.as_ref()))
            }
            _ => None,
        }
    }
}

impl fmt::Display for Rel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rel::Eq0 => write!(f, "=0"),
            Rel::Leq0 => write!(f, "<=0"),
            Rel::LeqStar(_) => write!(f, "<=*"),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom(r, a, b) => write!(f, "({} {} {})", r, a, b),
            Formula::Approx(a, b) => write!(f, "(approx {} {})", a, b),
            Formula::St(t) => write!(f, "(st {})", t),
            Formula::Not(a) => write!(f, "(not {})", a),
            Formula::And(a, b) => write!(f, "(and {} {})", a, b),
            Formula::Or(a, b) => write!(f, "(or {} {})", a, b),
            Formula::Implies(a, b) => write!(f, "(implies {} {})", a, b),
            Formula::Quant(q, x, t, b) => write!(f, "({} {} : {} {})", q.keyword(), x, t, b),
        }
    }
}

impl Formula {
    /// Multi-line rendering that breaks after quantifiers and connectives.
    pub fn pretty(&self) -> String {
        let mut out = String::new();
        self.pretty_into(&mut out, 0);
        out
    }

    fn pretty_into(&self, out: &mut String, indent: usize) {
        let flat = self.to_string();
        if flat.len() + indent <= 90 {
            out.push_str(&flat);
            return;
        }
        let pad = " ".repeat(indent + 2);
        match self {
            Formula::Not(a) => {
                out.push_str("(not\n");
                out.push_str(&pad);
                a.pretty_into(out, indent + 2);
                out.push(')');
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                let kw = match self {
                    Formula::And(..) => "and",
                    Formula::Or(..) => "or",
                    _ => "implies",
                };
                out.push('(');
                out.push_str(kw);
                out.push('\n');
                out.push_str(&pad);
                a.pretty_into(out, indent + 2);
                out.push('\n');
                out.push_str(&pad);
                b.pretty_into(out, indent + 2);
                out.push(')');
            }
            Formula::Quant(q, x, t, b) => {
                out.push_str(&format!("({} {} : {}\n", q.keyword(), x, t));
                out.push_str(&pad);
                b.pretty_into(out, indent + 2);
                out.push(')');
            }
            _ => out.push_str(&flat),
        }
    }
}
