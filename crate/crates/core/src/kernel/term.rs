use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};

use super::ty::FinType;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Const {
    Zero,
    Succ,
    /// `Rec_s : s -> (O -> s -> s) -> O -> s`
    Rec(FinType),
    /// `max : O -> O -> O`
    Max,
}

impl Const {
    pub fn arity(&self) -> usize {
        match self {
            Const::Zero => 0,
            Const::Succ => 1,
            Const::Max => 2,
            Const::Rec(_) => 3,
        }
    }

    pub fn ty(&self) -> FinType {
        use FinType::Base;
        match self {
            Const::Zero => Base,
            Const::Succ => FinType::one(),
            Const::Max => FinType::curried(&[Base, Base], Base),
            Const::Rec(s) => {
                let step = FinType::curried(&[Base, s.clone()], s.clone());
                FinType::curried(&[s.clone(), step, Base], s.clone())
            }
        }
    }
}

/// Terms of Goedel's T in locally nameless form. Bound variables are
/// de Bruijn indices, free variables are names. `Abs` keeps its source
/// name only as a printing hint, so alpha-equivalent terms are equal.
#[derive(Clone, Debug)]
pub enum Term {
    Bound(usize),
    Free(String),
    Const(Const),
    Abs(String, FinType, Box<Term>),
    App(Box<Term>, Box<Term>),
    Num(u64),
}

impl PartialEq for Term {
    fn eq(&self, other: &Self) -> bool {
        use Term::*;
        match (self, other) {
            (Bound(a), Bound(b)) => a == b,
            (Free(a), Free(b)) => a == b,
            (Const(a), Const(b)) => a == b,
            (Abs(_, ta, a), Abs(_, tb, b)) => ta == tb && a == b,
            (App(f, a), App(g, b)) => f == g && a == b,
            (Num(a), Num(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        std::mem::discriminant(self).hash(state);
        match self {
            Term::Bound(i) => i.hash(state),
            Term::Free(n) => n.hash(state),
            Term::Const(c) => c.hash(state),
            Term::Abs(_, t, b) => {
                t.hash(state);
                b.hash(state)
            }
            Term::App(f, a) => {
                f.hash(state);
                a.hash(state)
            }
            Term::Num(n) => n.hash(state),
        }
    }
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Free(name.into())
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Box::new(f), Box::new(a))
    }

    pub fn apps(f: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(f, Term::app)
    }

    pub fn zero() -> Term {
        Term::Const(Const::Zero)
    }

    pub fn succ(t: Term) -> Term {
        Term::app(Term::Const(Const::Succ), t)
    }

    pub fn max(a: Term, b: Term) -> Term {
        Term::apps(Term::Const(Const::Max), [a, b])
    }

    pub fn rec(ty: FinType, base: Term, step: Term, n: Term) -> Term {
        Term::apps(Term::Const(Const::Rec(ty)), [base, step, n])
    }

    /// Builds `lam name : ty. body` by abstracting the free variable `name`.
    pub fn lam(name: &str, ty: FinType, body: Term) -> Term {
        Term::Abs(name.to_string(), ty, Box::new(body.close(name, 0)))
    }

    fn close(self, name: &str, depth: usize) -> Term {
        match self {
            Term::Free(n) if n == name => Term::Bound(depth),
            Term::Abs(h, t, b) => Term::Abs(h, t, Box::new(b.close(name, depth + 1))),
            Term::App(f, a) => Term::app(f.close(name, depth), a.close(name, depth)),
            other => other,
        }
    }

    /// Replaces the outermost bound variable of an abstraction body.
    pub fn open(&self, with: &Term) -> Term {
        self.open_at(with, 0)
    }

    fn open_at(&self, with: &Term, depth: usize) -> Term {
        match self {
            Term::Bound(i) if *i == depth => with.clone(),
            Term::Abs(h, t, b) => Term::Abs(h.clone(), t.clone(), Box::new(b.open_at(with, depth + 1))),
            Term::App(f, a) => Term::app(f.open_at(with, depth), a.open_at(with, depth)),
            other => other.clone(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    pub(crate) fn collect_free(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Free(n) => {
                out.insert(n.clone());
            }
            Term::Abs(_, _, b) => b.collect_free(out),
            Term::App(f, a) => {
                f.collect_free(out);
                a.collect_free(out);
            }
            _ => {}
        }
    }

    pub fn mentions(&self, name: &str) -> bool {
        match self {
            Term::Free(n) => n == name,
            Term::Abs(_, _, b) => b.mentions(name),
            Term::App(f, a) => f.mentions(name) || a.mentions(name),
            _ => false,
        }
    }

    /// Capture-avoiding substitution `self[var := with]`. Bound variables
    /// are indices, so no renaming is ever needed.
    pub fn substitute(&self, var: &str, with: &Term) -> Term {
        match self {
            Term::Free(n) if n == var => with.clone(),
            Term::Abs(h, t, b) => Term::Abs(h.clone(), t.clone(), Box::new(b.substitute(var, with))),
            Term::App(f, a) => Term::app(f.substitute(var, with), a.substitute(var, with)),
            other => other.clone(),
        }
    }

    pub fn rename_free(&self, from: &str, to: &str) -> Term {
        self.substitute(from, &Term::var(to))
    }

    /// Replaces every occurrence of `pattern` (compared structurally).
    pub fn replace_subterm(&self, pattern: &Term, with: &Term) -> Term {
        if self == pattern {
            return with.clone();
        }
        match self {
            Term::Abs(h, t, b) => Term::Abs(h.clone(), t.clone(), Box::new(b.replace_subterm(pattern, with))),
            Term::App(f, a) => Term::app(f.replace_subterm(pattern, with), a.replace_subterm(pattern, with)),
            other => other.clone(),
        }
    }

    /// Head of an application spine together with its arguments.
    pub fn spine(&self) -> (&Term, Vec<&Term>) {
        let mut args = Vec::new();
        let mut cur = self;
        while let Term::App(f, a) = cur {
            args.push(a.as_ref());
            cur = f;
        }
        args.reverse();
        (cur, args)
    }

    pub fn is_locally_closed(&self) -> bool {
        fn go(t: &Term, depth: usize) -> bool {
            match t {
                Term::Bound(i) => *i < depth,
                Term::Abs(_, _, b) => go(b, depth + 1),
                Term::App(f, a) => go(f, depth) && go(a, depth),
                _ => true,
            }
        }
        go(self, 0)
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Abs(_, _, b) => 1 + b.size(),
            Term::App(f, a) => 1 + f.size() + a.size(),
            _ => 1,
        }
    }

    pub fn as_free(&self) -> Option<&str> {
        match self {
            Term::Free(n) => Some(n),
            _ => None,
        }
    }
}

/// Appends primes to `base` until `taken` rejects nothing.
pub fn prime_fresh(base: &str, taken: impl Fn(&str) -> bool) -> String {
    let mut name = base.to_string();
    while taken(&name) {
        name.push('\'');
    }
    name
}

struct Printer<'a> {
    free: &'a BTreeSet<String>,
    scope: Vec<String>,
}

impl Printer<'_> {
    fn write(&mut self, t: &Term, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match t {
            Term::Bound(i) => match self.scope.len().checked_sub(i + 1) {
                Some(pos) => write!(f, "{}", self.scope[pos]),
                None => write!(f, "#{}", i),
            },
            Term::Free(n) => write!(f, "{}", n),
            Term::Num(n) => write!(f, "{}", n),
            Term::Const(Const::Zero) => write!(f, "zero"),
            Term::Const(Const::Succ) => write!(f, "succ"),
            Term::Const(Const::Max) => write!(f, "max"),
            Term::Const(Const::Rec(ty)) => write!(f, "(rec {})", ty),
            Term::Abs(hint, ty, body) => {
                let name = prime_fresh(hint, |n| self.free.contains(n) || self.scope.iter().any(|s| s == n));
                write!(f, "(lam {} : {} ", name, ty)?;
                self.scope.push(name);
                self.write(body, f)?;
                self.scope.pop();
                write!(f, ")")
            }
            Term::App(..) => {
                let (head, args) = t.spine();
                write!(f, "(")?;
                self.write(head, f)?;
                for a in args {
                    write!(f, " ")?;
                    self.write(a, f)?;
                }
                write!(f, ")")
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let free = self.free_vars();
        Printer { free: &free, scope: Vec::new() }.write(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_equal_abstractions_compare_equal() {
        let a = Term::lam("x", FinType::Base, Term::succ(Term::var("x")));
        let b = Term::lam("y", FinType::Base, Term::succ(Term::var("y")));
        assert_eq!(a, b);
    }

    #[test]
    fn substitution_does_not_capture() {
        // (lam y. max x y)[x := y] prints with a renamed binder
        let t = Term::lam("y", FinType::Base, Term::max(Term::var("x"), Term::var("y")));
        let s = t.substitute("x", &Term::var("y"));
        assert_eq!(s.to_string(), "(lam y' : O (max y y'))");
        assert!(s.mentions("y"));
    }

    #[test]
    fn open_after_close_is_identity() {
        let body = Term::max(Term::var("x"), Term::var("z"));
        let lam = Term::lam("x", FinType::Base, body.clone());
        if let Term::Abs(_, _, b) = lam {
            assert_eq!(b.open(&Term::var("x")), body);
        } else {
            unreachable!()
        }
    }
}
