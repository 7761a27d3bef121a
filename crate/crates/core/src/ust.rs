//! Syntactic interpretation of standardness into monotone functional
//! quantifier prefixes over an internal lower part.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::formulas::{Binder, Formula, NormalForm, Quant, Rel};
use crate::kernel::{prime_fresh, type_check, FinType, Layered, Term, TypeEnv, TypeError};

/// `(forall-mono-st b_tuple)(exists-mono-st c_tuple) lower`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UstResult {
    pub b_tuple: Vec<Binder>,
    pub c_tuple: Vec<Binder>,
    pub lower: Formula,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UstError {
    #[error(transparent)]
    Type(#[from] TypeError),
}

impl UstResult {
    fn internal(lower: Formula) -> UstResult {
        UstResult {
            b_tuple: Vec::new(),
            c_tuple: Vec::new(),
            lower,
        }
    }

    pub fn render(&self) -> Formula {
        let nf = NormalForm {
            universals: self.b_tuple.clone(),
            existentials: self.c_tuple.clone(),
            matrix: self.lower.clone(),
        };
        nf.render()
    }
}

struct Fresh {
    used: BTreeSet<String>,
}

impl Fresh {
    fn new(used: BTreeSet<String>) -> Fresh {
        Fresh { used }
    }

    fn name(&mut self, base: &str) -> String {
        let n = prime_fresh(base, |n| self.used.contains(n));
        self.used.insert(n.clone());
        n
    }
}

struct Interpreter<'a> {
    env: &'a dyn TypeEnv,
    scope: Vec<(String, FinType)>,
    fresh: Fresh,
}

fn vars(bs: &[Binder]) -> Vec<Term> {
    bs.iter().map(|b| Term::var(&b.name)).collect()
}

fn types(bs: &[Binder]) -> Vec<FinType> {
    bs.iter().map(|b| b.ty.clone()).collect()
}

fn mono_copy(b: &Binder) -> Binder {
    Binder::mono(b.name.clone(), b.ty.clone())
}

/// Nested `(exists-mono v <=* b)` over a tuple.
fn exists_mono_below(primes: &[Binder], bounds: &[Term], body: Formula) -> Formula {
    primes
        .iter()
        .zip(bounds)
        .rev()
        .fold(body, |acc, (p, b)| Formula::exists_mono_bounded(&p.name, p.ty.clone(), b.clone(), acc))
}

fn forall_mono_below(primes: &[Binder], bounds: &[Term], body: Formula) -> Formula {
    primes
        .iter()
        .zip(bounds)
        .rev()
        .fold(body, |acc, (p, b)| Formula::forall_mono_bounded(&p.name, p.ty.clone(), b.clone(), acc))
}

fn substitute_all(f: &Formula, pairs: &[(String, Term)]) -> Formula {
    // Two-phase renaming so that simultaneous substitution never chains.
    let mut out = f.clone();
    let temps: Vec<String> = (0..pairs.len()).map(|i| format!("%s{}", i)).collect();
    for ((v, _), t) in pairs.iter().zip(&temps) {
        out = out.substitute(v, &Term::var(t));
    }
    for ((_, with), t) in pairs.iter().zip(&temps) {
        out = out.substitute(t, with);
    }
    out
}

impl Interpreter<'_> {
    fn type_of(&self, t: &Term) -> Result<FinType, UstError> {
        let env = Layered {
            parent: self.env,
            local: self.scope.clone(),
        };
        Ok(type_check(t, &env)?)
    }

    fn primes(&mut self, bs: &[Binder]) -> Vec<Binder> {
        bs.iter()
            .map(|b| Binder::mono(self.fresh.name(&format!("{}'", b.name)), b.ty.clone()))
            .collect()
    }

    /// Choice functions `f_j : b -> c_j`, introducing a dummy `b : O` when
    /// `c` is non-empty but `b` is empty.
    fn choice_functions(&mut self, b: &[Binder], c: &[Binder]) -> (Vec<Binder>, Vec<Binder>) {
        let mut b = b.to_vec();
        if b.is_empty() && !c.is_empty() {
            b.push(Binder::mono(self.fresh.name("b"), FinType::Base));
        }
        let dom = types(&b);
        let fs = c
            .iter()
            .map(|cj| Binder::mono(self.fresh.name("f"), FinType::curried(&dom, cj.ty.clone())))
            .collect();
        (b, fs)
    }

    /// `L[b := b', c := f(b')]`
    fn instantiate(&self, lower: &Formula, b: &[Binder], primes: &[Binder], c: &[Binder], fs: &[Binder]) -> Formula {
        let mut pairs: Vec<(String, Term)> = b
            .iter()
            .zip(primes)
            .map(|(x, p)| (x.name.clone(), Term::var(&p.name)))
            .collect();
        for (cj, fj) in c.iter().zip(fs) {
            pairs.push((cj.name.clone(), Term::apps(Term::var(&fj.name), vars(primes))));
        }
        substitute_all(lower, &pairs)
    }

    fn go(&mut self, phi: &Formula) -> Result<UstResult, UstError> {
        if phi.is_internal() {
            return Ok(UstResult::internal(phi.clone()));
        }
        match phi {
            Formula::St(t) => {
                let ty = self.type_of(t)?;
                let c = Binder::mono(self.fresh.name("c"), ty.clone());
                let lower = Formula::leq_star(ty, t.clone(), Term::var(&c.name));
                Ok(UstResult {
                    b_tuple: Vec::new(),
                    c_tuple: vec![c],
                    lower,
                })
            }
            Formula::Approx(a, b) => {
                let n = self.fresh.name("N");
                let dist = Term::apps(Term::var("dist"), [a.clone(), b.clone()]);
                let atom = Formula::holds(Term::apps(Term::var("rle"), [dist, Term::app(Term::var("inv"), Term::var(&n))]));
                self.go(&Formula::quant(Quant::ForallSt, n, FinType::Base, atom))
            }
            Formula::And(a, b) | Formula::Or(a, b) => {
                let ra = self.go(a)?;
                let rb = self.go(b)?;
                let lower = if matches!(phi, Formula::And(..)) {
                    Formula::and(ra.lower, rb.lower)
                } else {
                    Formula::or(ra.lower, rb.lower)
                };
                Ok(UstResult {
                    b_tuple: [ra.b_tuple, rb.b_tuple].concat(),
                    c_tuple: [ra.c_tuple, rb.c_tuple].concat(),
                    lower,
                })
            }
            Formula::Not(a) => {
                let ra = self.go(a)?;
                let (b, fs) = self.choice_functions(&ra.b_tuple, &ra.c_tuple);
                let primes = self.primes(&b);
                let inner = Formula::not(self.instantiate(&ra.lower, &b, &primes, &ra.c_tuple, &fs));
                let lower = exists_mono_below(&primes, &vars(&b), inner);
                Ok(UstResult {
                    b_tuple: fs,
                    c_tuple: b.iter().map(mono_copy).collect(),
                    lower,
                })
            }
            Formula::Implies(a, c) => {
                let ra = self.go(a)?;
                let rc = self.go(c)?;
                let (b, fs) = self.choice_functions(&ra.b_tuple, &ra.c_tuple);
                let primes = self.primes(&b);
                let ante = forall_mono_below(
                    &primes,
                    &vars(&b),
                    self.instantiate(&ra.lower, &b, &primes, &ra.c_tuple, &fs),
                );
                Ok(UstResult {
                    b_tuple: [fs, rc.b_tuple].concat(),
                    c_tuple: [b.iter().map(mono_copy).collect(), rc.c_tuple].concat(),
                    lower: Formula::implies(ante, rc.lower),
                })
            }
            Formula::Quant(q, x, ty, body) => match q {
                Quant::ForallSt => {
                    let e = Formula::forall(x.clone(), ty.clone(), Formula::implies(Formula::St(Term::var(x)), (**body).clone()));
                    self.go(&e)
                }
                Quant::ExistsSt => {
                    let e = Formula::exists(x.clone(), ty.clone(), Formula::and(Formula::St(Term::var(x)), (**body).clone()));
                    self.go(&e)
                }
                Quant::ForallMono => {
                    let guard = Formula::leq_star(ty.clone(), Term::var(x), Term::var(x));
                    self.go(&Formula::forall(x.clone(), ty.clone(), Formula::implies(guard, (**body).clone())))
                }
                Quant::ExistsMono => {
                    let guard = Formula::leq_star(ty.clone(), Term::var(x), Term::var(x));
                    self.go(&Formula::exists(x.clone(), ty.clone(), Formula::and(guard, (**body).clone())))
                }
                Quant::Forall => {
                    self.scope.push((x.clone(), ty.clone()));
                    let r = self.go(body);
                    self.scope.pop();
                    let r = r?;
                    Ok(UstResult {
                        lower: Formula::forall(x.clone(), ty.clone(), r.lower),
                        ..r
                    })
                }
                Quant::Exists => {
                    self.scope.push((x.clone(), ty.clone()));
                    let r = self.go(body);
                    self.scope.pop();
                    let r = r?;
                    let (b, fs) = self.choice_functions(&r.b_tuple, &r.c_tuple);
                    let f_types = types(&fs);
                    let big: Vec<Binder> = b
                        .iter()
                        .map(|bj| Binder::mono(self.fresh.name("F"), FinType::curried(&f_types, bj.ty.clone())))
                        .collect();
                    let f_primes = self.primes(&fs);
                    let b_primes = self.primes(&b);
                    let bounds: Vec<Term> = big
                        .iter()
                        .map(|fj| Term::apps(Term::var(&fj.name), vars(&f_primes)))
                        .collect();
                    let inner = self.instantiate(&r.lower, &b, &b_primes, &r.c_tuple, &f_primes);
                    let inner = forall_mono_below(&b_primes, &bounds, inner);
                    let inner = Formula::exists(x.clone(), ty.clone(), inner);
                    let lower = exists_mono_below(&f_primes, &vars(&fs), inner);
                    Ok(UstResult {
                        b_tuple: big,
                        c_tuple: fs,
                        lower,
                    })
                }
            },
            Formula::Atom(..) => unreachable!("atoms are internal"),
        }
    }
}

/// Computes the interpretation of `phi`; free variables are typed by `env`.
pub fn interpret(phi: &Formula, env: &dyn TypeEnv) -> Result<UstResult, UstError> {
    let mut interp = Interpreter {
        env,
        scope: Vec::new(),
        fresh: Fresh::new(phi.all_names()),
    };
    interp.go(phi)
}

/// Outcome of the monotone simplification pass.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Simplified {
    pub result: UstResult,
    pub steps: usize,
    pub shape_mismatch: bool,
}

fn rewrite_once(f: &Formula, rule: &mut dyn FnMut(&Formula) -> Option<Formula>) -> Option<Formula> {
    if let Some(g) = rule(f) {
        return Some(g);
    }
    match f {
        Formula::Not(a) => rewrite_once(a, rule).map(Formula::not),
        Formula::And(a, b) => rewrite_once(a, rule)
            .map(|a2| Formula::and(a2, (**b).clone()))
            .or_else(|| rewrite_once(b, rule).map(|b2| Formula::and((**a).clone(), b2))),
        Formula::Or(a, b) => rewrite_once(a, rule)
            .map(|a2| Formula::or(a2, (**b).clone()))
            .or_else(|| rewrite_once(b, rule).map(|b2| Formula::or((**a).clone(), b2))),
        Formula::Implies(a, b) => rewrite_once(a, rule)
            .map(|a2| Formula::implies(a2, (**b).clone()))
            .or_else(|| rewrite_once(b, rule).map(|b2| Formula::implies((**a).clone(), b2))),
        Formula::Quant(q, x, t, b) => rewrite_once(b, rule).map(|b2| Formula::quant(*q, x.clone(), t.clone(), b2)),
        _ => None,
    }
}

fn free_name(t: &Term) -> Option<&str> {
    t.as_free()
}

fn star_atom(f: &Formula) -> Option<(&FinType, &Term, &Term)> {
    match f {
        Formula::Atom(Rel::LeqStar(ty), l, r) => Some((ty, l, r)),
        _ => None,
    }
}

/// `(exists-mono f' <=* f)(exists y)(forall-mono b' <=* F f')[y <=* f' b' and psi]`
/// collapses to `(exists y <=* e) psi` with a fresh monotone bound `e`.
fn collapse_existential(r: &UstResult, fresh: &mut Fresh) -> Option<UstResult> {
    let mut hit: Option<(String, String, String, FinType)> = None;
    let mut rule = |g: &Formula| -> Option<Formula> {
        let Formula::Quant(Quant::ExistsMono, fp, _, b1) = g else { return None };
        let Formula::And(guard1, rest1) = b1.as_ref() else { return None };
        let (_, l1, r1) = star_atom(guard1)?;
        if free_name(l1)? != fp {
            return None;
        }
        let f = free_name(r1)?;
        let Formula::Quant(Quant::Exists, y, yty, b2) = rest1.as_ref() else { return None };
        let Formula::Quant(Quant::ForallMono, bp, _, b3) = b2.as_ref() else { return None };
        let Formula::Implies(guard3, rest3) = b3.as_ref() else { return None };
        let (_, l3, r3) = star_atom(guard3)?;
        if free_name(l3)? != bp {
            return None;
        }
        let (head, args) = r3.spine();
        let big = free_name(head)?;
        if args.len() != 1 || free_name(args[0])? != fp {
            return None;
        }
        let Formula::And(bound, psi) = rest3.as_ref() else { return None };
        let (_, l4, r4) = star_atom(bound)?;
        if free_name(l4)? != y {
            return None;
        }
        let (h4, a4) = r4.spine();
        if free_name(h4)? != fp || a4.len() != 1 || free_name(a4[0])? != bp {
            return None;
        }
        let in_b = r.b_tuple.iter().any(|b| b.name == big);
        let in_c = r.c_tuple.iter().any(|c| c.name == f);
        if !in_b || !in_c || [fp.as_str(), bp.as_str(), big, f].iter().any(|n| psi.mentions(n)) {
            return None;
        }
        let e = fresh.name("e");
        hit = Some((big.to_string(), f.to_string(), e.clone(), yty.clone()));
        Some(Formula::exists_bounded(y, yty.clone(), Term::var(&e), (**psi).clone()))
    };
    let lower = rewrite_once(&r.lower, &mut rule)?;
    let (big, f, e, ty) = hit?;
    if lower.mentions(&big) || lower.mentions(&f) {
        return None;
    }
    Some(UstResult {
        b_tuple: r.b_tuple.iter().filter(|b| b.name != big).cloned().collect(),
        c_tuple: r
            .c_tuple
            .iter()
            .map(|c| if c.name == f { Binder::mono(e.clone(), ty.clone()) } else { c.clone() })
            .collect(),
        lower,
    })
}

/// `(forall-mono b' <=* b)[x <=* f b']` with `f` universal and `b` a dummy
/// existential becomes `x <=* x0`, specializing `f` to a constant function.
fn specialize_constant(r: &UstResult, fresh: &mut Fresh) -> Option<UstResult> {
    let mut hit: Option<(String, String, String, FinType)> = None;
    let mut rule = |g: &Formula| -> Option<Formula> {
        let Formula::Quant(Quant::ForallMono, bp, _, body) = g else { return None };
        let Formula::Implies(guard, atom) = body.as_ref() else { return None };
        let (_, l, rb) = star_atom(guard)?;
        if free_name(l)? != bp {
            return None;
        }
        let b = free_name(rb)?;
        let (ty, x, fx) = star_atom(atom)?;
        let (head, args) = fx.spine();
        let f = free_name(head)?;
        if args.len() != 1 || free_name(args[0])? != bp || x.mentions(bp) {
            return None;
        }
        let b_ok = r.c_tuple.iter().any(|c| c.name == b && c.ty.is_base());
        let f_ok = r.b_tuple.iter().any(|u| u.name == f);
        if !b_ok || !f_ok {
            return None;
        }
        let x0 = fresh.name(&format!("{}0", x.as_free().unwrap_or("x")));
        hit = Some((f.to_string(), b.to_string(), x0.clone(), ty.clone()));
        Some(Formula::leq_star(ty.clone(), x.clone(), Term::var(&x0)))
    };
    let lower = rewrite_once(&r.lower, &mut rule)?;
    let (f, b, x0, ty) = hit?;
    if lower.mentions(&f) || lower.mentions(&b) {
        return None;
    }
    Some(UstResult {
        b_tuple: r
            .b_tuple
            .iter()
            .map(|u| if u.name == f { Binder::mono(x0.clone(), ty.clone()) } else { u.clone() })
            .collect(),
        c_tuple: r.c_tuple.iter().filter(|c| c.name != b).cloned().collect(),
        lower,
    })
}

/// Collapses the monotone functional prefixes produced for standard
/// quantifier blocks. Flags a shape mismatch when nothing applies.
pub fn simplify_monotone(r: &UstResult) -> Simplified {
    let mut names = r.lower.all_names();
    names.extend(r.b_tuple.iter().chain(&r.c_tuple).map(|b| b.name.clone()));
    let mut fresh = Fresh::new(names);
    let mut cur = r.clone();
    let mut steps = 0;
    loop {
        if let Some(next) = collapse_existential(&cur, &mut fresh) {
            cur = next;
        } else if let Some(next) = specialize_constant(&cur, &mut fresh) {
            cur = next;
        } else {
            break;
        }
        steps += 1;
    }
    Simplified {
        result: cur,
        steps,
        shape_mismatch: steps == 0,
    }
}

/// The internal statement a term `t` must satisfy to realize `nf`:
/// `(forall-mono b)(forall x <= b)(exists y <= t(b)) matrix`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Contract {
    pub formula: Formula,
    pub metavariables: Vec<Binder>,
    pub bounds: Vec<Binder>,
}

fn below(ty: &FinType, l: Term, r: Term) -> Formula {
    if ty.is_base() {
        Formula::Atom(Rel::Leq0, l, r)
    } else {
        Formula::leq_star(ty.clone(), l, r)
    }
}

pub fn extraction_contract(nf: &NormalForm) -> Contract {
    if nf.universals.is_empty() && nf.existentials.is_empty() {
        return Contract {
            formula: nf.matrix.clone(),
            metavariables: Vec::new(),
            bounds: Vec::new(),
        };
    }
    let mut used = nf.matrix.all_names();
    used.extend(nf.universals.iter().chain(&nf.existentials).map(|b| b.name.clone()));
    let mut fresh = Fresh::new(used);
    let bounds: Vec<Binder> = nf
        .universals
        .iter()
        .map(|u| Binder::mono(fresh.name(&format!("{}0", u.name)), u.ty.clone()))
        .collect();
    let dom = types(&bounds);
    let metas: Vec<Binder> = nf
        .existentials
        .iter()
        .map(|e| Binder::new(fresh.name("t"), FinType::curried(&dom, e.ty.clone())))
        .collect();
    let mut body = nf.matrix.clone();
    for (e, t) in nf.existentials.iter().zip(&metas).rev() {
        let bound = Term::apps(Term::var(&t.name), vars(&bounds));
        body = Formula::exists(e.name.clone(), e.ty.clone(), Formula::and(below(&e.ty, Term::var(&e.name), bound), body));
    }
    for (u, b) in nf.universals.iter().zip(&bounds).rev() {
        body = Formula::forall(
            u.name.clone(),
            u.ty.clone(),
            Formula::implies(below(&u.ty, Term::var(&u.name), Term::var(&b.name)), body),
        );
    }
    for b in bounds.iter().rev() {
        body = Formula::quant(Quant::ForallMono, b.name.clone(), b.ty.clone(), body);
    }
    Contract {
        formula: body,
        metavariables: metas,
        bounds,
    }
}
