use std::collections::BTreeSet;

use super::PipelineError;
use crate::formulas::{peel_standard, Binder, Formula, NormalForm, Quant, Rel, Signature};
use crate::kernel::{prime_fresh, FinType, Term};

/// Deterministic supply of fresh names.
#[derive(Clone, Debug, Default)]
pub struct Names {
    used: BTreeSet<String>,
}

impl Names {
    pub fn new(f: &Formula, sig: &Signature) -> Names {
        let mut used = f.all_names();
        used.extend(sig.names().map(str::to_string));
        Names { used }
    }

    pub fn reserve(&mut self, f: &Formula) {
        self.used.extend(f.all_names());
    }

    pub fn fresh(&mut self, base: &str) -> String {
        let n = prime_fresh(base, |n| self.used.contains(n));
        self.used.insert(n.clone());
        n
    }
}

pub(crate) fn children(f: &Formula) -> Vec<&Formula> {
    match f {
        Formula::Not(a) | Formula::Quant(_, _, _, a) => vec![a],
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => vec![a, b],
        _ => Vec::new(),
    }
}

pub(crate) fn get<'a>(f: &'a Formula, path: &[usize]) -> &'a Formula {
    path.iter().fold(f, |cur, &i| children(cur)[i])
}

pub(crate) fn replace(f: &Formula, path: &[usize], new: Formula) -> Formula {
    let Some((&i, rest)) = path.split_first() else { return new };
    let sub = |g: &Formula| replace(g, rest, new.clone());
    match (f, i) {
        (Formula::Not(a), 0) => Formula::not(sub(a)),
        (Formula::Quant(q, x, t, a), 0) => Formula::quant(*q, x.clone(), t.clone(), sub(a)),
        (Formula::And(a, b), 0) => Formula::and(sub(a), (**b).clone()),
        (Formula::And(a, b), _) => Formula::and((**a).clone(), sub(b)),
        (Formula::Or(a, b), 0) => Formula::or(sub(a), (**b).clone()),
        (Formula::Or(a, b), _) => Formula::or((**a).clone(), sub(b)),
        (Formula::Implies(a, b), 0) => Formula::implies(sub(a), (**b).clone()),
        (Formula::Implies(a, b), _) => Formula::implies((**a).clone(), sub(b)),
        _ => f.clone(),
    }
}

/// Preorder traversal with the binders on the way down.
fn visit<'a>(
    f: &'a Formula,
    path: &mut Vec<usize>,
    binders: &mut Vec<(Quant, String, Vec<usize>)>,
    out: &mut dyn FnMut(&'a Formula, &[usize], &[(Quant, String, Vec<usize>)]) -> bool,
) -> bool {
    if out(f, path, binders) {
        return true;
    }
    let pushed = if let Formula::Quant(q, x, _, _) = f {
        binders.push((*q, x.clone(), path.clone()));
        true
    } else {
        false
    };
    let mut done = false;
    for (i, c) in children(f).into_iter().enumerate() {
        path.push(i);
        done = visit(c, path, binders, out);
        path.pop();
        if done {
            break;
        }
    }
    if pushed {
        binders.pop();
    }
    done
}

fn real_dist_atom(a: Term, b: Term, n: &str) -> Formula {
    let dist = Term::apps(Term::var("dist"), [a, b]);
    Formula::holds(Term::apps(Term::var("rle"), [dist, Term::app(Term::var("inv"), Term::var(n))]))
}

/// Expands every `approx` into a standard quantifier over `1/N` closeness.
pub fn resolve(f: &Formula, names: &mut Names) -> Option<Formula> {
    fn go(f: &Formula, antecedent: bool, names: &mut Names) -> Formula {
        match f {
            Formula::Approx(a, b) => {
                let n = names.fresh(if antecedent { "N" } else { "k" });
                Formula::quant(Quant::ForallSt, n.clone(), FinType::Base, real_dist_atom(a.clone(), b.clone(), &n))
            }
            Formula::Implies(a, b) => {
                let a2 = go(a, true, names);
                Formula::implies(a2, go(b, false, names))
            }
            Formula::Not(a) => Formula::not(go(a, false, names)),
            Formula::And(a, b) => {
                let a2 = go(a, false, names);
                Formula::and(a2, go(b, false, names))
            }
            Formula::Or(a, b) => {
                let a2 = go(a, false, names);
                Formula::or(a2, go(b, false, names))
            }
            Formula::Quant(q, x, t, b) => Formula::quant(*q, x.clone(), t.clone(), go(b, false, names)),
            other => other.clone(),
        }
    }
    if !f.has_approx() {
        return None;
    }
    Some(go(f, false, names))
}

type Prefix = Vec<(Quant, Binder)>;

fn render_prefix(prefix: &[(Quant, Binder)], matrix: Formula) -> Formula {
    prefix.iter().rev().fold(matrix, |acc, (q, b)| match q {
        Quant::ForallSt => Formula::forall_st(&b.name, b.ty.clone(), b.mono, acc),
        _ => Formula::exists_st(&b.name, b.ty.clone(), b.mono, acc),
    })
}

fn is_ae(p: &Prefix) -> bool {
    let first_e = p.iter().position(|(q, _)| *q == Quant::ExistsSt).unwrap_or(p.len());
    p[first_e..].iter().all(|(q, _)| *q == Quant::ExistsSt)
}

fn split_ae(p: Prefix) -> (Prefix, Prefix) {
    p.into_iter().partition(|(q, _)| *q == Quant::ForallSt)
}

fn dual(p: Prefix) -> Prefix {
    p.into_iter().map(|(q, b)| (q.dual(), b)).collect()
}

/// Renames binders of `p` that clash with `avoid`, updating `m`.
fn freshen(p: Prefix, m: Formula, avoid: &BTreeSet<String>, names: &mut Names) -> (Prefix, Formula) {
    let mut m = m;
    let mut out = Vec::new();
    for (q, b) in p {
        if avoid.contains(&b.name) {
            let n = names.fresh(&b.name);
            m = m.substitute(&b.name, &Term::var(&n));
            out.push((q, Binder { name: n, ..b }));
        } else {
            out.push((q, b));
        }
    }
    (out, m)
}

fn pull_go(f: &Formula, names: &mut Names) -> (Prefix, Formula) {
    if let Some((q, b, body)) = peel_standard(f) {
        let (mut p, m) = pull_go(body, names);
        p.insert(0, (q, b));
        return (p, m);
    }
    match f {
        Formula::Quant(q, x, ty, body) => {
            let (p, m) = pull_go(body, names);
            let passes = match q {
                Quant::Forall | Quant::ForallMono => Quant::ForallSt,
                _ => Quant::ExistsSt,
            };
            let k = p.iter().take_while(|(pq, _)| *pq == passes).count();
            let (moved, rest) = (p[..k].to_vec(), p[k..].to_vec());
            let avoid: BTreeSet<String> = [x.clone()].into();
            let (moved, inner) = freshen(moved, render_prefix(&rest, m), &avoid, names);
            (moved, Formula::quant(*q, x.clone(), ty.clone(), inner))
        }
        Formula::And(a, b) | Formula::Or(a, b) => {
            let rebuild = |l: Formula, r: Formula| {
                if matches!(f, Formula::And(..)) {
                    Formula::and(l, r)
                } else {
                    Formula::or(l, r)
                }
            };
            let (pa, ma) = pull_go(a, names);
            let (pb, mb) = pull_go(b, names);
            if !is_ae(&pa) || !is_ae(&pb) {
                return (Vec::new(), rebuild(render_prefix(&pa, ma), render_prefix(&pb, mb)));
            }
            let (pa, ma, pb, mb) = separate(pa, ma, pb, mb, names);
            let (ua, ea) = split_ae(pa);
            let (ub, eb) = split_ae(pb);
            ([ua, ub, ea, eb].concat(), rebuild(ma, mb))
        }
        Formula::Implies(a, b) => {
            let (pa, ma) = pull_go(a, names);
            let (pb, mb) = pull_go(b, names);
            if !is_ae(&pa) || !is_ae(&pb) {
                return (Vec::new(), Formula::implies(render_prefix(&pa, ma), render_prefix(&pb, mb)));
            }
            let (pa, ma, pb, mb) = separate(pa, ma, pb, mb, names);
            let (ua, ea) = split_ae(pa);
            let (ub, eb) = split_ae(pb);
            ([dual(ea), ub, eb, dual(ua)].concat(), Formula::implies(ma, mb))
        }
        Formula::Not(a) => {
            let (p, m) = pull_go(a, names);
            (dual(p), Formula::not(m))
        }
        other => (Vec::new(), other.clone()),
    }
}

/// Makes the two prefixes disjoint from each other and from the other side.
fn separate(pa: Prefix, ma: Formula, pb: Prefix, mb: Formula, names: &mut Names) -> (Prefix, Formula, Prefix, Formula) {
    let mut avoid_a = render_prefix(&pb, mb.clone()).free_vars();
    avoid_a.extend(pb.iter().map(|(_, b)| b.name.clone()));
    let (pa, ma) = freshen(pa, ma, &avoid_a, names);
    let mut avoid_b = render_prefix(&pa, ma.clone()).free_vars();
    avoid_b.extend(pa.iter().map(|(_, b)| b.name.clone()));
    let (pb, mb) = freshen(pb, mb, &avoid_b, names);
    (pa, ma, pb, mb)
}

/// Moves standard quantifiers outward by classical prenexing.
pub fn pull(f: &Formula, names: &mut Names) -> Option<Formula> {
    let (p, m) = pull_go(f, names);
    let out = render_prefix(&p, m);
    (out != *f).then_some(out)
}

/// Drops the monotonicity guard of the first leading standard universal that has one.
pub fn drop_monotone_guard(f: &Formula) -> Option<(Formula, String)> {
    let mut path = Vec::new();
    let mut cur = f;
    while let Some((q, b, body)) = peel_standard(cur) {
        if q != Quant::ForallSt {
            return None;
        }
        if b.mono && !b.ty.is_base() {
            let new = Formula::quant(Quant::ForallSt, b.name.clone(), b.ty.clone(), body.clone());
            return Some((
                replace(f, &path, new),
                format!("{} need not be monotone: the matrix also holds for its closure", b.name),
            ));
        }
        path.push(0);
        if let Formula::Quant(_, _, _, inner) = cur {
            if !std::ptr::eq(inner.as_ref(), body) {
                path.push(1);
            }
        }
        cur = body;
    }
    None
}

/// Locates `(forall x)(exists-st y) phi` on the standard prefix spine.
fn realization_site(f: &Formula) -> Option<Vec<usize>> {
    let mut path = Vec::new();
    let mut cur = f;
    loop {
        if let Formula::Quant(Quant::Forall | Quant::ForallMono, ..) = cur {
            return Some(path);
        }
        let (_, _, body) = peel_standard(cur)?;
        path.push(0);
        if let Formula::Quant(_, _, _, inner) = cur {
            if !std::ptr::eq(inner.as_ref(), body) {
                path.push(1);
            }
        }
        cur = body;
    }
}

/// `(forall x)(exists-st y) phi` becomes `(exists-st z)(forall x)(exists y <=* z) phi`.
pub fn realization(f: &Formula, names: &mut Names) -> Result<Option<(Formula, String)>, PipelineError> {
    let Some(path) = realization_site(f) else { return Ok(None) };
    let site = get(f, &path);
    let mut block = Vec::new();
    let mut cur = site;
    while let Formula::Quant(q @ (Quant::Forall | Quant::ForallMono), x, t, body) = cur {
        block.push((*q, x.clone(), t.clone()));
        cur = body;
    }
    let mut ys = Vec::new();
    while let Some((Quant::ExistsSt, b, body)) = peel_standard(cur) {
        ys.push(b);
        cur = body;
    }
    if ys.is_empty() {
        return Ok(None);
    }
    if !cur.is_internal() {
        return Err(PipelineError::ProvisoViolated {
            rule: "apply_realization".into(),
            reason: format!("matrix is not internal: {}", cur),
        });
    }
    let shared = ys.len() > 1 && ys.iter().all(|y| y.ty.is_base());
    let bounds: Vec<Binder> = if shared {
        vec![Binder::mono(names.fresh("l"), FinType::Base)]
    } else {
        ys.iter().map(|y| Binder::mono(names.fresh(&format!("{}'", y.name)), y.ty.clone())).collect()
    };
    let bound_of = |i: usize| if shared { &bounds[0] } else { &bounds[i] };
    let mut inner = cur.clone();
    for (i, y) in ys.iter().enumerate().rev() {
        inner = Formula::exists_bounded(&y.name, y.ty.clone(), Term::var(&bound_of(i).name), inner);
    }
    for (q, x, t) in block.iter().rev() {
        inner = Formula::quant(*q, x.clone(), t.clone(), inner);
    }
    for b in bounds.iter().rev() {
        inner = Formula::exists_st(&b.name, b.ty.clone(), b.mono, inner);
    }
    let evidence = format!(
        "internal matrix; bound {} for {}",
        bounds.iter().map(|b| b.name.as_str()).collect::<Vec<_>>().join(","),
        ys.iter().map(|b| b.name.as_str()).collect::<Vec<_>>().join(",")
    );
    Ok(Some((replace(f, &path, inner), evidence)))
}

fn atom_sides(f: &Formula) -> Option<(&str, &Term, &Term)> {
    let Formula::Atom(Rel::Eq0, t, zero) = f else { return None };
    if *zero != Term::Num(0) {
        return None;
    }
    let (head, args) = t.spine();
    let h = head.as_free()?;
    if (h == "rle" || h == "rlt") && args.len() == 2 {
        Some((h, args[0], args[1]))
    } else {
        None
    }
}

/// Occurrences of `v` with their polarity, each tagged by whether it sits
/// inside an atom accepted by `ok`.
fn occurrences(f: &Formula, v: &str, positive: bool, ok: &dyn Fn(&Formula, bool) -> bool) -> bool {
    match f {
        Formula::Quant(_, x, _, _) if x == v => true,
        Formula::Atom(..) | Formula::St(_) | Formula::Approx(..) => !f.mentions(v) || ok(f, positive),
        Formula::Not(a) => occurrences(a, v, !positive, ok),
        Formula::Implies(a, b) => occurrences(a, v, !positive, ok) && occurrences(b, v, positive, ok),
        Formula::And(a, b) | Formula::Or(a, b) => occurrences(a, v, positive, ok) && occurrences(b, v, positive, ok),
        Formula::Quant(_, _, _, b) => occurrences(b, v, positive, ok),
    }
}

/// `v` only appears as `1/v` on the right of a comparison in negative position.
fn antitone(body: &Formula, v: &str) -> bool {
    let inv = Term::app(Term::var("inv"), Term::var(v));
    body.mentions(v)
        && occurrences(body, v, true, &|atom, positive| {
            !positive
                && atom_sides(atom).is_some_and(|(_, l, r)| !l.mentions(v) && *r == inv)
        })
}

fn summands(t: &Term) -> Vec<&Term> {
    let (head, args) = t.spine();
    if head.as_free() == Some("radd") && args.len() == 2 {
        let mut out = summands(args[0]);
        out.extend(summands(args[1]));
        out
    } else {
        vec![t]
    }
}

fn single_subterm_with<'a>(t: &'a Term, v: &str, acc: &mut Vec<&'a Term>, seed: &Term) {
    if t == seed {
        acc.push(t);
        return;
    }
    match t {
        Term::App(a, b) => {
            single_subterm_with(a, v, acc, seed);
            single_subterm_with(b, v, acc, seed);
        }
        Term::Abs(_, _, b) => single_subterm_with(b, v, acc, seed),
        Term::Free(n) if n == v => acc.push(t),
        _ => {}
    }
}

/// The subterm `s(v)` if `v` only occurs inside copies of one real summand
/// on the right of comparisons in positive position.
fn max_collapse_subterm(body: &Formula, v: &str) -> Option<Term> {
    let mut candidate: Option<Term> = None;
    let mut scan = |f: &Formula| {
        if let Some((_, l, r)) = atom_sides(f) {
            if l.mentions(v) {
                return false;
            }
            for s in summands(r) {
                if s.mentions(v) && !matches!(s, Term::Free(_)) {
                    match &candidate {
                        None => candidate = Some(s.clone()),
                        Some(c) if c == s => {}
                        _ => return false,
                    }
                }
            }
            true
        } else {
            false
        }
    };
    let ok = occurrences(body, v, true, &|atom, positive| positive && atom_sides(atom).is_some());
    if !ok {
        return None;
    }
    let mut all_ok = true;
    let mut stack = vec![body];
    while let Some(f) = stack.pop() {
        if let Formula::Atom(..) = f {
            if f.mentions(v) && !scan(f) {
                all_ok = false;
            }
        }
        stack.extend(children(f));
    }
    let s = candidate?;
    if !all_ok {
        return None;
    }
    let mut hits = Vec::new();
    let mut check = true;
    let mut stack = vec![body];
    while let Some(f) = stack.pop() {
        if let Formula::Atom(_, l, r) = f {
            for t in [l, r] {
                hits.clear();
                single_subterm_with(t, v, &mut hits, &s);
                if hits.iter().any(|h| **h != s) {
                    check = false;
                }
            }
        }
        stack.extend(children(f));
    }
    check.then_some(s)
}

/// Peels nested bounded existentials and reports whether `w` occurs only
/// in the antecedent of the implication underneath.
fn antecedent_only(body: &Formula, w: &str) -> bool {
    let mut cur = body;
    while let Some((_, _, _, inner)) = cur.as_bounded_exists() {
        cur = inner;
    }
    match cur {
        Formula::Implies(_, c) => !c.mentions(w),
        _ => false,
    }
}

enum Site {
    Substitute,
    Lift { binder_path: Vec<usize>, binder: String },
    Collapse { binder_path: Vec<usize>, binder: String },
}

/// Eliminates a bounded existential over `O` when the matrix is monotone in it.
pub fn instantiate_base_bound(f: &Formula) -> Option<(Formula, String)> {
    let mut found: Option<(Vec<usize>, Site)> = None;
    visit(f, &mut Vec::new(), &mut Vec::new(), &mut |g, path, binders| {
        let Some((v, ty, bound, body)) = g.as_bounded_exists() else { return false };
        if !ty.is_base() {
            return false;
        }
        let outer = bound.as_free().and_then(|b| {
            binders
                .iter()
                .rposition(|(_, x, _)| x == b)
                .filter(|&i| binders[i].0 == Quant::ExistsSt)
                .map(|i| (i, b.to_string()))
        });
        if antitone(body, v) {
            let site = match outer {
                Some((i, b)) => Site::Lift {
                    binder_path: binders[i].2.clone(),
                    binder: b,
                },
                None => Site::Substitute,
            };
            found = Some((path.to_vec(), site));
            return true;
        }
        if let Some((i, b)) = outer {
            if let Some(s) = max_collapse_subterm(body, v) {
                let between = &binders[i + 1..];
                if between.iter().all(|(_, x, _)| !s.mentions(x)) {
                    found = Some((
                        path.to_vec(),
                        Site::Collapse {
                            binder_path: binders[i].2.clone(),
                            binder: b,
                        },
                    ));
                    return true;
                }
            }
        }
        false
    });
    let (path, site) = found?;
    let (v, _, bound, body) = get(f, &path).as_bounded_exists().unwrap();
    let v = v.to_string();
    let replaced = replace(f, &path, body.substitute(&v, bound));
    match site {
        Site::Substitute => Some((replaced, format!("antitone in {}: instantiated at {}", v, bound))),
        Site::Lift { binder_path, binder } => {
            let (g, dropped) = weaken_cobounded(&replaced, &binder_path, &binder);
            let g = rename_binder_if_free(&g, &binder_path, &binder, &v);
            let mut ev = format!("antitone in {}: lifted to its standard bound {}", v, binder);
            if !dropped.is_empty() {
                ev.push_str(&format!("; bound dropped for {}", dropped.join(",")));
            }
            Some((g, ev))
        }
        Site::Collapse { binder_path, binder } => {
            let g = rename_binder_if_free(&replaced, &binder_path, &binder, &v);
            Some((
                g,
                format!("{} enters one summand positively: a maximizer below {} is chosen outside", v, binder),
            ))
        }
    }
}

/// Turns `(exists w <=* b)` into `(exists w)` for every `w` under the binder
/// `b` that only occurs in an antecedent.
fn weaken_cobounded(f: &Formula, binder_path: &[usize], b: &str) -> (Formula, Vec<String>) {
    let mut cur = f.clone();
    let mut dropped = Vec::new();
    loop {
        let sub = get(&cur, binder_path);
        let mut hit: Option<Vec<usize>> = None;
        visit(sub, &mut Vec::new(), &mut Vec::new(), &mut |g, path, _| {
            if let Some((w, _, bound, body)) = g.as_bounded_exists() {
                if bound.as_free() == Some(b) && antecedent_only(body, w) {
                    hit = Some(path.to_vec());
                    return true;
                }
            }
            false
        });
        let Some(p) = hit else { break };
        let full: Vec<usize> = binder_path.iter().chain(&p).copied().collect();
        let (w, ty, _, body) = get(&cur, &full).as_bounded_exists().unwrap();
        dropped.push(w.to_string());
        let new = Formula::exists(w.to_string(), ty.clone(), body.clone());
        cur = replace(&cur, &full, new);
    }
    (cur, dropped)
}

fn rename_binder_if_free(f: &Formula, binder_path: &[usize], b: &str, to: &str) -> Formula {
    let Formula::Quant(q, x, t, body) = get(f, binder_path) else { return f.clone() };
    debug_assert_eq!(x, b);
    let still_bounding = {
        let mut found = false;
        visit(body, &mut Vec::new(), &mut Vec::new(), &mut |g, _, _| {
            if let Some((_, _, bound, _)) = g.as_bounded_exists() {
                if bound.as_free() == Some(b) {
                    found = true;
                }
            }
            found
        });
        found
    };
    if still_bounding || body.all_names().contains(to) {
        return f.clone();
    }
    let renamed = Formula::quant(*q, to.to_string(), t.clone(), body.substitute(b, &Term::var(to)));
    replace(f, binder_path, renamed)
}

/// Hypothesis-role choice: `(forall-st x)(exists-st y) phi` becomes
/// `(forall-st x)(exists y <=* g(x)) phi` with `g` returned as a parameter.
pub fn monotone_choice_open(f: &Formula, names: &mut Names) -> Option<(Formula, Vec<Binder>, String)> {
    let nf = NormalForm::recognize(f).ok()?;
    if nf.existentials.is_empty() {
        return None;
    }
    let dom: Vec<FinType> = nf.universals.iter().map(|b| b.ty.clone()).collect();
    let args: Vec<Term> = nf.universals.iter().map(|b| Term::var(&b.name)).collect();
    let gs: Vec<Binder> = nf
        .existentials
        .iter()
        .map(|y| Binder::mono(names.fresh("g"), FinType::curried(&dom, y.ty.clone())))
        .collect();
    let mut inner = nf.matrix.clone();
    for (y, g) in nf.existentials.iter().zip(&gs).rev() {
        inner = Formula::exists_bounded(&y.name, y.ty.clone(), Term::apps(Term::var(&g.name), args.clone()), inner);
    }
    for u in nf.universals.iter().rev() {
        inner = Formula::forall_st(&u.name, u.ty.clone(), u.mono, inner);
    }
    let ev = format!(
        "monotone choice for {}; {} kept as parameter",
        nf.existentials.iter().map(|b| b.name.as_str()).collect::<Vec<_>>().join(","),
        gs.iter().map(|b| b.name.as_str()).collect::<Vec<_>>().join(",")
    );
    Some((inner, gs, ev))
}

/// How a real-valued argument may be used without breaking extensionality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Route {
    /// Binary sequence guarded by `<=* (lam n : O 1)`, used only under `rb`.
    Binary,
    /// A real used only through equality-respecting symbols.
    Real,
}

/// Evidence that a sequence quantifier may lose its standardness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefEvidence {
    pub variable: String,
    pub route: Route,
    pub symbols: Vec<String>,
}

fn one_sequence() -> Term {
    Term::lam("n", FinType::Base, Term::Num(1))
}

fn ref_term(t: &Term, v: &str, route: &Route, sig: &Signature, env: &[(String, FinType)], seen: &mut BTreeSet<String>) -> Result<(), String> {
    if !t.mentions(v) {
        return Ok(());
    }
    let (head, args) = t.spine();
    match head {
        Term::Free(h) if h == v => {
            if !args.is_empty() {
                return Err(format!("{} is applied to an argument in {}", v, t));
            }
            if *route == Route::Binary {
                return Err(format!("{} occurs outside rb in {}", v, t));
            }
            Ok(())
        }
        Term::Free(h) => {
            let htype = sig
                .get(h)
                .map(|s| s.ty.clone())
                .or_else(|| env.iter().rev().find(|(n, _)| n == h).map(|(_, t)| t.clone()));
            let symbol = sig.get(h);
            for (i, a) in args.iter().enumerate() {
                if !a.mentions(v) {
                    continue;
                }
                if let Some(s) = symbol {
                    if !s.respects_equality {
                        return Err(format!("{} does not respect equality of reals", h));
                    }
                    seen.insert(h.clone());
                } else {
                    let slot = htype.as_ref().and_then(|ty| ty.uncurry().0.get(i).map(|t| (*t).clone()));
                    if slot.as_ref() != Some(&crate::formulas::real()) {
                        return Err(format!("argument of {} is not a real", h));
                    }
                }
                if h == "rb" && *route == Route::Binary && a.as_free() == Some(v) {
                    continue;
                }
                ref_term(a, v, route, sig, env, seen)?;
            }
            Ok(())
        }
        Term::Abs(_, _, body) => {
            let opened = body.open(&Term::var("%lam"));
            ref_term(&opened, v, route, sig, env, seen)?;
            for a in args {
                ref_term(a, v, route, sig, env, seen)?;
            }
            Ok(())
        }
        other => Err(format!("{} appears under {}", v, other)),
    }
}

fn ref_formula(f: &Formula, v: &str, route: &Route, sig: &Signature, env: &mut Vec<(String, FinType)>, seen: &mut BTreeSet<String>) -> Result<(), String> {
    match f {
        Formula::Atom(_, l, r) | Formula::Approx(l, r) => {
            ref_term(l, v, route, sig, env, seen)?;
            ref_term(r, v, route, sig, env, seen)
        }
        Formula::St(t) => {
            if t.mentions(v) {
                Err(format!("standardness of a term containing {}", v))
            } else {
                Ok(())
            }
        }
        Formula::Quant(_, x, ty, b) => {
            if x == v {
                return Ok(());
            }
            env.push((x.clone(), ty.clone()));
            let r = ref_formula(b, v, route, sig, env, seen);
            env.pop();
            r
        }
        _ => {
            for c in children(f) {
                ref_formula(c, v, route, sig, env, seen)?;
            }
            Ok(())
        }
    }
}

/// Checks that `body` uses `v` only through equality-respecting symbols.
pub fn check_ref(body: &Formula, v: &str, route: Route, sig: &Signature) -> Result<RefEvidence, String> {
    let mut seen = BTreeSet::new();
    ref_formula(body, v, &route, sig, &mut Vec::new(), &mut seen)?;
    Ok(RefEvidence {
        variable: v.to_string(),
        route,
        symbols: seen.into_iter().collect(),
    })
}

/// Candidate standard quantifiers over `O -> O` with their route and checked body.
fn sequence_sites(f: &Formula) -> Vec<(Vec<usize>, String, Route)> {
    let mut out = Vec::new();
    visit(f, &mut Vec::new(), &mut Vec::new(), &mut |g, path, _| {
        if g.as_mono_standard().is_some() {
            return false;
        }
        if let Formula::Quant(Quant::ForallSt, x, ty, body) = g {
            if *ty == FinType::one() {
                let route = match body.as_ref() {
                    Formula::Implies(guard, _) => match guard.as_ref() {
                        Formula::Atom(Rel::LeqStar(_), Term::Free(a), r) if a == x && *r == one_sequence() => Route::Binary,
                        _ => Route::Real,
                    },
                    _ => Route::Real,
                };
                out.push((path.to_vec(), x.clone(), route));
            }
        }
        false
    });
    out
}

fn checked_body<'a>(g: &'a Formula, route: &Route) -> &'a Formula {
    let Formula::Quant(_, _, _, body) = g else { unreachable!() };
    match (route, body.as_ref()) {
        (Route::Binary, Formula::Implies(_, rest)) => rest,
        _ => body,
    }
}

/// Drops `st` from the first sequence quantifier whose matrix respects
/// equality of reals. Returns the refusal reason of the last candidate otherwise.
pub fn drop_st_on_sequence(f: &Formula, sig: &Signature) -> Result<Option<(Formula, RefEvidence)>, PipelineError> {
    let mut refusal = None;
    for (path, x, route) in sequence_sites(f) {
        let g = get(f, &path);
        match check_ref(checked_body(g, &route), &x, route.clone(), sig) {
            Ok(ev) => {
                let Formula::Quant(_, x, ty, body) = g else { unreachable!() };
                let new = Formula::quant(Quant::Forall, x.clone(), ty.clone(), (**body).clone());
                return Ok(Some((replace(f, &path, new), ev)));
            }
            Err(reason) => refusal = Some(reason),
        }
    }
    match refusal {
        Some(reason) => Err(PipelineError::ProvisoViolated {
            rule: "drop_st_on_sequence_quantifier".into(),
            reason,
        }),
        None => Ok(None),
    }
}
