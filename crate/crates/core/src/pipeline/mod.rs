//! Rewriting of formulas with standardness predicates into normal forms.

mod rules;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::formulas::{peel_standard, Binder, Formula, NormalForm, Quant, Signature};
use crate::kernel::FinType;

pub use rules::{check_ref, Names, RefEvidence, Route};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    ResolveInfinitesimal,
    PullStandardQuantifiers,
    DropMonotoneGuard,
    ApplyRealization,
    InstantiateBaseBound,
    ApplyMonotoneChoice,
    CombineNormalForms,
    DropStOnSequenceQuantifier,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::ResolveInfinitesimal => "resolve_infinitesimal",
            Rule::PullStandardQuantifiers => "pull_standard_quantifiers",
            Rule::DropMonotoneGuard => "drop_monotone_guard",
            Rule::ApplyRealization => "apply_realization",
            Rule::InstantiateBaseBound => "instantiate_base_bound",
            Rule::ApplyMonotoneChoice => "apply_monotone_choice",
            Rule::CombineNormalForms => "combine_normal_forms",
            Rule::DropStOnSequenceQuantifier => "drop_st_on_sequence_quantifier",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEntry {
    pub rule: Rule,
    pub before: Formula,
    pub after: Formula,
    pub evidence: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RewriteTrace {
    pub entries: Vec<TraceEntry>,
}

impl RewriteTrace {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn rules(&self) -> Vec<Rule> {
        self.entries.iter().map(|e| e.rule).collect()
    }

    /// The input followed by every intermediate formula.
    pub fn states(&self) -> Vec<&Formula> {
        let mut out: Vec<&Formula> = self.entries.first().map(|e| &e.before).into_iter().collect();
        out.extend(self.entries.iter().map(|e| &e.after));
        out
    }

    /// Every entry's `before` equals the previous entry's `after`.
    pub fn is_connected(&self) -> bool {
        self.entries.windows(2).all(|w| w[0].after == w[1].before)
    }
}

impl fmt::Display for RewriteTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.entries.iter().enumerate() {
            writeln!(f, "{:>3}. {} [{}]", i + 1, e.rule, e.evidence)?;
            writeln!(f, "     {}", e.after)?;
        }
        Ok(())
    }
}

/// Whether a formula is assumed or proved.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Hypothesis,
    Claim,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Strategy {
    pub name: String,
    pub order: Vec<Rule>,
    pub max_steps: usize,
}

impl Default for Strategy {
    fn default() -> Strategy {
        Strategy {
            name: "default".into(),
            order: vec![
                Rule::ResolveInfinitesimal,
                Rule::PullStandardQuantifiers,
                Rule::DropMonotoneGuard,
                Rule::ApplyRealization,
                Rule::InstantiateBaseBound,
                Rule::ApplyMonotoneChoice,
                Rule::CombineNormalForms,
                Rule::DropStOnSequenceQuantifier,
            ],
            max_steps: 200,
        }
    }
}

impl Strategy {
    /// Eliminates bounds as soon as they appear.
    pub fn eager_bounds() -> Strategy {
        Strategy {
            name: "eager-bounds".into(),
            order: vec![
                Rule::ResolveInfinitesimal,
                Rule::InstantiateBaseBound,
                Rule::ApplyRealization,
                Rule::PullStandardQuantifiers,
                Rule::DropStOnSequenceQuantifier,
                Rule::DropMonotoneGuard,
                Rule::ApplyMonotoneChoice,
                Rule::CombineNormalForms,
            ],
            max_steps: 200,
        }
    }

    pub fn all() -> Vec<Strategy> {
        vec![Strategy::default(), Strategy::eager_bounds()]
    }

    pub fn with_budget(mut self, max_steps: usize) -> Strategy {
        self.max_steps = max_steps;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error("{rule}: proviso violated: {reason}")]
    ProvisoViolated { rule: String, reason: String },
    #[error("no rule applies: {reason}; last formula {last}")]
    Stuck { last: Formula, reason: String, trace: RewriteTrace },
    #[error("not a normal form: {0}")]
    NotNormalForm(String),
}

impl PipelineError {
    pub fn trace(&self) -> Option<&RewriteTrace> {
        match self {
            PipelineError::Stuck { trace, .. } => Some(trace),
            _ => None,
        }
    }
}

/// Expands every `approx` into `(forall-st N)(dist a b <= 1/N)`.
pub fn resolve_infinitesimal(f: &Formula, sig: &Signature) -> Formula {
    let mut names = Names::new(f, sig);
    rules::resolve(f, &mut names).unwrap_or_else(|| f.clone())
}

/// Prenexes standard quantifiers past internal ones and connectives.
pub fn pull_standard_quantifiers(f: &Formula, sig: &Signature) -> Formula {
    let mut names = Names::new(f, sig);
    rules::pull(f, &mut names).unwrap_or_else(|| f.clone())
}

pub fn drop_monotone_guard(f: &Formula) -> Option<Formula> {
    rules::drop_monotone_guard(f).map(|(g, _)| g)
}

/// `(forall x)(exists-st y) phi` becomes `(exists-st y')(forall x)(exists y <=* y') phi`
/// for internal `phi`.
pub fn apply_realization(f: &Formula, sig: &Signature) -> Result<Formula, PipelineError> {
    let mut names = Names::new(f, sig);
    match rules::realization(f, &mut names)? {
        Some((g, _)) => Ok(g),
        None => Err(PipelineError::ProvisoViolated {
            rule: Rule::ApplyRealization.name().into(),
            reason: "no internal universal block followed by a standard existential".into(),
        }),
    }
}

pub fn instantiate_base_bound(f: &Formula) -> Option<(Formula, String)> {
    rules::instantiate_base_bound(f)
}

/// `(forall-st x)(exists-st y) phi` becomes
/// `(exists-st g mono)(forall-st x)(exists y <=* g x) phi`.
pub fn apply_monotone_choice(f: &Formula, sig: &Signature) -> Result<Formula, PipelineError> {
    let mut names = Names::new(f, sig);
    let Some((open, params, _)) = rules::monotone_choice_open(f, &mut names) else {
        return Err(PipelineError::ProvisoViolated {
            rule: Rule::ApplyMonotoneChoice.name().into(),
            reason: "not a normal form with standard existentials".into(),
        });
    };
    Ok(params
        .iter()
        .rev()
        .fold(open, |acc, g| Formula::exists_st(&g.name, g.ty.clone(), true, acc)))
}

/// Drops `st` from a sequence quantifier whose matrix respects equality of reals.
pub fn drop_st_on_sequence_quantifier(f: &Formula, sig: &Signature) -> Result<(Formula, RefEvidence), PipelineError> {
    match rules::drop_st_on_sequence(f, sig)? {
        Some(out) => Ok(out),
        None => Err(PipelineError::ProvisoViolated {
            rule: Rule::DropStOnSequenceQuantifier.name().into(),
            reason: "no standard quantifier over O -> O".into(),
        }),
    }
}

/// A universal prefix in front of an implication.
#[derive(Clone, Debug)]
struct Split {
    prefix: Vec<(Quant, Binder)>,
    antecedent: Formula,
    consequent: Formula,
}

impl Split {
    fn of(f: &Formula) -> Option<Split> {
        let mut prefix = Vec::new();
        let mut cur = f;
        loop {
            if let Some((Quant::ForallSt, b, body)) = peel_standard(cur) {
                prefix.push((Quant::ForallSt, b));
                cur = body;
                continue;
            }
            match cur {
                Formula::Quant(q @ (Quant::Forall | Quant::ForallMono), x, t, body) => {
                    if let Formula::Implies(g, _) = body.as_ref() {
                        if g.mentions(x) && matches!(g.as_ref(), Formula::Atom(..)) {
                            return None;
                        }
                    }
                    prefix.push((*q, Binder::new(x.clone(), t.clone())));
                    cur = body;
                }
                Formula::Implies(a, b) => {
                    return Some(Split {
                        prefix,
                        antecedent: (**a).clone(),
                        consequent: (**b).clone(),
                    })
                }
                _ => return None,
            }
        }
    }

    fn rebuild(&self, a: Formula, b: Formula) -> Formula {
        self.prefix
            .iter()
            .rev()
            .fold(Formula::implies(a, b), |acc, (q, b)| wrap_binder(*q, b, acc))
    }
}

fn wrap_binder(q: Quant, b: &Binder, body: Formula) -> Formula {
    match q {
        Quant::ForallSt => Formula::forall_st(&b.name, b.ty.clone(), b.mono, body),
        Quant::ExistsSt => Formula::exists_st(&b.name, b.ty.clone(), b.mono, body),
        _ => Formula::quant(q, b.name.clone(), b.ty.clone(), body),
    }
}

fn hypothesis_ready(f: &Formula) -> bool {
    NormalForm::recognize(f).is_ok_and(|nf| nf.existentials.is_empty())
}

fn claim_ready(f: &Formula) -> bool {
    NormalForm::recognize(f).is_ok()
}

/// Combines normal forms of the two sides of `prefix [P -> Q]`. Choice
/// parameters obtained from the hypothesis become standard universals.
pub fn combine_normal_forms(implication: &Formula, params: &[Binder]) -> Result<Formula, PipelineError> {
    let split = Split::of(implication).ok_or_else(|| PipelineError::NotNormalForm("not an implication under universals".into()))?;
    let p = NormalForm::recognize(&split.antecedent).map_err(|e| PipelineError::NotNormalForm(e.to_string()))?;
    let q = NormalForm::recognize(&split.consequent).map_err(|e| PipelineError::NotNormalForm(e.to_string()))?;
    let mut universals: Vec<Binder> = split
        .prefix
        .iter()
        .filter(|(q, _)| *q == Quant::ForallSt)
        .map(|(_, b)| b.clone())
        .collect();
    universals.extend(params.iter().cloned());
    universals.extend(p.existentials.iter().cloned());
    universals.extend(q.universals.iter().cloned());
    let mut existentials = q.existentials.clone();
    existentials.extend(p.universals.iter().cloned());
    let mut seen = std::collections::BTreeSet::new();
    for b in universals.iter().chain(&existentials) {
        if !seen.insert(b.name.clone()) {
            return Err(PipelineError::NotNormalForm(format!("binder {} occurs on both sides", b.name)));
        }
    }
    let mut inner = Formula::implies(p.matrix, q.matrix);
    for b in existentials.iter().rev() {
        inner = Formula::exists_st(&b.name, b.ty.clone(), b.mono, inner);
    }
    for (qu, b) in split.prefix.iter().rev().filter(|(q, _)| *q != Quant::ForallSt) {
        inner = wrap_binder(*qu, b, inner);
    }
    for b in universals.iter().rev() {
        inner = Formula::forall_st(&b.name, b.ty.clone(), b.mono, inner);
    }
    Ok(inner)
}

struct Engine<'a> {
    sig: &'a Signature,
    strategy: &'a Strategy,
    names: Names,
    trace: RewriteTrace,
    pending: Vec<Binder>,
    chosen: Vec<Binder>,
}

impl Engine<'_> {
    fn record(&mut self, rule: Rule, before: Formula, after: Formula, evidence: String) -> Result<(), PipelineError> {
        if self.trace.len() >= self.strategy.max_steps {
            return Err(PipelineError::Stuck {
                last: before,
                reason: format!("step budget of {} exhausted", self.strategy.max_steps),
                trace: self.trace.clone(),
            });
        }
        self.trace.entries.push(TraceEntry {
            rule,
            before,
            after,
            evidence,
        });
        Ok(())
    }

    fn apply(&mut self, rule: Rule, f: &Formula, role: Role) -> Result<Option<(Formula, String)>, PipelineError> {
        Ok(match rule {
            Rule::ResolveInfinitesimal => rules::resolve(f, &mut self.names).map(|g| (g, "approx expanded".to_string())),
            Rule::PullStandardQuantifiers => rules::pull(f, &mut self.names).map(|g| (g, "prenex".to_string())),
            Rule::DropMonotoneGuard => rules::drop_monotone_guard(f),
            Rule::ApplyRealization => match rules::realization(f, &mut self.names) {
                Ok(r) => r,
                Err(PipelineError::ProvisoViolated { .. }) => None,
                Err(e) => return Err(e),
            },
            Rule::InstantiateBaseBound => rules::instantiate_base_bound(f),
            Rule::ApplyMonotoneChoice if role == Role::Hypothesis => {
                rules::monotone_choice_open(f, &mut self.names).map(|(g, params, ev)| {
                    self.chosen.extend(params);
                    (g, ev)
                })
            }
            Rule::ApplyMonotoneChoice | Rule::CombineNormalForms => None,
            Rule::DropStOnSequenceQuantifier => match rules::drop_st_on_sequence(f, self.sig) {
                Ok(r) => r.map(|(g, ev)| {
                    let text = format!(
                        "{} used through {} ({:?} route)",
                        ev.variable,
                        if ev.symbols.is_empty() { "no symbol".to_string() } else { ev.symbols.join(",") },
                        ev.route
                    );
                    (g, text)
                }),
                Err(PipelineError::ProvisoViolated { .. }) => None,
                Err(e) => return Err(e),
            },
        })
    }

    /// Normalizes the sides of a top implication separately, then combines.
    fn split_step(&mut self, f: &Formula, wrap: &dyn Fn(Formula) -> Formula) -> Result<Option<Formula>, PipelineError> {
        if f.has_approx() {
            return Ok(None);
        }
        let Some(split) = Split::of(f) else { return Ok(None) };
        let sides_ready = hypothesis_ready(&split.antecedent) && claim_ready(&split.consequent);
        if sides_ready && self.pending.is_empty() {
            return Ok(None);
        }
        let pending = std::mem::take(&mut self.pending);
        let outer_chosen = std::mem::take(&mut self.chosen);
        let mut a = split.antecedent.clone();
        if !hypothesis_ready(&a) {
            let q = split.consequent.clone();
            let s = split.clone();
            let inner_wrap = |x: Formula| wrap(s.rebuild(x, q.clone()));
            a = self.fixpoint(a, Role::Hypothesis, &inner_wrap)?;
        }
        let from_a = std::mem::replace(&mut self.chosen, outer_chosen);
        let mut b = split.consequent.clone();
        if !claim_ready(&b) {
            let a2 = a.clone();
            let s = split.clone();
            let inner_wrap = |x: Formula| wrap(s.rebuild(a2.clone(), x));
            b = self.fixpoint(b, Role::Claim, &inner_wrap)?;
        }
        let params = [pending, from_a].concat();
        let joined = split.rebuild(a, b);
        let (pa, pb) = split_sides(&joined);
        if !claim_ready(&pa) || !claim_ready(&pb) {
            self.pending = params;
            return Ok((joined != *f).then_some(joined));
        }
        let combined = combine_normal_forms(&joined, &params)?;
        let ev = if params.is_empty() {
            "sides combined".to_string()
        } else {
            format!(
                "sides combined with parameters {}",
                params.iter().map(|b| b.name.as_str()).collect::<Vec<_>>().join(",")
            )
        };
        self.record(Rule::CombineNormalForms, wrap(joined), wrap(combined.clone()), ev)?;
        Ok(Some(combined))
    }

    fn fixpoint(&mut self, f: Formula, role: Role, wrap: &dyn Fn(Formula) -> Formula) -> Result<Formula, PipelineError> {
        let mut cur = f;
        'outer: loop {
            if let Some(next) = self.split_step(&cur, wrap)? {
                cur = next;
                continue;
            }
            for &rule in &self.strategy.order.clone() {
                if let Some((next, ev)) = self.apply(rule, &cur, role)? {
                    self.names.reserve(&next);
                    self.record(rule, wrap(cur.clone()), wrap(next.clone()), ev)?;
                    cur = next;
                    continue 'outer;
                }
            }
            return Ok(cur);
        }
    }
}

fn split_sides(f: &Formula) -> (Formula, Formula) {
    match Split::of(f) {
        Some(s) => (s.antecedent, s.consequent),
        None => (f.clone(), f.clone()),
    }
}

/// Outcome of a template run.
#[derive(Clone, Debug)]
pub struct TemplateRun {
    pub normal_form: NormalForm,
    pub trace: RewriteTrace,
    /// Choice parameters left open by a hypothesis-role run.
    pub params: Vec<Binder>,
}

/// Rewrites `f` into a normal form with the default role of a claim.
pub fn run_template(f: &Formula, strategy: &Strategy, sig: &Signature) -> Result<(NormalForm, RewriteTrace), PipelineError> {
    run_template_with(f, strategy, sig, Role::Claim, &[]).map(|r| (r.normal_form, r.trace))
}

/// Rewrites `f` in the given role. `params` are choice functions obtained
/// earlier that are free in `f` and are to become standard universals.
pub fn run_template_with(f: &Formula, strategy: &Strategy, sig: &Signature, role: Role, params: &[Binder]) -> Result<TemplateRun, PipelineError> {
    let mut engine = Engine {
        sig,
        strategy,
        names: Names::new(f, sig),
        trace: RewriteTrace::default(),
        pending: params.to_vec(),
        chosen: Vec::new(),
    };
    let out = engine.fixpoint(f.clone(), role, &|x| x)?;
    match NormalForm::recognize(&out) {
        Ok(nf) => Ok(TemplateRun {
            normal_form: nf,
            trace: engine.trace,
            params: engine.chosen,
        }),
        Err(e) => Err(PipelineError::Stuck {
            last: out,
            reason: e.to_string(),
            trace: engine.trace,
        }),
    }
}

/// A choice parameter of type `args -> ret`.
pub fn choice_parameter(name: &str, args: &[FinType], ret: FinType) -> Binder {
    Binder::mono(name, FinType::curried(args, ret))
}
