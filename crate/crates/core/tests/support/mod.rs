//! Hand-written displays of the rewrite chains, shared by test targets.
#![allow(dead_code)]

pub mod ust;

use nsa_core::corpus;
use nsa_core::formulas::{parse_formula, Formula, Signature};
use nsa_core::kernel::FinType;
use nsa_core::pipeline::Strategy;

pub fn sig() -> Signature {
    let r = nsa_core::formulas::real();
    Signature::analysis()
        .with("f", FinType::arrow(r.clone(), r.clone()), true)
        .with("g", FinType::one(), true)
        .with("xs", FinType::arrow(r.clone(), r.clone()), true)
        .with("x", r, true)
}

pub fn p(src: &str) -> Formula {
    parse_formula(src, &sig()).unwrap_or_else(|e| panic!("{}: {}", e, src))
}

pub fn states(name: &str) -> Vec<Formula> {
    let run = corpus::get(name).unwrap().run(&Strategy::default()).unwrap();
    assert!(run.trace.is_connected());
    run.trace.states().into_iter().cloned().collect()
}

pub fn chain_matches(got: &[Formula], want: &[Formula]) -> Result<(), String> {
    if got.len() != want.len() {
        return Err(format!("chain length {} instead of {}", got.len(), want.len()));
    }
    for (i, (g, w)) in got.iter().zip(want).enumerate() {
        if !g.alpha_eq(w) {
            return Err(format!("state {}:\n got  {}\n want {}", i, g, w));
        }
    }
    Ok(())
}

pub fn assert_chain(got: &[Formula], want: &[Formula]) {
    chain_matches(got, want).unwrap_or_else(|e| panic!("{}", e));
}

pub const D: &str = "(=0 (rle (dist x y) (inv N)) 0)";
pub const E: &str = "(=0 (rle (dist (f x) (f y)) (inv k)) 0)";

pub fn continuity_chain() -> Vec<Formula> {
    let body = format!("(implies {D} {E})");
    vec![
        p(&format!("(forall x : R (forall y : R (implies (forall-st N : O {D}) (forall-st k : O {E}))))")),
        p(&format!("(forall-st k : O (forall x : R (forall y : R (exists-st N : O {body}))))")),
        p(&format!(
            "(forall-st k : O (exists-st N' : O (forall x : R (forall y : R (exists N : O (and (<=* N N') {body}))))))"
        )),
        p(&format!("(forall-st k : O (exists-st N : O (forall x : R (forall y : R {body}))))")),
        p(&format!("(forall-st k : O (exists N : O (and (<=* N (g k)) (forall x : R (forall y : R {body})))))")),
        p(&format!(
            "(forall-st k : O (forall x : R (forall y : R (implies (=0 (rle (dist x y) (inv (g k))) 0) {E}))))"
        )),
    ]
}

pub fn riemann_parts() -> (String, String) {
    let a = "(forall x : R (forall y : R (implies (=0 (rle (dist x y) (inv (g k))) 0) \
             (=0 (rle (dist (f x) (f y)) (inv k)) 0))))"
        .to_string();
    let b = "(forall p : R (forall q : R (implies (=0 (rle (dist (rmax (mesh p) (mesh q)) r0) (inv N')) 0) \
             (=0 (rle (dist (rsum f p) (rsum f q)) (inv k')) 0))))"
        .to_string();
    (a, b)
}

pub fn riemann_tail() -> Vec<Formula> {
    let (a, b) = riemann_parts();
    let ab = format!("(implies {a} {b})");
    vec![
        p(&format!(
            "(forall-st g : (-> O O) (implies (<=* g g) (forall-st k' : O (forall f : (-> R R) \
             (exists-st N' : O (exists-st k : O {ab}))))))"
        )),
        p(&format!(
            "(forall-st g : (-> O O) (forall-st k' : O (forall f : (-> R R) (exists-st N' : O (exists-st k : O {ab})))))"
        )),
        p(&format!(
            "(forall-st g : (-> O O) (forall-st k' : O (exists-st l : O (forall f : (-> R R) \
             (exists N' : O (and (<=* N' l) (exists k : O (and (<=* k l) {ab}))))))))"
        )),
        p(&format!(
            "(forall-st g : (-> O O) (forall-st k' : O (exists-st N' : O (forall f : (-> R R) (exists k : O {ab})))))"
        )),
    ]
}


/// The binary-sequence limit before and after dropping standardness.
pub fn binary_chain() -> Vec<Formula> {
    let guard = "(<=* a (lam n : O 1))";
    let body = "(implies (and (=0 (rlt r0 (rabs (rb a))) 0) (=0 (rle (rabs (rb a)) (inv N)) 0)) \
                (=0 (rlt (dist (xs (rb a)) x) (inv k)) 0))";
    vec![
        p(&format!(
            "(forall-st k : O (exists-st N : O (forall-st a : (-> O O) (implies {guard} {body}))))"
        )),
        p(&format!("(forall-st k : O (exists-st N : O (forall a : (-> O O) (implies {guard} {body}))))")),
    ]
}

/// The nearly maximal point: pointwise form, realized form, instantiated form.
pub fn maximum_chain() -> Vec<Formula> {
    let hyp = "(forall x : R (forall y : R (forall l : O (implies (=0 (rle (dist x y) (inv (g l))) 0) \
               (=0 (rle (dist (f x) (f y)) (inv l)) 0)))))";
    let phi = |q: &str| format!("(=0 (rlt (f y) (radd (f (qr {q})) (inv (succ k)))) 0)");
    let wrap = |cons: String| p(&format!("(forall-st g : (-> O O) (forall f : (-> R R) (implies {hyp} {cons})))"));
    vec![
        wrap(format!("(forall-st k : O (forall y : R (exists-st q : O {})))", phi("q"))),
        wrap(format!(
            "(forall-st k : O (exists-st q : O (forall y : R (exists r : O (and (<=* r q) {})))))",
            phi("r")
        )),
        wrap(format!("(forall-st k : O (exists-st q : O (forall y : R {})))", phi("q"))),
    ]
}
