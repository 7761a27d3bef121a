mod support;

use nsa_core::corpus::{self, Expectation, FixtureError};
use nsa_core::formulas::{recognize_normal_form, Formula};
use nsa_core::pipeline::{drop_st_on_sequence_quantifier, PipelineError, Strategy};
use support::*;

#[test]
fn continuity_hypothesis_reaches_modulus_form() {
    let got = states("uniform_continuity_approx");
    assert_chain(&got[1..], &continuity_chain());
}

#[test]
fn riemann_sums_with_modulus_reach_extraction_form() {
    let got = states("riemann_sums_given_modulus");
    let (a, _) = riemann_parts();
    let cons = "(forall-st k' : O (exists-st N' : O (forall p : R (forall q : R \
                (implies (=0 (rle (dist (rmax (mesh p) (mesh q)) r0) (inv N')) 0) \
                (=0 (rle (dist (rsum f p) (rsum f q)) (inv k')) 0))))))";
    let input = p(&format!("(forall f : (-> R R) (implies (forall-st k : O {a}) {cons}))"));
    let mut want = vec![input];
    want.extend(riemann_tail());
    assert_chain(&got, &want);
}

#[test]
fn riemann_integrability_runs_both_sides_then_combines() {
    let got = states("riemann_integrability_approx");
    let tail = riemann_tail();
    assert_chain(&got[got.len() - tail.len()..], &tail);
    let modulus = continuity_chain().pop().unwrap();
    let hyp = got
        .iter()
        .filter_map(|s| match s {
            Formula::Quant(_, _, _, b) => match b.as_ref() {
                Formula::Implies(h, _) => Some((**h).clone()),
                _ => None,
            },
            _ => None,
        })
        .find(|h| h.alpha_eq(&modulus));
    assert!(hyp.is_some(), "hypothesis side passes through the modulus form");
}

#[test]
fn binary_sequences_lose_standardness() {
    assert_chain(&states("binary_limit_standard_sequences"), &binary_chain());
}

#[test]
fn pointwise_maximum_chain() {
    let got = states("nearly_maximal_point_given_modulus");
    assert_chain(&got[..3], &maximum_chain());
    let end = got.last().unwrap();
    let nf = recognize_normal_form(end).unwrap();
    let names: Vec<_> = nf.universals.iter().map(|b| b.name.as_str()).collect();
    assert_eq!(names, ["g", "k"]);
    assert_eq!(nf.existentials.len(), 1);
}

#[test]
fn derivative_of_integral_matches_riemann_shape() {
    let got = states("derivative_of_integral_standard");
    let nf = recognize_normal_form(got.last().unwrap()).unwrap();
    let u: Vec<_> = nf.universals.iter().map(|b| b.name.as_str()).collect();
    let e: Vec<_> = nf.existentials.iter().map(|b| b.name.as_str()).collect();
    assert_eq!(u, ["l", "g", "k"]);
    assert_eq!(e, ["N"]);
    assert!(matches!(&nf.matrix, Formula::Quant(_, f, _, b) if f == "f"
        && matches!(b.as_ref(), Formula::Quant(_, k, _, _) if k == "k'")));
}

#[test]
fn non_extensional_sequence_quantifier_gets_stuck() {
    let fx = corpus::get("binary_limit_non_extensional").unwrap();
    assert_eq!(fx.expect, Expectation::Stuck);
    let err = fx.run(&Strategy::default()).unwrap_err();
    assert!(err.to_string().contains("not a normal form"), "{}", err);
    let doc = fx.document().unwrap();
    match drop_st_on_sequence_quantifier(&doc.formula, &doc.signature) {
        Err(PipelineError::ProvisoViolated { reason, .. }) => assert!(reason.contains("at"), "{}", reason),
        other => panic!("expected refusal, got {:?}", other),
    }
}

#[test]
fn transcripts_are_byte_stable() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/golden");
    for fx in corpus::embedded() {
        let want = std::fs::read_to_string(dir.join(format!("{}.trace", fx.name))).unwrap();
        let got = fx.transcript(&Strategy::default()).unwrap();
        assert_eq!(got, want, "{}", fx.name);
        assert_eq!(fx.transcript(&Strategy::default()).unwrap(), got);
    }
}

#[test]
fn endpoints_are_normal_forms() {
    for fx in corpus::embedded() {
        match (fx.expect, fx.run(&Strategy::default())) {
            (Expectation::NormalForm, Ok(run)) => {
                let last = run.trace.states().last().map(|f| (*f).clone()).unwrap();
                assert_eq!(recognize_normal_form(&last).unwrap(), run.normal_form);
            }
            (Expectation::Stuck, Err(FixtureError::Pipeline(PipelineError::Stuck { .. }))) => {}
            (want, got) => panic!("{}: expected {:?}, got {:?}", fx.name, want, got.map(|r| r.normal_form)),
        }
    }
}

#[test]
fn strategies_agree_up_to_renaming() {
    for fx in corpus::embedded() {
        let outs: Vec<_> = Strategy::all().iter().map(|s| fx.run(s).map(|r| r.normal_form.render())).collect();
        for o in &outs[1..] {
            match (&outs[0], o) {
                (Ok(a), Ok(b)) => assert!(a.alpha_eq(b), "{}:\n {}\n {}", fx.name, a, b),
                (Err(_), Err(_)) => {}
                _ => panic!("{}: strategies disagree on success", fx.name),
            }
        }
    }
}

#[test]
fn step_budget_is_enforced() {
    let fx = corpus::get("riemann_integrability_approx").unwrap();
    let err = fx.run(&Strategy::default().with_budget(3)).unwrap_err();
    assert!(err.to_string().contains("budget"), "{}", err);
}
