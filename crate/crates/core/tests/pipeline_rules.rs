use nsa_core::formulas::{parse_formula, real, recognize_normal_form, Formula, Signature};
use nsa_core::kernel::FinType;
use nsa_core::pipeline::{
    apply_monotone_choice, apply_realization, check_ref, combine_normal_forms, drop_monotone_guard,
    drop_st_on_sequence_quantifier, instantiate_base_bound, pull_standard_quantifiers, resolve_infinitesimal,
    PipelineError, Route,
};

fn sig() -> Signature {
    Signature::analysis()
        .with("c", FinType::Base, true)
        .with("u", real(), true)
        .with("v", real(), true)
        .with("h", FinType::arrow(real(), FinType::Base), true)
        .with("P", FinType::one(), true)
}

fn p(src: &str) -> Formula {
    parse_formula(src, &sig()).unwrap_or_else(|e| panic!("{}: {}", e, src))
}

fn assert_alpha(got: &Formula, want: &str) {
    assert!(got.alpha_eq(&p(want)), "\n got  {}\n want {}", got, want);
}

#[test]
fn resolve_names_by_position() {
    let f = p("(implies (approx u v) (and (approx u r0) (approx v r0)))");
    let got = resolve_infinitesimal(&f, &sig());
    assert_eq!(
        got.to_string(),
        "(implies (forall-st N : O (=0 (rle (dist u v) (inv N)) 0)) \
         (and (forall-st k : O (=0 (rle (dist u r0) (inv k)) 0)) (forall-st k' : O (=0 (rle (dist v r0) (inv k')) 0))))"
    );
}

#[test]
fn pull_orders_universals_before_existentials() {
    let f = p("(and (forall-st a : O (exists-st b : O (=0 (P a) b))) (forall-st d : O (=0 (P d) c)))");
    let got = pull_standard_quantifiers(&f, &sig());
    assert_alpha(
        &got,
        "(forall-st a : O (forall-st d : O (exists-st b : O (and (=0 (P a) b) (=0 (P d) c)))))",
    );
}

#[test]
fn pull_renames_on_clash() {
    let f = p("(or (forall-st a : O (=0 (P a) 0)) (exists-st a : O (=0 a c)))");
    let got = pull_standard_quantifiers(&f, &sig());
    let nf = recognize_normal_form(&got).unwrap();
    assert_ne!(nf.universals[0].name, nf.existentials[0].name);
    assert_alpha(&got, "(forall-st a : O (exists-st b : O (or (=0 (P a) 0) (=0 b c))))");
}

#[test]
fn pull_dualizes_antecedent() {
    let f = p("(implies (forall-st a : O (=0 (P a) 0)) (=0 c 0))");
    assert_alpha(
        &pull_standard_quantifiers(&f, &sig()),
        "(exists-st a : O (implies (=0 (P a) 0) (=0 c 0)))",
    );
}

#[test]
fn realization_requires_internal_matrix() {
    let ok = p("(forall x : O (exists-st y : O (=0 (P x) y)))");
    assert_alpha(
        &apply_realization(&ok, &sig()).unwrap(),
        "(exists-st z : O (forall x : O (exists y : O (and (<=* y z) (=0 (P x) y)))))",
    );
    let bad = p("(forall x : O (exists-st y : O (forall-st z : O (=0 (P x) z))))");
    assert!(matches!(
        apply_realization(&bad, &sig()),
        Err(PipelineError::ProvisoViolated { .. })
    ));
}

#[test]
fn realization_shares_one_bound_for_numbers() {
    let f = p("(forall x : O (exists-st y : O (exists-st z : O (=0 (P x) (max y z)))))");
    let got = apply_realization(&f, &sig()).unwrap();
    assert_alpha(
        &got,
        "(exists-st l : O (forall x : O (exists y : O (and (<=* y l) (exists z : O (and (<=* z l) (=0 (P x) (max y z))))))))",
    );
}

#[test]
fn monotone_choice_closed_form() {
    let f = p("(forall-st x : O (exists-st y : O (=0 (P x) y)))");
    assert_alpha(
        &apply_monotone_choice(&f, &sig()).unwrap(),
        "(exists-st g : (-> O O) (and (<=* g g) (forall-st x : O (exists y : O (and (<=* y (g x)) (=0 (P x) y))))))",
    );
}

#[test]
fn instantiation_substitutes_a_term_bound() {
    let f = p("(exists n : O (and (<=* n (P c)) (implies (=0 (rle u (inv n)) 0) (=0 c 0))))");
    let (got, ev) = instantiate_base_bound(&f).unwrap();
    assert_alpha(&got, "(implies (=0 (rle u (inv (P c))) 0) (=0 c 0))");
    assert!(ev.contains("antitone"));
}

#[test]
fn instantiation_refuses_positive_occurrence() {
    let f = p("(exists n : O (and (<=* n c) (=0 (rle u (inv n)) 0)))");
    assert!(instantiate_base_bound(&f).is_none());
}

#[test]
fn drop_guard_only_on_universal() {
    let f = p("(forall-st g : (-> O O) (implies (<=* g g) (=0 (g c) 0)))");
    assert_alpha(&drop_monotone_guard(&f).unwrap(), "(forall-st g : (-> O O) (=0 (g c) 0))");
    let e = p("(exists-st g : (-> O O) (and (<=* g g) (=0 (g c) 0)))");
    assert!(drop_monotone_guard(&e).is_none());
}

#[test]
fn combine_places_parameters_after_prefix() {
    let f = p("(forall-st a : O (implies (forall-st b : O (=0 (P b) a)) (exists-st d : O (=0 d a))))");
    let params = [nsa_core::formulas::Binder::mono("G", FinType::one())];
    let got = combine_normal_forms(&f, &params).unwrap();
    assert_eq!(
        got.to_string(),
        "(forall-st a : O (forall-st G : (-> O O) (implies (<=* G G) (exists-st d : O (exists-st b : O (implies (=0 (P b) a) (=0 d a)))))))"
    );
}

#[test]
fn real_route_accepts_extensional_symbols() {
    let f = p("(forall-st z : (-> O O) (=0 (rle (rabs z) r1) 0))");
    let (got, ev) = drop_st_on_sequence_quantifier(&f, &sig()).unwrap();
    assert_alpha(&got, "(forall z : (-> O O) (=0 (rle (rabs z) r1) 0))");
    assert_eq!(ev.route, Route::Real);
    assert_eq!(ev.symbols, ["rabs", "rle"]);
}

#[test]
fn real_route_refusals() {
    let sig = sig();
    for src in [
        "(=0 (at z 3) 0)",
        "(=0 (z 3) 0)",
        "(st z)",
        "(=0 (pow2 (z 0)) 0)",
    ] {
        let f = parse_formula(&format!("(forall z : (-> O O) {})", src), &sig).unwrap();
        let Formula::Quant(_, _, _, body) = f else { unreachable!() };
        assert!(check_ref(&body, "z", Route::Real, &sig).is_err(), "{}", src);
    }
    let ok = p("(forall z : (-> O O) (=0 (h z) 0))");
    let Formula::Quant(_, _, _, body) = ok else { unreachable!() };
    assert!(check_ref(&body, "z", Route::Real, &sig).is_ok());
}

#[test]
fn binary_route_needs_rb() {
    let sig = sig();
    let f = p("(forall z : (-> O O) (=0 (rle (rb z) z) 0))");
    let Formula::Quant(_, _, _, body) = f else { unreachable!() };
    assert!(check_ref(&body, "z", Route::Binary, &sig).is_err());
}
