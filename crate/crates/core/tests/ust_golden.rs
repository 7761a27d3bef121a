mod support;

use support::ust::{check, check_invariance, clause_cases, MATRICES};

fn run(name: &str) {
    let case = clause_cases().into_iter().find(|c| c.name == name).unwrap();
    check(&case).unwrap_or_else(|e| panic!("{}", e));
}

#[test]
fn internal_formulas_are_fixed() {
    run("internal");
}

#[test]
fn standardness_gets_a_majorant() {
    run("standardness");
    run("standardness_of_number");
}

#[test]
fn implication_clause() {
    run("implication");
}

#[test]
fn existential_clause() {
    run("existential");
}

#[test]
fn conjunction_is_componentwise() {
    run("conjunction");
}

#[test]
fn bounded_standard_existential_and_its_collapse() {
    run("bounded_standard_existential");
    run("bounded_standard_existential_collapsed");
}

#[test]
fn standard_antecedent_then_universal() {
    run("standard_antecedent");
    run("standard_antecedent_under_universal");
    run("constant_function_instance");
}

#[test]
fn every_case_is_covered() {
    assert_eq!(clause_cases().len(), 11);
}

#[test]
fn normal_forms_are_invariant_up_to_majorants() {
    for (tx, ty, m) in MATRICES {
        check_invariance(tx, ty, m).unwrap_or_else(|e| panic!("{}", e));
    }
}
