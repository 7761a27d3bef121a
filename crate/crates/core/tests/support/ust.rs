//! Displays of the standardness interpretation, shared by test targets.

use nsa_core::formulas::{parse_formula, Formula, Signature};
use nsa_core::kernel::FinType;
use nsa_core::ust::{interpret, simplify_monotone};

pub fn sig() -> Signature {
    Signature::empty()
        .with("x", FinType::Base, true)
        .with("z", FinType::one(), true)
        .with("psi", FinType::curried(&[FinType::Base, FinType::Base], FinType::Base), true)
        .with("P", FinType::one(), true)
        .with("Q", FinType::curried(&[FinType::one(), FinType::one()], FinType::Base), true)
        .with("R2", FinType::curried(&[FinType::two(), FinType::Base], FinType::Base), true)
}

pub fn p(src: &str) -> Formula {
    parse_formula(src, &sig()).unwrap_or_else(|e| panic!("{}: {}", e, src))
}

pub struct Case {
    pub name: &'static str,
    pub input: &'static str,
    pub simplified: bool,
    pub want: String,
}

fn exists_block(matrix: &str) -> String {
    format!(
        "(forall-st F : (-> (-> O O) O) (implies (<=* F F) (exists-st f : (-> O O) (and (<=* f f) \
         (exists-mono f' : (-> O O) (and (<=* f' f) (exists y : O (forall-mono b' : O (implies (<=* b' (F f')) {})))))))))",
        matrix
    )
}

const PSI_XY: &str = "(and (<=* y (f' b')) (=0 (psi x y) 0))";

fn antecedent_block(body: &str) -> String {
    format!(
        "(forall-st g : (-> O O) (implies (<=* g g) (forall-st F : (-> (-> O O) O) (implies (<=* F F) \
         (exists-st b : O (exists-st f : (-> O O) (and (<=* f f) {})))))))",
        body
    )
}

fn antecedent_inner(wrap_forall: bool) -> String {
    let guard = "(forall-mono b'' : O (implies (<=* b'' b) (<=* x (g b''))))";
    let inner = format!(
        "(exists-mono f' : (-> O O) (and (<=* f' f) (exists y : O (forall-mono b' : O (implies (<=* b' (F f')) {})))))",
        PSI_XY
    );
    if wrap_forall {
        format!("(forall x : O (implies {} {}))", guard, inner)
    } else {
        format!("(implies {} {})", guard, inner)
    }
}

pub fn clause_cases() -> Vec<Case> {
    let case = |name, input, simplified, want: String| Case { name, input, simplified, want };
    vec![
        case("internal", "(=0 (P x) 0)", false, "(=0 (P x) 0)".into()),
        case("standardness", "(st z)", false, "(exists-st c : (-> O O) (and (<=* c c) (<=* z c)))".into()),
        case("standardness_of_number", "(st x)", false, "(exists-st c : O (<=* x c))".into()),
        case(
            "implication",
            "(implies (st x) (st z))",
            false,
            "(forall-st f : (-> O O) (implies (<=* f f) (exists-st b : O (exists-st c : (-> O O) (and (<=* c c) \
             (implies (forall-mono b' : O (implies (<=* b' b) (<=* x (f b')))) (<=* z c)))))))"
                .into(),
        ),
        case("existential", "(exists y : O (st y))", false, exists_block("(<=* y (f' b'))")),
        case(
            "conjunction",
            "(and (st x) (st z))",
            false,
            "(exists-st c : O (exists-st c' : (-> O O) (and (<=* c' c') (and (<=* x c) (<=* z c')))))".into(),
        ),
        case("bounded_standard_existential", "(exists y : O (and (st y) (=0 (psi x y) 0)))", false, exists_block(PSI_XY)),
        case(
            "bounded_standard_existential_collapsed",
            "(exists y : O (and (st y) (=0 (psi x y) 0)))",
            true,
            "(exists-st e : O (exists y : O (and (<=* y e) (=0 (psi x y) 0))))".into(),
        ),
        case(
            "standard_antecedent",
            "(implies (st x) (exists y : O (and (st y) (=0 (psi x y) 0))))",
            false,
            antecedent_block(&antecedent_inner(false)),
        ),
        case(
            "standard_antecedent_under_universal",
            "(forall x : O (implies (st x) (exists y : O (and (st y) (=0 (psi x y) 0)))))",
            false,
            antecedent_block(&antecedent_inner(true)),
        ),
        case(
            "constant_function_instance",
            "(forall x : O (implies (st x) (exists y : O (and (st y) (=0 (psi x y) 0)))))",
            true,
            "(forall-st x0 : O (exists-st e : O (forall x : O (implies (<=* x x0) \
             (exists y : O (and (<=* y e) (=0 (psi x y) 0)))))))"
                .into(),
        ),
    ]
}

pub fn check(case: &Case) -> Result<(), String> {
    let r = interpret(&p(case.input), &sig()).map_err(|e| e.to_string())?;
    if !r.lower.is_internal() {
        return Err(format!("{}: lower part not internal", case.name));
    }
    let got = if case.simplified { simplify_monotone(&r).result.render() } else { r.render() };
    if got.alpha_eq(&p(&case.want)) {
        Ok(())
    } else {
        Err(format!("{}:\n got  {}\n want {}", case.name, got, case.want))
    }
}

/// Quantifier types and internal matrices for the normal-form invariance check.
pub const MATRICES: [(&str, &str, &str); 5] = [
    ("O", "O", "(=0 (psi a b) 0)"),
    ("O", "O", "(or (=0 a b) (not (=0 (P b) a)))"),
    ("(-> O O)", "O", "(=0 (a b) (P b))"),
    ("(-> O O)", "(-> O O)", "(=0 (Q a b) 0)"),
    ("O", "(-> (-> O O) O)", "(forall w : O (=0 (R2 b w) a))"),
];

fn guard(name: &str, ty: &str, body: String, conj: bool) -> String {
    match (ty == "O", conj) {
        (true, _) => body,
        (false, true) => format!("(and (<=* {n} {n}) {b})", n = name, b = body),
        (false, false) => format!("(implies (<=* {n} {n}) {b})", n = name, b = body),
    }
}

/// `(forall-st a)(exists-st b) psi` interprets and simplifies to
/// `(forall-st a0)(exists-st e)(forall a <=* a0)(exists b <=* e) psi`.
pub fn check_invariance(tx: &str, ty: &str, matrix: &str) -> Result<(), String> {
    let nf = format!("(forall-st a : {tx} (exists-st b : {ty} {matrix}))");
    let s = simplify_monotone(&interpret(&p(&nf), &sig()).map_err(|e| e.to_string())?);
    if s.shape_mismatch {
        return Err(format!("{}: shape mismatch", nf));
    }
    let body = format!("(forall a : {tx} (implies (<=* a a0) (exists b : {ty} (and (<=* b e) {matrix}))))");
    let want = format!(
        "(forall-st a0 : {tx} {})",
        guard("a0", tx, format!("(exists-st e : {ty} {})", guard("e", ty, body, true)), false)
    );
    let got = s.result.render();
    if got.alpha_eq(&p(&want)) && s.result.lower.is_internal() {
        Ok(())
    } else {
        Err(format!("{}:\n got  {}\n want {}", nf, got, want))
    }
}
