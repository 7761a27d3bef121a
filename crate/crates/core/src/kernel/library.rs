//! Closed terms used as extracted bounds.

use super::term::Term;
use super::ty::FinType;

fn o() -> FinType {
    FinType::Base
}

/// `n |-> c * n`
pub fn scale(c: u64) -> Term {
    let mut body = Term::var("r");
    for _ in 0..c {
        body = Term::succ(body);
    }
    Term::lam(
        "n",
        o(),
        Term::rec(
            o(),
            Term::Num(0),
            Term::lam("i", o(), Term::lam("r", o(), body)),
            Term::var("n"),
        ),
    )
}

/// `g |-> k |-> max_{i <= k} g(i)`
pub fn closure() -> Term {
    let g = || Term::var("g");
    let step = Term::lam(
        "i",
        o(),
        Term::lam(
            "r",
            o(),
            Term::max(Term::var("r"), Term::app(g(), Term::succ(Term::var("i")))),
        ),
    );
    Term::lam(
        "g",
        FinType::one(),
        Term::lam(
            "k",
            o(),
            Term::rec(o(), Term::app(g(), Term::Num(0)), step, Term::var("k")),
        ),
    )
}

/// `G |-> n |-> k |-> max_{i <= n, j <= k} G(i)(j)`
pub fn closure2() -> Term {
    let inner = |i: Term| Term::apps(closure(), [Term::app(Term::var("G"), i), Term::var("k")]);
    let step = Term::lam(
        "i",
        o(),
        Term::lam("r", o(), Term::max(Term::var("r"), inner(Term::succ(Term::var("i"))))),
    );
    Term::lam(
        "G",
        FinType::arrow(o(), FinType::one()),
        Term::lam(
            "n",
            o(),
            Term::lam("k", o(), Term::rec(o(), inner(Term::Num(0)), step, Term::var("n"))),
        ),
    )
}

/// Mesh bound for Riemann sums: `g, n |-> 2 * closure(g)(n)`.
pub fn riemann_mesh_bound() -> Term {
    Term::lam(
        "g",
        FinType::one(),
        Term::lam(
            "n",
            o(),
            Term::app(scale(2), Term::apps(closure(), [Term::var("g"), Term::var("n")])),
        ),
    )
}

/// Step bound for difference quotients: `g, k, l |-> max(closure(g)(2k), l)`.
pub fn difference_quotient_bound() -> Term {
    Term::lam(
        "g",
        FinType::one(),
        Term::lam(
            "k",
            o(),
            Term::lam(
                "l",
                o(),
                Term::max(
                    Term::apps(closure(), [Term::var("g"), Term::app(scale(2), Term::var("k"))]),
                    Term::var("l"),
                ),
            ),
        ),
    )
}

/// Modulus of the uniform limit: `G, h, k |-> closure2(G)(closure(h)(3k))(3k)`.
pub fn limit_modulus() -> Term {
    let three_k = || Term::app(scale(3), Term::var("k"));
    Term::lam(
        "G",
        FinType::arrow(o(), FinType::one()),
        Term::lam(
            "h",
            FinType::one(),
            Term::lam(
                "k",
                o(),
                Term::apps(
                    closure2(),
                    [
                        Term::var("G"),
                        Term::apps(closure(), [Term::var("h"), three_k()]),
                        three_k(),
                    ],
                ),
            ),
        ),
    )
}

/// Grid size for approximate maxima: `g, k |-> closure(g)(2k)`.
pub fn maximum_grid() -> Term {
    Term::lam(
        "g",
        FinType::one(),
        Term::lam(
            "k",
            o(),
            Term::apps(closure(), [Term::var("g"), Term::app(scale(2), Term::var("k"))]),
        ),
    )
}

/// Grid size for approximate roots: `g, k |-> 2 * closure(g)(k)`.
pub fn root_grid() -> Term {
    Term::lam(
        "g",
        FinType::one(),
        Term::lam(
            "k",
            o(),
            Term::app(scale(2), Term::apps(closure(), [Term::var("g"), Term::var("k")])),
        ),
    )
}

/// `k |-> a * k + b` as a term.
pub fn affine(a: u64, b: u64) -> Term {
    let mut body = Term::app(scale(a), Term::var("k"));
    for _ in 0..b {
        body = Term::succ(body);
    }
    Term::lam("k", o(), body)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{evaluate_nat, type_check};
    use std::collections::BTreeMap;

    #[test]
    fn library_terms_are_closed_and_typed() {
        let env = BTreeMap::new();
        for t in [
            scale(3),
            closure(),
            closure2(),
            riemann_mesh_bound(),
            difference_quotient_bound(),
            limit_modulus(),
            maximum_grid(),
            root_grid(),
            affine(2, 1),
        ] {
            assert!(t.free_vars().is_empty(), "{}", t);
            type_check(&t, &env).unwrap();
        }
    }

    #[test]
    fn closure_takes_running_max() {
        // g = 5, 0, 7, 1
        let g = Term::lam(
            "n",
            FinType::Base,
            Term::rec(
                FinType::Base,
                Term::Num(5),
                Term::lam("i", FinType::Base, Term::lam("r", FinType::Base, Term::Num(0))),
                Term::var("n"),
            ),
        );
        let at = |k| evaluate_nat(&Term::apps(closure(), [g.clone(), Term::Num(k)])).unwrap();
        assert_eq!(at(0), 5);
        assert_eq!(at(3), 5);
    }

    #[test]
    fn mesh_bound_of_doubling() {
        let t = Term::apps(riemann_mesh_bound(), [scale(2), Term::Num(10)]);
        assert_eq!(evaluate_nat(&t).unwrap(), 40);
    }
}
