//! Extracted bounds, as native functions and as kernel terms.

use crate::creal::{ModFamily, Modulus};
use crate::kernel::library;
use crate::kernel::{FinType, Term};

/// `2 * g~(n)`
pub fn cri_mesh_bound(g: &Modulus, n: u64) -> u64 {
    g.closure_at(n).saturating_mul(2)
}

/// `max(g~(2k), l)`
pub fn ftc_bound(g: &Modulus, k: u64, l: u64) -> u64 {
    g.closure_at(2 * k).max(l)
}

/// `k |-> max_{i <= h~(3k)} g~_i(3k)`
pub fn ulc_modulus(family: &ModFamily, h: &Modulus) -> Modulus {
    let (family, h) = (family.clone(), h.clone());
    let source = format!("limit modulus of {} under {}", family.source, h.source);
    Modulus::from_fn(source, move |k| {
        let k3 = k.saturating_mul(3);
        let top = h.closure_at(k3);
        (0..=top)
            .map(|i| (0..=k3).map(|j| family.at(i, j)).max().unwrap_or(0))
            .max()
            .unwrap_or(0)
    })
}

/// `g~(2k)`, at least 1.
pub fn wei_grid(g: &Modulus, k: u64) -> u64 {
    g.closure_at(2 * k).max(1)
}

/// `max(2 g~(k), 1)`
pub fn ivt_grid(g: &Modulus, k: u64) -> u64 {
    g.closure_at(k).saturating_mul(2).max(1)
}

/// Kernel terms for the bounds above, applied to the named parameters.
pub mod terms {
    use super::*;

    fn o() -> FinType {
        FinType::Base
    }

    pub fn cri(g: Term, n: Term) -> Term {
        Term::apps(library::riemann_mesh_bound(), [g, n])
    }

    pub fn ftc(g: Term, k: Term, l: Term) -> Term {
        Term::apps(library::difference_quotient_bound(), [g, k, l])
    }

    pub fn ulc(family: Term, h: Term, k: Term) -> Term {
        Term::apps(library::limit_modulus(), [family, h, k])
    }

    pub fn wei(g: Term, k: Term) -> Term {
        Term::max(Term::apps(library::maximum_grid(), [g, k]), Term::Num(1))
    }

    pub fn ivt(g: Term, k: Term) -> Term {
        Term::max(Term::apps(library::root_grid(), [g, k]), Term::Num(1))
    }

    /// `n |-> k |-> a * k + b`, constant in `n`.
    pub fn constant_family(a: u64, b: u64) -> Term {
        Term::lam("n", o(), library::affine(a, b))
    }

    /// Renders a bound with symbolic parameters.
    pub fn render(t: Term) -> String {
        t.to_string()
    }

    pub fn symbolic(name: &str) -> Term {
        Term::var(name)
    }
}

#[cfg(test)]
mod tests {
    use super::terms::*;
    use super::*;
    use crate::kernel::evaluate_nat;

    #[test]
    fn kernel_terms_agree_with_native_bounds() {
        for (a, b) in [(0, 1), (1, 0), (2, 0), (2, 1), (3, 2)] {
            let g = Modulus::affine(a, b);
            let gt = || library::affine(a, b);
            for n in 0..6 {
                let num = Term::Num;
                assert_eq!(evaluate_nat(&cri(gt(), num(n))).unwrap(), cri_mesh_bound(&g, n));
                assert_eq!(evaluate_nat(&wei(gt(), num(n))).unwrap(), wei_grid(&g, n));
                assert_eq!(evaluate_nat(&ivt(gt(), num(n))).unwrap(), ivt_grid(&g, n));
                for l in [0, 2, 9] {
                    assert_eq!(evaluate_nat(&ftc(gt(), num(n), num(l))).unwrap(), ftc_bound(&g, n, l));
                }
            }
        }
    }

    #[test]
    fn limit_modulus_term_agrees() {
        for (a, b, c) in [(2, 0, 1), (1, 1, 2), (3, 0, 0)] {
            let family = ModFamily::parse(&format!("{}k + {}", a, b)).unwrap();
            let h = Modulus::affine(c, 0);
            let native = ulc_modulus(&family, &h);
            for k in 0..4 {
                let t = ulc(constant_family(a, b), library::affine(c, 0), Term::Num(k));
                assert_eq!(evaluate_nat(&t).unwrap(), native.at(k), "k = {}", k);
            }
        }
    }

    #[test]
    fn bounds_are_monotone_in_precision() {
        let zigzag = Modulus::from_fn("zigzag", |k| if k % 2 == 0 { 3 * k } else { 1 });
        for n in 0..30 {
            assert!(cri_mesh_bound(&zigzag, n) <= cri_mesh_bound(&zigzag, n + 1));
            assert!(ftc_bound(&zigzag, n, 4) <= ftc_bound(&zigzag, n + 1, 4));
            assert!(wei_grid(&zigzag, n) <= wei_grid(&zigzag, n + 1));
            assert!(ivt_grid(&zigzag, n) <= ivt_grid(&zigzag, n + 1));
        }
        let family = ModFamily::parse("n + k").unwrap();
        let u = ulc_modulus(&family, &zigzag);
        assert!(u.is_monotone_upto(10));
    }

    #[test]
    fn mesh_bound_examples() {
        assert_eq!(cri_mesh_bound(&Modulus::parse("2k").unwrap(), 10), 40);
        assert_eq!(cri_mesh_bound(&Modulus::parse("1").unwrap(), 1), 2);
    }
}
