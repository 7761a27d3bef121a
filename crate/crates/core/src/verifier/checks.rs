//! Numeric checks of extracted bounds with exact rational residuals.

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::bounds::{self, terms};
use super::report::VerificationReport;
use super::VerifyError;
use crate::creal::{
    bits_above, int, integral, integral_between, q, riemann_sum, show, CReal, Expr, ModFamily, Modulus, Partition,
    RealFn, Tag, Q,
};
use crate::kernel::Term;

pub const DEFAULT_SEED: u64 = 20_161_019;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn sym(name: &str) -> Term {
    terms::symbolic(name)
}

fn inv(n: u64) -> Q {
    q(1, n.max(1) as i64)
}

/// A random rational in `[lo, hi]` with denominator `2^20`.
fn sample_in(rng: &mut ChaCha8Rng, lo: &Q, hi: &Q) -> Q {
    let steps = 1i64 << 20;
    lo + (hi - lo) * q(rng.gen_range(0..=steps), steps)
}

/// `sup |f|` on `[0, 1]` bounded by `|f(0)| + g~(1) + 1`.
fn sup_bound(f: &RealFn, g: &Modulus) -> Q {
    f.eval(&Q::zero()).abs() + int(g.closure_at(1) as i64) + Q::one()
}

/// Samples pairs of partitions finer than `1 / cri_mesh_bound(g, n)` and
/// checks `|S_pi(f) - S_pi'(f)| <= 1/n`. The first pair is the left and right
/// tagged uniform partitions at the coarsest admissible size.
pub fn check_cri(f: &RealFn, g: &Modulus, n: u64, trials: u64, seed: u64) -> VerificationReport {
    let t = bounds::cri_mesh_bound(g, n);
    let term = terms::render(terms::cri(sym("g"), sym("n")));
    let mut report = VerificationReport::new("cri", term, inv(n), seed).bound("n", n).bound("mesh_bound", t);
    let mut rng = rng(seed);
    let coarsest = t.saturating_add(1).min(1 << 16) as usize;
    let mut pairs = vec![(
        Partition::uniform(coarsest, Tag::Left),
        Partition::uniform(coarsest, Tag::Right),
    )];
    while (pairs.len() as u64) < trials {
        let mut draw = || {
            let d = rng.gen_range(t + 1..=2 * t + 1).min(1 << 16);
            Partition::random(&mut rng, &inv(d))
        };
        let a = draw();
        let b = draw();
        pairs.push((a, b));
    }
    for (a, b) in pairs.into_iter().take(trials.max(1) as usize) {
        let (sa, sb) = (riemann_sum(f, &a), riemann_sum(f, &b));
        let residual = (&sa - &sb).abs();
        report.record(residual, || {
            format!(
                "partitions with {} and {} intervals (mesh {} and {}) give sums {} and {}",
                a.intervals(),
                b.intervals(),
                show(&a.mesh()),
                show(&b.mesh()),
                show(&sa),
                show(&sb)
            )
        });
    }
    report
}

/// Precision `p` at which the discretized difference quotient of the
/// integral stays within `1/k` of `f(x)` for step `1/N`.
pub fn ftc_precision(f: &RealFn, g: &Modulus, k: u64, big_n: u64) -> u32 {
    let need = int(g.closure_at(4 * k) as i64 + 1).max(int(big_n as i64) * (int(3) + int(4 * k as i64) * sup_bound(f, g)));
    bits_above(&need)
}

/// `N * ([I(f, 0, x + 1/N)](p) - [I(f, 0, x)](p))`
pub fn ftc_difference(f: &RealFn, x: &Q, big_n: u64, p: u32) -> Q {
    let h = inv(big_n);
    integral_between(f, x, &(x + &h), p) * int(big_n as i64)
}

/// Samples `x` in `[1/l, 1 - 1/l]` and checks
/// `|Delta_{1/N}(I(f, 0, x)) - f(x)| <= 1/k` for `N = ftc_bound(g, k, l)`.
pub fn check_ftc(f: &RealFn, g: &Modulus, k: u64, l: u64, trials: u64, seed: u64) -> Result<VerificationReport, VerifyError> {
    if l < 2 {
        return Err(VerifyError::InvalidArgument(format!("interval parameter l = {} must be at least 2", l)));
    }
    let big_n = bounds::ftc_bound(g, k, l);
    let p = ftc_precision(f, g, k, big_n);
    let term = terms::render(terms::ftc(sym("g"), sym("k"), sym("l")));
    let mut report = VerificationReport::new("ftc", term, inv(k), seed)
        .bound("k", k)
        .bound("l", l)
        .bound("step", big_n)
        .bound("precision", p as u64);
    let mut rng = rng(seed);
    let (lo, hi) = (inv(l), Q::one() - inv(l));
    for _ in 0..trials {
        let x = sample_in(&mut rng, &lo, &hi);
        let d = ftc_difference(f, &x, big_n, p);
        let fx = f.eval(&x);
        report.record((&d - &fx).abs(), || format!("x = {}: quotient {} against f(x) = {}", show(&x), show(&d), show(&fx)));
    }
    Ok(report)
}

/// `j` with `2^j >= g~(2k)`, so the step `2^-j` is at most `1/g~(2k)`.
pub fn ftc_second_bound(g: &Modulus, k: u64) -> u32 {
    bits_above(&int(g.closure_at(2 * k).max(1) as i64))
}

/// `[I(Delta_e f, 1)](p)` for `e = 2^-j`.
pub fn integral_of_quotient(f: &RealFn, j: u32, p: u32) -> Q {
    let eps = crate::creal::dyadic(j);
    let shifted = f.expr.compose(&Expr::Add(Box::new(Expr::X), Box::new(Expr::Const(eps.clone()))));
    let quotient = Expr::Div(Box::new(Expr::Sub(Box::new(shifted), Box::new(f.expr.clone()))), eps);
    let dq = RealFn::from_expr(&format!("difference quotient of {}", f.source), quotient, Q::zero(), Q::one());
    integral(&dq, &CReal::from_int(1), p)
}

/// Checks `|I(Delta_e f, 1) - (f(1) - f(0))| <= 1/k` for `e = 2^-j` and
/// precisions `p = j, ..., j + trials - 1`. The modulus must hold on `[0, 2]`.
pub fn check_ftc_second(f: &RealFn, g: &Modulus, k: u64, trials: u64) -> VerificationReport {
    let j = ftc_second_bound(g, k);
    let term = terms::render(terms::ftc(sym("g"), sym("k"), Term::Num(0)));
    let mut report = VerificationReport::new("ftc_second_part", term, inv(k), 0)
        .bound("k", k)
        .bound("step_exponent", j as u64);
    let want = f.eval(&Q::one()) - f.eval(&Q::zero());
    for p in j..j + trials.max(1) as u32 {
        let got = integral_of_quotient(f, j, p);
        report.record((&got - &want).abs(), || format!("precision {}: integral {} against {}", p, show(&got), show(&want)));
    }
    report
}

/// Samples pairs with `|x - y| < 1/u(k)` in `[0, 1]` and checks
/// `|f(x) - f(y)| <= 1/k`.
pub fn check_uniform_modulus(
    theorem_id: &str,
    term: String,
    f: &RealFn,
    u: &Modulus,
    k: u64,
    trials: u64,
    seed: u64,
) -> VerificationReport {
    let m = u.at(k).max(1);
    let mut report = VerificationReport::new(theorem_id, term, inv(k), seed).bound("k", k).bound("modulus", m);
    let mut rng = rng(seed);
    for _ in 0..trials {
        let x = sample_in(&mut rng, &Q::zero(), &Q::one());
        let d = q(rng.gen_range(0..64), 64) * inv(m);
        let y = if &x + &d <= Q::one() { &x + &d } else { (&x - &d).max(Q::zero()) };
        let (fx, fy) = (f.eval(&x), f.eval(&y));
        report.record((&fx - &fy).abs(), || format!("x = {}, y = {}: values {} and {}", show(&x), show(&y), show(&fx), show(&fy)));
    }
    report
}

/// `ulc_modulus(g_n, h)` checked as a modulus for the limit function.
pub fn check_ulc(limit: &RealFn, family: &ModFamily, h: &Modulus, k: u64, trials: u64, seed: u64) -> VerificationReport {
    let u = bounds::ulc_modulus(family, h);
    let term = terms::render(terms::ulc(sym("G"), sym("h"), sym("k")));
    check_uniform_modulus("ulc", term, limit, &u, k, trials, seed)
}

/// Checks `|f_M(x) - f(x)| <= 1/k` for sampled `M >= h(k)` and `x`.
pub fn check_uniform_convergence(
    family: &str,
    limit: &RealFn,
    h: &Modulus,
    k: u64,
    trials: u64,
    seed: u64,
) -> Result<VerificationReport, VerifyError> {
    let start = h.at(k);
    let mut report = VerificationReport::new("uniform_convergence", format!("h = {}", h.source), inv(k), seed)
        .bound("k", k)
        .bound("index", start);
    let mut rng = rng(seed);
    for i in 0..trials {
        let m = start + if i == 0 { 0 } else { rng.gen_range(0..=32) };
        let fm = RealFn::member(family, m)?;
        let x = if i == 0 { Q::one() } else { sample_in(&mut rng, &Q::zero(), &Q::one()) };
        let (a, b) = (fm.eval(&x), limit.eval(&x));
        report.record((&a - &b).abs(), || format!("M = {}, x = {}: {} against {}", m, show(&x), show(&a), show(&b)));
    }
    Ok(report)
}

/// First grid point `i/m` maximizing `f`.
pub fn grid_argmax(f: &RealFn, m: u64) -> Q {
    let m = m.max(1);
    let mut best = (Q::zero(), f.eval(&Q::zero()));
    for i in 1..=m {
        let x = q(i as i64, m as i64);
        let v = f.eval(&x);
        if v > best.1 {
            best = (x, v);
        }
    }
    best.0
}

/// A point `q` with `f(y) <= f(q) + 1/k` for all `y` in `[0, 1]`.
pub fn wei_approx(f: &RealFn, g: &Modulus, k: u64) -> Q {
    grid_argmax(f, bounds::wei_grid(g, k))
}

/// Dense sampling of `f(y) - f(q)` against `1/k`.
pub fn check_wei(f: &RealFn, g: &Modulus, k: u64, trials: u64, seed: u64) -> VerificationReport {
    let m = bounds::wei_grid(g, k);
    let qk = grid_argmax(f, m);
    let fq = f.eval(&qk);
    let term = terms::render(terms::wei(sym("g"), sym("k")));
    let mut report = VerificationReport::new("wei", term, inv(k), seed).bound("k", k).bound("grid", m);
    let mut rng = rng(seed);
    let mut ys = vec![Q::zero(), Q::one()];
    ys.extend((0..trials.saturating_sub(2)).map(|_| sample_in(&mut rng, &Q::zero(), &Q::one())));
    for y in ys.into_iter().take(trials.max(1) as usize) {
        let fy = f.eval(&y);
        let residual = (&fy - &fq).max(Q::zero());
        report.record(residual, || format!("y = {} gives {} above f({}) = {}", show(&y), show(&fy), show(&qk), show(&fq)));
    }
    report
}

/// Approximate maxima for each precision in `ks`, packaged as a real whose
/// `n`-th approximation is the approximant for `ks[min(n, len - 1)]`.
pub fn wei_unique_limit(f: &RealFn, g: &Modulus, ks: &[u64]) -> (Vec<Q>, CReal) {
    let qs: Vec<Q> = ks.iter().map(|&k| wei_approx(f, g, k)).collect();
    let table = qs.clone();
    let real = CReal::from_raw(move |n| {
        if table.is_empty() {
            Q::zero()
        } else {
            table[(n as usize).min(table.len() - 1)].clone()
        }
    });
    (qs, real)
}

/// Bisection over the grid `{i/m}` with `m = max(2 g~(k), 1)` keeping
/// `f(lo) <= 0 <= f(hi)`.
pub fn ivt_approx(f: &RealFn, g: &Modulus, k: u64) -> Result<Q, VerifyError> {
    bisect(f, bounds::ivt_grid(g, k))
}

fn bisect(f: &RealFn, m: u64) -> Result<Q, VerifyError> {
    let at = |i: u64| f.eval(&q(i as i64, m as i64));
    let (f0, f1) = (at(0), at(m));
    if f0.is_positive() || f1.is_negative() {
        return Err(VerifyError::PreconditionViolated(format!(
            "need f(0) <= 0 <= f(1), got f(0) = {} and f(1) = {}",
            show(&f0),
            show(&f1)
        )));
    }
    let (mut lo, mut hi) = (0u64, m);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if at(mid).is_positive() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let (a, b) = (at(lo), at(hi));
    Ok(if a.abs() <= b.abs() { q(lo as i64, m as i64) } else { q(hi as i64, m as i64) })
}

/// The same search on `x - f(x)` with grid `2 max(g~(2k), 2k)`, for `f`
/// mapping `[0, 1]` into itself.
pub fn fixed_point_approx(f: &RealFn, g: &Modulus, k: u64) -> Result<Q, VerifyError> {
    let h = RealFn::from_expr(
        &format!("x - ({})", f.source),
        Expr::Sub(Box::new(Expr::X), Box::new(f.expr.clone())),
        Q::zero(),
        Q::one(),
    );
    bisect(&h, fixed_point_grid(g, k))
}

fn fixed_point_grid(g: &Modulus, k: u64) -> u64 {
    g.closure_at(2 * k).max(2 * k).max(1).saturating_mul(2)
}

pub fn check_ivt(f: &RealFn, g: &Modulus, k: u64) -> Result<VerificationReport, VerifyError> {
    let root = ivt_approx(f, g, k)?;
    let term = terms::render(terms::ivt(sym("g"), sym("k")));
    let mut report = VerificationReport::new("ivt", term, inv(k), 0)
        .bound("k", k)
        .bound("grid", bounds::ivt_grid(g, k));
    let v = f.eval(&root);
    report.record(v.abs(), || format!("q = {} gives f(q) = {}", show(&root), show(&v)));
    Ok(report)
}

pub fn check_fixed_point(f: &RealFn, g: &Modulus, k: u64) -> Result<VerificationReport, VerifyError> {
    let p = fixed_point_approx(f, g, k)?;
    let m = fixed_point_grid(g, k);
    let term = format!("2 max({}, 2k)", terms::render(Term::apps(crate::kernel::library::maximum_grid(), [sym("g"), sym("k")])));
    let mut report = VerificationReport::new("fixed_point", term, inv(k), 0).bound("k", k).bound("grid", m);
    let v = f.eval(&p);
    report.record((&v - &p).abs(), || format!("q = {} gives f(q) = {}", show(&p), show(&v)));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(src: &str) -> RealFn {
        RealFn::parse(src).unwrap()
    }

    fn g(src: &str) -> Modulus {
        Modulus::parse(src).unwrap()
    }

    #[test]
    fn constant_functions_have_zero_residual() {
        let r = check_cri(&f("3/7"), &g("1"), 5, 20, DEFAULT_SEED);
        assert!(r.pass);
        assert_eq!(r.worst_residual, Q::zero());
        assert_eq!(check_wei(&f("2"), &g("1"), 5, 20, 1).worst_residual, Q::zero());
    }

    #[test]
    fn wei_on_increasing_function_picks_right_end() {
        let k = 10;
        let qk = wei_approx(&f("x"), &g("k"), k);
        assert_eq!(qk, Q::one());
    }

    #[test]
    fn ivt_exact_root_on_grid() {
        assert_eq!(ivt_approx(&f("2x - 1"), &g("2k"), 10).unwrap(), q(1, 2));
        assert!(matches!(
            ivt_approx(&f("x + 1"), &g("k"), 10),
            Err(VerifyError::PreconditionViolated(_))
        ));
    }

    #[test]
    fn coarse_ftc_passes() {
        let r = check_ftc(&f("x"), &g("k"), 1, 2, 10, DEFAULT_SEED).unwrap();
        assert!(r.pass, "{}", r);
        assert!(check_ftc(&f("x"), &g("k"), 1, 1, 10, 0).is_err());
    }

    #[test]
    fn ftc_second_part() {
        let r = check_ftc_second(&f("x*x"), &g("4k"), 8, 3);
        assert!(r.pass, "{}", r);
        let r = check_ftc_second(&f("1 - x/2"), &g("k"), 3, 2);
        assert!(r.pass);
        assert_eq!(r.worst_residual, crate::creal::dyadic(4));
    }
}
