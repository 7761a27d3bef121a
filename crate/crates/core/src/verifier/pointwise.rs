//! Pointwise moduli over binary sequences and their uniform versions.

use std::sync::Arc;

use num_traits::Zero;

use super::report::VerificationReport;
use super::VerifyError;
use crate::creal::{int, Modulus};
use crate::kernel::FinType;
use crate::majorizer::{is_monotone, MajVerdict, SamplingPlan, Seq, Value};

/// `g2(x, k)`: a modulus of continuity at the point coded by the binary
/// sequence `x`.
pub type PointwiseModulus = Arc<dyn Fn(&Seq, u64) -> u64 + Send + Sync>;

/// Checks that every section `x |-> g2(x, k)` with `k <= k_max` is monotone on
/// the sampling family, then returns `k |-> g2(1 1 1 ..., k)`.
pub fn uniformize_pointwise_modulus(
    g2: &PointwiseModulus,
    plan: &SamplingPlan,
    k_max: u64,
) -> Result<Modulus, VerifyError> {
    for k in 0..=k_max {
        let section = g2.clone();
        let value = Value::fn2(move |s| section(s, k));
        let outcome = is_monotone(&value, &FinType::two(), plan).map_err(|e| VerifyError::InvalidArgument(e.to_string()))?;
        if let MajVerdict::FailsWithWitness { u, v } = outcome.verdict {
            return Err(VerifyError::ProvisoViolated { k, u, v });
        }
    }
    let top = Seq::constant(1);
    let g2 = g2.clone();
    Ok(Modulus::from_fn("pointwise modulus at 1 1 1 ...", move |k| g2(&top, k)))
}

/// Residual `max(g2(x, k) - u(k), 0)` over the family and `k <= k_max`, with
/// threshold 0: the uniform value dominates every pointwise one.
pub fn check_uniformized(g2: &PointwiseModulus, u: &Modulus, plan: &SamplingPlan, k_max: u64) -> VerificationReport {
    let mut report = VerificationReport::new("pointwise_collapse", "lam k. g2(1 1 1 ..., k)".into(), Zero::zero(), 0)
        .bound("k_max", k_max)
        .bound("family", plan.family.len() as u64);
    for k in 0..=k_max {
        let uk = u.at(k);
        for s in &plan.family {
            let v = g2(s, k);
            let excess = v.saturating_sub(uk);
            report.record(int(excess as i64), || format!("x = {}, k = {}: pointwise {} above uniform {}", s, k, v, uk));
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::majorizer::Sample;

    #[test]
    fn constant_in_x_is_unchanged() {
        let g2: PointwiseModulus = Arc::new(|_, k| 2 * k);
        let u = uniformize_pointwise_modulus(&g2, &SamplingPlan::binary(3), 5).unwrap();
        assert!((0..10).all(|k| u.at(k) == 2 * k));
    }

    #[test]
    fn non_monotone_is_refuted() {
        let g2: PointwiseModulus = Arc::new(|x, k| if x.at(0) == 0 { 10 * k } else { k });
        match uniformize_pointwise_modulus(&g2, &SamplingPlan::binary(2), 3) {
            Err(VerifyError::ProvisoViolated { u: Sample::Seq(u), v: Sample::Seq(v), .. }) => {
                assert!(v.star_leq(&u));
            }
            other => panic!("expected a witness, got {:?}", other.map(|m| m.source)),
        }
    }
}
