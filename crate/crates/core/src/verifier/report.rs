use std::fmt;

use num_traits::Zero;
use serde_json::{json, Map, Value};

use crate::creal::{show, Q};

/// Outcome of a numeric check of an extracted bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub theorem_id: String,
    /// Render of the kernel term the bound came from.
    pub term: String,
    pub trials: u64,
    pub worst_residual: Q,
    pub threshold: Q,
    pub bounds: Vec<(String, u64)>,
    pub pass: bool,
    pub seed: u64,
    /// The sample that produced the worst residual, when it failed.
    pub witness: Option<String>,
}

impl VerificationReport {
    pub fn new(theorem_id: &str, term: String, threshold: Q, seed: u64) -> VerificationReport {
        VerificationReport {
            theorem_id: theorem_id.to_string(),
            term,
            trials: 0,
            worst_residual: Q::zero(),
            threshold,
            bounds: Vec::new(),
            pass: true,
            seed,
            witness: None,
        }
    }

    pub fn bound(mut self, name: &str, value: u64) -> VerificationReport {
        self.bounds.push((name.to_string(), value));
        self
    }

    /// Records one trial. The witness is only rendered for residuals that
    /// become the worst failing one.
    pub fn record(&mut self, residual: Q, witness: impl FnOnce() -> String) {
        self.trials += 1;
        if residual > self.worst_residual || self.trials == 1 {
            if residual > self.threshold {
                self.witness = Some(witness());
            }
            self.worst_residual = self.worst_residual.clone().max(residual);
        }
        self.pass = self.worst_residual <= self.threshold;
    }

    /// Associative merge of two runs of the same check.
    pub fn merge(mut self, other: VerificationReport) -> VerificationReport {
        self.trials += other.trials;
        if other.worst_residual > self.worst_residual {
            self.worst_residual = other.worst_residual;
            self.witness = other.witness;
        }
        self.pass = self.worst_residual <= self.threshold;
        self
    }

    pub fn to_json(&self) -> Value {
        let bounds: Map<String, Value> = self.bounds.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
        json!({
            "theorem_id": self.theorem_id,
            "term": self.term,
            "trials": self.trials,
            "worst_residual_num": self.worst_residual.numer().to_string(),
            "worst_residual_den": self.worst_residual.denom().to_string(),
            "threshold_num": self.threshold.numer().to_string(),
            "threshold_den": self.threshold.denom().to_string(),
            "bounds": bounds,
            "pass": self.pass,
            "seed": self.seed,
            "witness": self.witness,
        })
    }

    /// One line of JSON with sorted keys.
    pub fn to_json_line(&self) -> String {
        self.to_json().to_string()
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.theorem_id, if self.pass { "PASS" } else { "FAIL" })?;
        writeln!(f, "  term      {}", self.term)?;
        for (k, v) in &self.bounds {
            writeln!(f, "  bound     {} = {}", k, v)?;
        }
        writeln!(f, "  trials    {}", self.trials)?;
        writeln!(
            f,
            "  residual  {} (threshold {})",
            show(&self.worst_residual),
            show(&self.threshold)
        )?;
        writeln!(f, "  seed      {}", self.seed)?;
        if let Some(w) = &self.witness {
            writeln!(f, "  witness   {}", w)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::creal::q;

    #[test]
    fn pass_tracks_threshold_exactly() {
        let mut r = VerificationReport::new("t", "x".into(), q(1, 10), 1);
        r.record(q(1, 10), || "edge".into());
        assert!(r.pass);
        assert!(r.witness.is_none());
        r.record(q(1, 9), || "over".into());
        assert!(!r.pass);
        assert_eq!(r.witness.as_deref(), Some("over"));
        assert_eq!(r.trials, 2);
    }

    #[test]
    fn merge_is_associative() {
        let mk = |v: Q| {
            let mut r = VerificationReport::new("t", "x".into(), q(1, 2), 0);
            r.record(v, || "w".into());
            r
        };
        let (a, b, c) = (mk(q(1, 3)), mk(q(3, 4)), mk(q(1, 5)));
        let left = a.clone().merge(b.clone()).merge(c.clone());
        let right = a.merge(b.merge(c));
        assert_eq!(left, right);
        assert_eq!(left.trials, 3);
        assert!(!left.pass);
    }

    #[test]
    fn json_has_stable_keys() {
        let r = VerificationReport::new("cri", "t".into(), q(1, 10), 7).bound("mesh", 40);
        let v = r.to_json();
        for key in ["theorem_id", "term", "trials", "worst_residual_num", "worst_residual_den", "pass", "seed"] {
            assert!(v.get(key).is_some(), "{}", key);
        }
        assert_eq!(r.to_json_line(), r.clone().to_json_line());
    }
}
