//! Structured records of bound evaluations.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Slack allowed when comparing an exact left-hand side with its bound.
pub const EXACT_SLACK: f64 = 1e-12;

/// One inequality `lhs <= bound`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    /// Name of the distance or quantity being bounded, e.g. `d_TV`.
    pub quantity: String,
    pub bound: f64,
    /// Exact or estimated left-hand side, if available.
    pub lhs: Option<f64>,
    /// Monte Carlo allowance added to the bound for the verdict (3 standard errors).
    pub mc_allowance: f64,
    pub satisfied: Option<bool>,
}

impl BoundCheck {
    pub fn new(quantity: impl Into<String>, bound: f64) -> Self {
        Self { quantity: quantity.into(), bound, lhs: None, mc_allowance: 0.0, satisfied: None }
    }

    /// Compares an exact left-hand side.
    pub fn with_exact(mut self, lhs: f64) -> Self {
        self.lhs = Some(lhs);
        self.satisfied = Some(lhs <= self.bound + EXACT_SLACK);
        self
    }

    /// Compares an estimated left-hand side, adding `allowance` of noise to
    /// any allowance already attached to the bound.
    pub fn with_estimate(mut self, lhs: f64, allowance: f64) -> Self {
        self.lhs = Some(lhs);
        self.mc_allowance += allowance;
        self.satisfied = Some(lhs <= self.bound + self.mc_allowance + EXACT_SLACK);
        self
    }

    pub fn passed(&self) -> bool {
        self.satisfied != Some(false)
    }
}

/// Terms, bounds and verdicts of one theorem evaluation.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub theorem: String,
    pub terms: BTreeMap<String, f64>,
    pub checks: Vec<BoundCheck>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl BoundReport {
    pub fn new(theorem: impl Into<String>) -> Self {
        Self { theorem: theorem.into(), ..Self::default() }
    }

    pub fn term(&mut self, name: impl Into<String>, value: f64) -> &mut Self {
        self.terms.insert(name.into(), value);
        self
    }

    pub fn push(&mut self, check: BoundCheck) -> &mut Self {
        self.checks.push(check);
        self
    }

    pub fn check(&self, quantity: &str) -> Option<&BoundCheck> {
        self.checks.iter().find(|c| c.quantity == quantity)
    }

    /// Bound of the named check.
    pub fn bound(&self, quantity: &str) -> Option<f64> {
        self.check(quantity).map(|c| c.bound)
    }

    /// True unless some check is known to fail.
    pub fn all_satisfied(&self) -> bool {
        self.checks.iter().all(BoundCheck::passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdicts() {
        assert_eq!(BoundCheck::new("d_TV", 0.1).with_exact(0.1).satisfied, Some(true));
        assert_eq!(BoundCheck::new("d_TV", 0.1).with_exact(0.11).satisfied, Some(false));
        assert_eq!(BoundCheck::new("d_TV", 0.1).with_estimate(0.11, 0.02).satisfied, Some(true));
        assert!(BoundCheck::new("d_TV", 0.1).passed());
    }

    #[test]
    fn json_round_trip() {
        let mut r = BoundReport::new("demo");
        r.term("E|Z|", 0.3).push(BoundCheck::new("d_TV", 0.09).with_exact(0.07));
        let back: BoundReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert!(r.all_satisfied());
    }
}
