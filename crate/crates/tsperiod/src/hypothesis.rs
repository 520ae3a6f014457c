use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Which side of a lookup table a p-value was clamped to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PBound {
    /// True p is at most the reported value.
    AtMost,
    /// True p is at least the reported value.
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub test_name: String,
    pub statistic: f64,
    pub p_value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_bound: Option<PBound>,
    pub null_hypothesis: String,
    pub auxiliary: BTreeMap<String, f64>,
}

impl TestResult {
    pub fn new(name: &str, statistic: f64, p_value: f64, null: &str) -> Self {
        TestResult {
            test_name: name.to_string(),
            statistic,
            p_value: p_value.clamp(0.0, 1.0),
            p_bound: None,
            null_hypothesis: null.to_string(),
            auxiliary: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.auxiliary.insert(key.to_string(), value);
        self
    }

    pub fn bounded(mut self, bound: Option<PBound>) -> Self {
        self.p_bound = bound;
        self
    }

    /// A p-value clamped at the table's small end rejects at that level too.
    pub fn rejects(&self, alpha: f64) -> bool {
        rejects(self.p_value, self.p_bound, alpha)
    }

    /// Display form, with the conventional floor for tiny p-values.
    pub fn p_display(&self) -> String {
        match self.p_bound {
            Some(PBound::AtMost) => format!("<= {}", self.p_value),
            Some(PBound::AtLeast) => format!(">= {}", self.p_value),
            None if self.p_value < 2.2e-16 => "< 2.2e-16".to_string(),
            None => format!("{:.4e}", self.p_value),
        }
    }
}

pub fn rejects(p_value: f64, bound: Option<PBound>, alpha: f64) -> bool {
    p_value < alpha || (bound == Some(PBound::AtMost) && p_value <= alpha)
}

/// Interpolate a p-value from a critical-value table (`crit` ascending, paired
/// with `probs`), clamping at the table ends and flagging the clamp.
pub fn table_p_value(stat: f64, crit: &[f64], probs: &[f64]) -> (f64, Option<PBound>) {
    let last = crit.len() - 1;
    let (lo_p, hi_p) = (probs[0], probs[last]);
    let bound_at = |p: f64| {
        if p <= lo_p.min(hi_p) {
            Some(PBound::AtMost)
        } else {
            Some(PBound::AtLeast)
        }
    };
    if stat <= crit[0] {
        return (probs[0], bound_at(probs[0]));
    }
    if stat >= crit[last] {
        return (probs[last], bound_at(probs[last]));
    }
    (crate::numeric::interp(stat, crit, probs), None)
}
