use serde::{Deserialize, Serialize};

use crate::quantile::quantile_sorted;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IntervalMethod {
    #[serde(rename = "LSE-GPQ")]
    LseGpq,
    #[serde(rename = "PB")]
    Bootstrap,
    #[serde(rename = "AI")]
    Wald,
}

impl IntervalMethod {
    pub const ALL: [IntervalMethod; 3] = [Self::LseGpq, Self::Bootstrap, Self::Wald];

    pub fn label(self) -> &'static str {
        match self {
            Self::LseGpq => "LSE-GPQ",
            Self::Bootstrap => "PB",
            Self::Wald => "AI",
        }
    }
}

impl std::fmt::Display for IntervalMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Quantity an interval is for.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Target {
    Alpha,
    Beta,
    Reliability { t: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalEstimate {
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
    pub method: IntervalMethod,
    pub target: Target,
    /// Set when an endpoint was clamped into [0, 1].
    #[serde(default)]
    pub clamped: bool,
}

impl IntervalEstimate {
    pub fn length(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }
}

/// Equal-tailed interval from the empirical quantiles of `values`.
pub(crate) fn equal_tailed(
    values: &[f64],
    level: f64,
    method: IntervalMethod,
    target: Target,
) -> IntervalEstimate {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let tail = 0.5 * (1.0 - level);
    IntervalEstimate {
        lower: quantile_sorted(&sorted, tail),
        upper: quantile_sorted(&sorted, 1.0 - tail),
        level,
        method,
        target,
        clamped: false,
    }
}
