use serde::{Deserialize, Serialize};

use super::policy::EnginePolicy;

/// Closed-form knowledge about a term sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AnalyticHint {
    /// `a_n ~ constant * n^(-exponent)`.
    PowerLaw { constant: f64, exponent: f64 },
    EventuallyZero,
    EventuallyConstant { value: f64 },
}

/// Least-squares decay exponent over trailing dyadic blocks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentFit {
    pub p_hat: f64,
    /// 95% confidence half-width, floored by the policy.
    pub ci: f64,
    /// Extrapolation of the local exponent drift across the window.
    pub p_limit: f64,
    pub first_block: u32,
    pub blocks: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DivergenceEvidence {
    PartialSumBlowup { threshold: f64, crossed_at: u64 },
    ExponentFit { p_hat: f64, ci: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum SeriesClass {
    /// The true sum lies in `[sum_estimate, sum_estimate + tail_bound]`
    /// under the fitted (or hinted) tail law.
    Converges { sum_estimate: f64, tail_bound: f64 },
    Diverges { evidence: DivergenceEvidence },
    Inconclusive { p_hat: Option<f64>, ci: Option<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesVerdict {
    #[serde(flatten)]
    pub class: SeriesClass,
    pub n_used: u64,
    pub partial_sum: f64,
    /// The data fit, reported even when a hint decided the class.
    pub fit: Option<ExponentFit>,
    pub hint: Option<AnalyticHint>,
    pub policy: EnginePolicy,
}

impl SeriesVerdict {
    pub fn converges(&self) -> bool {
        matches!(self.class, SeriesClass::Converges { .. })
    }

    pub fn diverges(&self) -> bool {
        matches!(self.class, SeriesClass::Diverges { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum NullClass {
    TendsToZero,
    StaysAbove { level: f64 },
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NullVerdict {
    #[serde(flatten)]
    pub class: NullClass,
    pub n_used: u64,
    /// Largest term from the start of the last complete dyadic block on.
    pub last_block_max: f64,
    /// Decay fit of block maxima; `p_hat` is the decay exponent.
    pub fit: Option<ExponentFit>,
    pub hint: Option<AnalyticHint>,
}

impl NullVerdict {
    pub fn tends_to_zero(&self) -> bool {
        matches!(self.class, NullClass::TendsToZero)
    }
}
