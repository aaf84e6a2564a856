//! Indexed sequences `n -> X_n` together with their limit.

use crate::error::Result;
use crate::measure::RandomVariable;
use crate::modes::{Certificate, ModeParams, ModeTag, TermKind};
use crate::series::AnalyticHint;

pub trait SequenceFamily: Send + Sync {
    fn label(&self) -> String;

    /// `X_n` for `n >= 1`.
    fn member(&self, n: u64) -> Result<RandomVariable>;

    fn limit(&self) -> &RandomVariable;

    /// Closed-form behaviour of a term sequence, when known.
    fn term_hint(&self, _kind: &TermKind) -> Option<AnalyticHint> {
        None
    }

    /// Analytic bound covering every value of a mode's universally
    /// quantified parameter, when known.
    fn certificate(&self, _mode: ModeTag, _params: &ModeParams) -> Option<Certificate> {
        None
    }

    /// `||X_n - X||_inf` for families of the form `X_n = X + a_n`.
    fn shift(&self, _n: u64) -> Option<f64> {
        None
    }
}
