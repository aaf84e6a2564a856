use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::QuadConfig;

/// Every tunable of the series engine and the quadrature beneath it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnginePolicy {
    pub n_max: u64,
    /// Number of trailing complete dyadic blocks used for the exponent fit.
    pub dyadic_window: u32,
    pub exponent_margin: f64,
    pub tail_tolerance: f64,
    pub blowup_threshold: f64,
    pub null_tolerance: f64,
    /// Lower limit on the exponent confidence half-width; guards against
    /// zero-residual fits on exact power laws.
    pub ci_floor: f64,
    pub quadrature: QuadConfig,
}

impl Default for EnginePolicy {
    fn default() -> Self {
        Self {
            n_max: 1_000_000,
            dyadic_window: 8,
            exponent_margin: 0.05,
            tail_tolerance: 1e-6,
            blowup_threshold: 1e6,
            null_tolerance: 1e-8,
            ci_floor: 1e-3,
            quadrature: QuadConfig::default(),
        }
    }
}

impl EnginePolicy {
    pub fn with_n_max(mut self, n_max: u64) -> Self {
        self.n_max = n_max;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("exponent_margin", self.exponent_margin),
            ("tail_tolerance", self.tail_tolerance),
            ("blowup_threshold", self.blowup_threshold),
            ("null_tolerance", self.null_tolerance),
            ("ci_floor", self.ci_floor),
            ("quadrature.abs_tol", self.quadrature.abs_tol),
            ("quadrature.oscillation_threshold", self.quadrature.oscillation_threshold),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Parameter(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if self.dyadic_window < 4 || self.dyadic_window > 40 {
            return Err(Error::Parameter(format!(
                "dyadic_window must lie in [4, 40], got {}",
                self.dyadic_window
            )));
        }
        if self.n_max < 1u64 << self.dyadic_window {
            return Err(Error::Parameter(format!(
                "n_max = {} is below 2^dyadic_window = {}",
                self.n_max,
                1u64 << self.dyadic_window
            )));
        }
        if self.quadrature.max_evals < 30 {
            return Err(Error::Parameter("quadrature.max_evals must be at least 30".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        EnginePolicy::default().validate().unwrap();
    }

    #[test]
    fn n_max_must_cover_window() {
        let p = EnginePolicy::default().with_n_max(255);
        assert!(matches!(p.validate(), Err(Error::Parameter(_))));
        EnginePolicy::default().with_n_max(256).validate().unwrap();
    }

    #[test]
    fn non_positive_tolerance_is_rejected() {
        let p = EnginePolicy {
            tail_tolerance: 0.0,
            ..EnginePolicy::default()
        };
        assert!(p.validate().is_err());
    }
}
