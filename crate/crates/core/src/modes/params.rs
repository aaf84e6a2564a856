use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::SequenceFamily;
use crate::measure::OmegaPoint;
use crate::testfn::TestFunction;

/// Probe values for the mode checkers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeParams {
    pub epsilon: Vec<f64>,
    pub p: f64,
    pub alpha: f64,
    pub x_points: Vec<f64>,
    pub t_points: Vec<f64>,
    pub test_functions: Vec<TestFunction>,
    pub omega_points: Vec<OmegaPoint>,
}

pub const DEFAULT_EPSILONS: [f64; 3] = [0.5, 0.1, 0.01];
pub const DEFAULT_T_POINTS: [f64; 4] = [0.5, 1.0, 2.0, 5.0];
pub const DEFAULT_OMEGA_COUNT: usize = 17;
pub const DEFAULT_X_COUNT: usize = 9;

impl ModeParams {
    /// Default probes adapted to the family's limit law.
    pub fn defaults_for(family: &dyn SequenceFamily) -> Self {
        let limit = family.limit();
        let cdf = limit.cdf();
        let (mut lo, mut hi) = limit.essential_range();
        if lo == hi {
            lo -= 1.0;
            hi += 1.0;
        }
        let x_points = (0..DEFAULT_X_COUNT)
            .map(|i| lo + (hi - lo) * i as f64 / (DEFAULT_X_COUNT - 1) as f64)
            .filter(|&x| cdf.is_continuity_point(x))
            .collect();
        let (rlo, rhi) = limit.essential_range();
        let test_functions = vec![
            TestFunction::Sine,
            TestFunction::ClampedIdentity {
                bound: limit.sup_norm(),
                eps: 0.5,
            },
            TestFunction::ClampedAffine {
                slope: 2.0,
                bound: 1.0,
                center: 0.5 * (rlo + rhi),
            },
        ];
        Self {
            epsilon: DEFAULT_EPSILONS.to_vec(),
            p: 1.0,
            alpha: 1.0,
            x_points,
            t_points: DEFAULT_T_POINTS.to_vec(),
            test_functions,
            omega_points: OmegaPoint::van_der_corput(DEFAULT_OMEGA_COUNT),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for &e in &self.epsilon {
            if !(e > 0.0 && e.is_finite()) {
                return Err(Error::Parameter(format!("epsilon must be positive, got {e}")));
            }
        }
        if !(self.p > 0.0 && self.p.is_finite()) {
            return Err(Error::Parameter(format!("p must be positive, got {}", self.p)));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::Parameter(format!("alpha must be positive, got {}", self.alpha)));
        }
        for &v in self.x_points.iter().chain(&self.t_points) {
            if !v.is_finite() {
                return Err(Error::Parameter(format!("probe point {v} is not finite")));
            }
        }
        for f in &self.test_functions {
            f.validate()?;
        }
        Ok(())
    }
}
