//! Bounded Lipschitz test functions used to probe distributional modes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestFunction {
    Sine,
    /// Identity on `[-(bound+eps), bound+eps]`, constant outside.
    ClampedIdentity { bound: f64, eps: f64 },
    /// `clamp(slope * (x - center), -bound, bound)`.
    ClampedAffine { slope: f64, bound: f64, center: f64 },
}

impl TestFunction {
    pub fn clamped_identity(bound: f64, eps: f64) -> Result<Self> {
        let f = TestFunction::ClampedIdentity { bound, eps };
        f.validate()?;
        Ok(f)
    }

    pub fn clamped_affine(slope: f64, bound: f64, center: f64) -> Result<Self> {
        let f = TestFunction::ClampedAffine { slope, bound, center };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            TestFunction::Sine => true,
            TestFunction::ClampedIdentity { bound, eps } => bound >= 0.0 && bound.is_finite() && eps > 0.0 && eps.is_finite(),
            TestFunction::ClampedAffine { slope, bound, center } => {
                slope > 0.0 && slope.is_finite() && bound > 0.0 && bound.is_finite() && center.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Parameter(format!("invalid test function {self:?}")))
        }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            TestFunction::Sine => x.sin(),
            TestFunction::ClampedIdentity { bound, eps } => x.clamp(-(bound + eps), bound + eps),
            TestFunction::ClampedAffine { slope, bound, center } => (slope * (x - center)).clamp(-bound, bound),
        }
    }

    /// `f(x) - f(y)` given `d = x - y` computed exactly by the caller.
    /// Avoids cancellation when `x` and `y` are close.
    #[inline]
    pub fn diff(&self, x: f64, y: f64, d: f64) -> f64 {
        match *self {
            TestFunction::Sine => 2.0 * (0.5 * (x + y)).cos() * (0.5 * d).sin(),
            TestFunction::ClampedIdentity { bound, eps } => {
                let c = bound + eps;
                if x.abs() <= c && y.abs() <= c {
                    d
                } else {
                    self.eval(x) - self.eval(y)
                }
            }
            TestFunction::ClampedAffine { slope, bound, center } => {
                let (u, v) = (slope * (x - center), slope * (y - center));
                if u.abs() <= bound && v.abs() <= bound {
                    slope * d
                } else {
                    self.eval(x) - self.eval(y)
                }
            }
        }
    }

    /// Derivative where it exists; zero at the kinks.
    pub fn derivative(&self, x: f64) -> f64 {
        match *self {
            TestFunction::Sine => x.cos(),
            TestFunction::ClampedIdentity { bound, eps } => f64::from(u8::from(x.abs() < bound + eps)),
            TestFunction::ClampedAffine { slope, bound, center } => {
                if (slope * (x - center)).abs() < bound {
                    slope
                } else {
                    0.0
                }
            }
        }
    }

    /// `sup |f|`.
    pub fn bound(&self) -> f64 {
        match *self {
            TestFunction::Sine => 1.0,
            TestFunction::ClampedIdentity { bound, eps } => bound + eps,
            TestFunction::ClampedAffine { bound, .. } => bound,
        }
    }

    /// Global Lipschitz constant.
    pub fn lipschitz(&self) -> f64 {
        match *self {
            TestFunction::Sine | TestFunction::ClampedIdentity { .. } => 1.0,
            TestFunction::ClampedAffine { slope, .. } => slope,
        }
    }

    /// Points where `f` is not differentiable.
    pub fn kinks(&self) -> Vec<f64> {
        match *self {
            TestFunction::Sine => vec![],
            TestFunction::ClampedIdentity { bound, eps } => vec![-(bound + eps), bound + eps],
            TestFunction::ClampedAffine { slope, bound, center } => {
                vec![center - bound / slope, center + bound / slope]
            }
        }
    }

    pub fn label(&self) -> String {
        match *self {
            TestFunction::Sine => "sin".to_string(),
            TestFunction::ClampedIdentity { bound, eps } => format!("clamp_id(M={bound},eps={eps})"),
            TestFunction::ClampedAffine { slope, bound, center } => {
                format!("clamp_affine(K={slope},M={bound},x0={center})")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dictionary() -> Vec<TestFunction> {
        vec![
            TestFunction::Sine,
            TestFunction::clamped_identity(1.0, 0.5).unwrap(),
            TestFunction::clamped_affine(2.0, 1.0, 0.3).unwrap(),
        ]
    }

    #[test]
    fn clamped_identity_matches_truncation_function() {
        let f = TestFunction::clamped_identity(1.0, 0.5).unwrap();
        assert_eq!(f.eval(3.0), 1.5);
        assert_eq!(f.eval(-3.0), -1.5);
        assert_eq!(f.eval(0.7), 0.7);
        assert_eq!(f.bound(), 1.5);
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(TestFunction::clamped_identity(1.0, 0.0).is_err());
        assert!(TestFunction::clamped_affine(-1.0, 1.0, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn bounded_and_lipschitz(x in -50.0f64..50.0, y in -50.0f64..50.0) {
            for f in dictionary() {
                prop_assert!(f.eval(x).abs() <= f.bound());
                prop_assert!((f.eval(x) - f.eval(y)).abs() <= f.lipschitz() * (x - y).abs() + 1e-15);
                prop_assert!((f.diff(x, y, x - y) - (f.eval(x) - f.eval(y))).abs() < 1e-12);
            }
        }
    }
}
