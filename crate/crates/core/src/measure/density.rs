use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolutely continuous laws on (0,1) that a piece can carry through its
/// quantile function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DensitySpec {
    /// Density `(1-alpha)(1-u)^(-alpha)` on (0,1), `0 < alpha < 1`.
    PowerAtOne { alpha: f64 },
}

impl DensitySpec {
    pub fn power_at_one(alpha: f64) -> Result<Self> {
        let d = DensitySpec::PowerAtOne { alpha };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            DensitySpec::PowerAtOne { alpha } if alpha > 0.0 && alpha < 1.0 => Ok(()),
            DensitySpec::PowerAtOne { alpha } => Err(Error::Parameter(format!(
                "power-at-one density needs 0 < alpha < 1, got {alpha}"
            ))),
        }
    }

    pub fn density(&self, u: f64) -> f64 {
        match *self {
            DensitySpec::PowerAtOne { alpha } => {
                if u <= 0.0 || u >= 1.0 {
                    0.0
                } else {
                    (1.0 - alpha) * (1.0 - u).powf(-alpha)
                }
            }
        }
    }

    /// Distribution function `G(y) = 1 - (1-y)^(1-alpha)` clamped to [0,1].
    pub fn cdf(&self, y: f64) -> f64 {
        match *self {
            DensitySpec::PowerAtOne { alpha } => {
                if y <= 0.0 {
                    0.0
                } else if y >= 1.0 {
                    1.0
                } else {
                    -((1.0 - alpha) * (-y).ln_1p()).exp_m1()
                }
            }
        }
    }

    /// `P(Y > 1 - gap)`. Taking the distance to the upper end directly keeps
    /// full relative precision when the evaluation point sits just below 1.
    pub fn survival_from_gap(&self, gap: f64) -> f64 {
        match *self {
            DensitySpec::PowerAtOne { alpha } => {
                if gap <= 0.0 {
                    0.0
                } else if gap >= 1.0 {
                    1.0
                } else {
                    gap.powf(1.0 - alpha)
                }
            }
        }
    }

    /// Exponent `q = 1/(1-alpha)` of the quantile `Q(w) = 1 - (1-w)^q`.
    pub fn quantile_exponent(&self) -> f64 {
        match *self {
            DensitySpec::PowerAtOne { alpha } => 1.0 / (1.0 - alpha),
        }
    }

    pub fn quantile(&self, w: f64) -> f64 {
        let q = self.quantile_exponent();
        -(q * (-w).ln_1p()).exp_m1()
    }

    /// `∫_a^b Q(w) dw` in closed form.
    pub fn quantile_integral(&self, a: f64, b: f64) -> f64 {
        let q1 = self.quantile_exponent() + 1.0;
        (b - a) - ((1.0 - a).powf(q1) - (1.0 - b).powf(q1)) / q1
    }

    /// Whether the law's distribution function is globally Lipschitz.
    pub fn has_bounded_density(&self) -> bool {
        match *self {
            DensitySpec::PowerAtOne { .. } => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate_scalar, QuadConfig};

    #[test]
    fn rejects_alpha_outside_unit_interval() {
        assert!(DensitySpec::power_at_one(0.0).is_err());
        assert!(DensitySpec::power_at_one(1.0).is_err());
        assert!(DensitySpec::power_at_one(0.5).is_ok());
    }

    #[test]
    fn quantile_inverts_cdf() {
        let d = DensitySpec::power_at_one(0.3).unwrap();
        for i in 1..100 {
            let w = i as f64 / 100.0;
            assert!((d.cdf(d.quantile(w)) - w).abs() < 1e-14);
        }
    }

    #[test]
    fn density_integrates_to_one() {
        // Mass up to y by quadrature, the rest from the closed-form tail.
        for alpha in [0.2, 0.5, 0.8] {
            let d = DensitySpec::power_at_one(alpha).unwrap();
            for y in [0.5, 0.9, 0.999] {
                let (mass, _) = integrate_scalar(|u| d.density(u), 0.0, y, &QuadConfig::default()).unwrap();
                assert!((mass - d.cdf(y)).abs() < 1e-10, "alpha={alpha}, y={y}: {mass}");
                assert!((mass + d.survival_from_gap(1.0 - y) - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn survival_gap_matches_complement() {
        let d = DensitySpec::power_at_one(0.5).unwrap();
        assert!((d.survival_from_gap(0.25) - (1.0 - d.cdf(0.75))).abs() < 1e-15);
        assert!((d.survival_from_gap(1e-12) - 1e-6).abs() < 1e-20);
    }
}
