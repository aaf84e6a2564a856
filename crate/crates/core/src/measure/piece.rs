use serde::{Deserialize, Serialize};

use super::density::DensitySpec;
use crate::error::{Error, Result};

/// Value of a random variable on one piece of the partition, as a function
/// of `omega`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Expr {
    Constant { value: f64 },
    /// `slope * omega + intercept`.
    AffineInOmega { slope: f64, intercept: f64 },
    /// `scale * Q(omega) + shift` with `Q` the quantile of `density`.
    QuantileOfDensity {
        density: DensitySpec,
        scale: f64,
        shift: f64,
    },
}

/// Affine post-transform `x -> scale * x + shift`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    pub scale: f64,
    pub shift: f64,
}

impl AffineMap {
    pub const IDENTITY: AffineMap = AffineMap { scale: 1.0, shift: 0.0 };

    /// `self ∘ inner`.
    pub fn compose(self, inner: AffineMap) -> AffineMap {
        AffineMap {
            scale: self.scale * inner.scale,
            shift: self.scale * inner.shift + self.shift,
        }
    }
}

impl Expr {
    pub fn constant(value: f64) -> Expr {
        Expr::Constant { value }
    }

    pub fn affine(slope: f64, intercept: f64) -> Expr {
        Expr::AffineInOmega { slope, intercept }.normalized()
    }

    pub fn quantile(density: DensitySpec) -> Expr {
        Expr::QuantileOfDensity {
            density,
            scale: 1.0,
            shift: 0.0,
        }
    }

    /// Collapses degenerate smooth expressions to constants.
    pub fn normalized(self) -> Expr {
        match self {
            Expr::AffineInOmega { slope, intercept } if slope == 0.0 => Expr::constant(intercept),
            Expr::QuantileOfDensity { scale, shift, .. } if scale == 0.0 => Expr::constant(shift),
            other => other,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = match *self {
            Expr::Constant { value } => value.is_finite(),
            Expr::AffineInOmega { slope, intercept } => slope.is_finite() && intercept.is_finite(),
            Expr::QuantileOfDensity { density, scale, shift } => {
                density.validate()?;
                scale.is_finite() && shift.is_finite()
            }
        };
        if finite {
            Ok(())
        } else {
            Err(Error::Representation(format!("non-finite coefficients in {self:?}")))
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Expr::Constant { .. })
    }

    #[inline]
    pub fn eval(&self, omega: f64) -> f64 {
        match *self {
            Expr::Constant { value } => value,
            Expr::AffineInOmega { slope, intercept } => slope * omega + intercept,
            Expr::QuantileOfDensity { density, scale, shift } => scale * density.quantile(omega) + shift,
        }
    }

    pub fn map(self, m: AffineMap) -> Expr {
        if m == AffineMap::IDENTITY {
            return self;
        }
        match self {
            Expr::Constant { value } => Expr::constant(m.scale * value + m.shift),
            Expr::AffineInOmega { slope, intercept } => Expr::AffineInOmega {
                slope: m.scale * slope,
                intercept: m.scale * intercept + m.shift,
            },
            Expr::QuantileOfDensity { density, scale, shift } => Expr::QuantileOfDensity {
                density,
                scale: m.scale * scale,
                shift: m.scale * shift + m.shift,
            },
        }
        .normalized()
    }

    pub fn negated(self) -> Expr {
        self.map(AffineMap { scale: -1.0, shift: 0.0 })
    }

    /// `self - other` when the result stays inside the expression set.
    pub fn minus(&self, other: &Expr) -> Result<Expr> {
        use Expr::*;
        let e = match (*self, *other) {
            (Constant { value: a }, Constant { value: b }) => Expr::constant(a - b),
            (AffineInOmega { slope, intercept }, Constant { value }) => AffineInOmega {
                slope,
                intercept: intercept - value,
            },
            (Constant { value }, AffineInOmega { slope, intercept }) => AffineInOmega {
                slope: -slope,
                intercept: value - intercept,
            },
            (AffineInOmega { slope: s1, intercept: c1 }, AffineInOmega { slope: s2, intercept: c2 }) => {
                AffineInOmega {
                    slope: s1 - s2,
                    intercept: c1 - c2,
                }
            }
            (QuantileOfDensity { density, scale, shift }, Constant { value }) => QuantileOfDensity {
                density,
                scale,
                shift: shift - value,
            },
            (Constant { value }, QuantileOfDensity { density, scale, shift }) => QuantileOfDensity {
                density,
                scale: -scale,
                shift: value - shift,
            },
            (
                QuantileOfDensity {
                    density: d1,
                    scale: s1,
                    shift: t1,
                },
                QuantileOfDensity {
                    density: d2,
                    scale: s2,
                    shift: t2,
                },
            ) if d1 == d2 => QuantileOfDensity {
                density: d1,
                scale: s1 - s2,
                shift: t1 - t2,
            },
            (a, b) => {
                return Err(Error::Representation(format!(
                    "difference of {a:?} and {b:?} has no closed piecewise form"
                )))
            }
        };
        Ok(e.normalized())
    }

    /// The point in `(a, b)` where a smooth expression changes sign, if any.
    pub fn sign_change_in(&self, a: f64, b: f64) -> Option<f64> {
        self.preimage_in(0.0, a, b)
    }

    /// The `omega` in `(a, b)` where a smooth expression crosses level `x`.
    pub fn preimage_in(&self, x: f64, a: f64, b: f64) -> Option<f64> {
        let root = match *self {
            Expr::Constant { .. } => return None,
            Expr::AffineInOmega { slope, intercept } => (x - intercept) / slope,
            Expr::QuantileOfDensity { density, scale, shift } => {
                let y = (x - shift) / scale;
                if y <= 0.0 || y >= 1.0 {
                    return None;
                }
                density.cdf(y)
            }
        };
        (root > a && root < b).then_some(root)
    }

    /// Essential range of the expression over `[a, b)`, as `(inf, sup)`.
    pub fn range_on(&self, a: f64, b: f64) -> (f64, f64) {
        let (lo, hi) = match *self {
            Expr::Constant { value } => (value, value),
            Expr::AffineInOmega { .. } => (self.eval(a), self.eval(b)),
            Expr::QuantileOfDensity { density, scale, shift } => {
                let qa = if a <= 0.0 { 0.0 } else { density.quantile(a) };
                let qb = if b >= 1.0 { 1.0 } else { density.quantile(b) };
                (scale * qa + shift, scale * qb + shift)
            }
        };
        (lo.min(hi), lo.max(hi))
    }

    /// Lebesgue measure of `{omega in [a,b) : expr(omega) <= x}`.
    pub fn measure_le(&self, x: f64, a: f64, b: f64) -> f64 {
        match *self {
            Expr::Constant { value } => {
                if value <= x {
                    b - a
                } else {
                    0.0
                }
            }
            _ => self.measure_below(x, a, b),
        }
    }

    /// Lebesgue measure of `{omega in [a,b) : expr(omega) < x}`.
    pub fn measure_lt(&self, x: f64, a: f64, b: f64) -> f64 {
        match *self {
            Expr::Constant { value } => {
                if value < x {
                    b - a
                } else {
                    0.0
                }
            }
            _ => self.measure_below(x, a, b),
        }
    }

    /// Lebesgue measure of `{omega in [a,b) : expr(omega) > x}`.
    pub fn measure_gt(&self, x: f64, a: f64, b: f64) -> f64 {
        match *self {
            Expr::Constant { value } => {
                if value > x {
                    b - a
                } else {
                    0.0
                }
            }
            _ => self.measure_above(x, a, b),
        }
    }

    /// Lebesgue measure of `{omega in [a,b) : expr(omega) >= x}`.
    pub fn measure_ge(&self, x: f64, a: f64, b: f64) -> f64 {
        match *self {
            Expr::Constant { value } => {
                if value >= x {
                    b - a
                } else {
                    0.0
                }
            }
            _ => self.measure_above(x, a, b),
        }
    }

    // Smooth pieces are strictly monotone, so level sets are null and the
    // strict and non-strict versions agree.
    fn measure_below(&self, x: f64, a: f64, b: f64) -> f64 {
        match *self {
            Expr::Constant { .. } => unreachable!(),
            Expr::AffineInOmega { slope, intercept } => {
                let cut = ((x - intercept) / slope).clamp(a, b);
                if slope > 0.0 {
                    cut - a
                } else {
                    b - cut
                }
            }
            Expr::QuantileOfDensity { density, scale, shift } => {
                if scale > 0.0 {
                    density.cdf((x - shift) / scale).clamp(a, b) - a
                } else {
                    let gap = ((x - shift) - scale) / -scale;
                    tail_measure(density.survival_from_gap(gap), a, b)
                }
            }
        }
    }

    fn measure_above(&self, x: f64, a: f64, b: f64) -> f64 {
        match *self {
            Expr::Constant { .. } => unreachable!(),
            Expr::AffineInOmega { slope, intercept } => {
                let cut = ((x - intercept) / slope).clamp(a, b);
                if slope > 0.0 {
                    b - cut
                } else {
                    cut - a
                }
            }
            Expr::QuantileOfDensity { density, scale, shift } => {
                if scale > 0.0 {
                    let gap = (shift - (x - scale)) / scale;
                    tail_measure(density.survival_from_gap(gap), a, b)
                } else {
                    density.cdf((x - shift) / scale).clamp(a, b) - a
                }
            }
        }
    }
}

/// Measure of `[max(a, 1 - tail), b)`, computed in distance-to-one
/// coordinates so that tiny tails on the last piece stay exact.
fn tail_measure(tail: f64, a: f64, b: f64) -> f64 {
    let lo = 1.0 - b;
    let hi = 1.0 - a;
    tail.clamp(lo, hi) - lo
}

/// One cell `[start, end)` of the partition of (0,1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub start: f64,
    pub end: f64,
    pub expr: Expr,
}

impl Piece {
    pub fn new(start: f64, end: f64, expr: Expr) -> Piece {
        Piece {
            start,
            end,
            expr: expr.normalized(),
        }
    }

    #[inline]
    pub fn len(&self) -> f64 {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    #[inline]
    pub fn contains(&self, omega: f64) -> bool {
        omega >= self.start && omega < self.end
    }
}
