use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::SequenceFamily;
use crate::measure::{char_fn, expectation, DensitySpec, Expr, Integrand, Piece, RandomVariable};
use crate::modes::{Certificate, ModeParams, ModeTag, TermKind};
use crate::quadrature::QuadConfig;
use crate::series::AnalyticHint;
use crate::testfn::TestFunction;

/// Parameterized catalog entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "snake_case")]
pub enum FamilySpec {
    /// `X_n = 1` on `(0, 1/n^2)`, `n^(-1/alpha)` on `[1/n^2, 1)`; limit 0.
    Ex31 { alpha: f64 },
    /// `X_n = X + n^(-beta)` with `X` of density `(1-alpha)(1-u)^(-alpha)`.
    Ex32 { alpha: f64, beta: f64 },
    /// `X_n = 1` on `(0, 1/n)`, 0 elsewhere; limit 0.
    Ex33,
    /// `X_n = base + constant * n^(-exponent)`.
    Shift {
        base: RandomVariable,
        constant: f64,
        exponent: f64,
    },
    /// `X_n = X = c`.
    Constant { c: f64 },
}

impl FamilySpec {
    pub fn shift_uniform(constant: f64, exponent: f64) -> Self {
        FamilySpec::Shift {
            base: RandomVariable::uniform(),
            constant,
            exponent,
        }
    }

    /// The families of the standard soundness sweep.
    pub fn standard_set() -> Vec<FamilySpec> {
        vec![
            FamilySpec::Ex31 { alpha: 2.0 },
            FamilySpec::Ex32 { alpha: 0.5, beta: 2.0 },
            FamilySpec::Ex32 { alpha: 0.4, beta: 2.0 },
            FamilySpec::Ex33,
            FamilySpec::Constant { c: 0.0 },
            FamilySpec::shift_uniform(1.0, 2.0),
        ]
    }

    pub fn id(&self) -> &'static str {
        match self {
            FamilySpec::Ex31 { .. } => "ex31",
            FamilySpec::Ex32 { .. } => "ex32",
            FamilySpec::Ex33 => "ex33",
            FamilySpec::Shift { .. } => "shift",
            FamilySpec::Constant { .. } => "const",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Parameter(msg));
        match *self {
            FamilySpec::Ex31 { alpha } if !(alpha > 0.0 && alpha.is_finite()) => {
                bad(format!("ex31 needs alpha > 0, got {alpha}"))
            }
            FamilySpec::Ex32 { alpha, .. } if !(alpha > 0.0 && alpha < 1.0) => {
                bad(format!("ex32 needs 0 < alpha < 1, got {alpha}"))
            }
            FamilySpec::Ex32 { beta, .. } if !(beta > 1.0 && beta.is_finite()) => {
                bad(format!("ex32 needs beta > 1, got {beta}"))
            }
            FamilySpec::Shift { constant, .. } if !(constant >= 0.0 && constant.is_finite()) => {
                bad(format!("shift constant must be nonnegative, got {constant}"))
            }
            FamilySpec::Shift { exponent, .. } if !(exponent > 1.0 && exponent.is_finite()) => {
                bad(format!("shift exponent must exceed 1 for summable shifts, got {exponent}"))
            }
            FamilySpec::Constant { c } if !c.is_finite() => bad(format!("constant must be finite, got {c}")),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilySpec::Ex31 { alpha } => write!(f, "ex31(alpha={alpha})"),
            FamilySpec::Ex32 { alpha, beta } => write!(f, "ex32(alpha={alpha},beta={beta})"),
            FamilySpec::Ex33 => write!(f, "ex33"),
            FamilySpec::Shift {
                base,
                constant,
                exponent,
            } => {
                let base = if *base == RandomVariable::uniform() {
                    "uniform"
                } else {
                    "custom"
                };
                write!(f, "shift({base},{constant}/n^{exponent})")
            }
            FamilySpec::Constant { c } => write!(f, "const(c={c})"),
        }
    }
}

/// A catalog family ready for evaluation.
#[derive(Debug, Clone)]
pub struct RegistryFamily {
    spec: FamilySpec,
    limit: RandomVariable,
}

pub fn build_family(spec: &FamilySpec) -> Result<RegistryFamily> {
    spec.validate()?;
    let limit = match spec {
        FamilySpec::Ex31 { .. } | FamilySpec::Ex33 => RandomVariable::constant(0.0),
        FamilySpec::Ex32 { alpha, .. } => RandomVariable::from_density(DensitySpec::power_at_one(*alpha)?)?,
        FamilySpec::Shift { base, .. } => base.clone(),
        FamilySpec::Constant { c } => RandomVariable::constant(*c),
    };
    Ok(RegistryFamily {
        spec: spec.clone(),
        limit,
    })
}

// Dominant term of a sum of power laws `c_i n^(-p_i)`.
fn leading(terms: &[(f64, f64)]) -> AnalyticHint {
    let live: Vec<(f64, f64)> = terms.iter().copied().filter(|&(c, _)| c != 0.0).collect();
    let Some(p) = live.iter().map(|&(_, p)| p).min_by(f64::total_cmp) else {
        return AnalyticHint::EventuallyZero;
    };
    let c: f64 = live.iter().filter(|&&(_, q)| q == p).map(|&(c, _)| c).sum();
    if c == 0.0 {
        return AnalyticHint::EventuallyZero;
    }
    AnalyticHint::PowerLaw {
        constant: c.abs(),
        exponent: p,
    }
}

fn power(constant: f64, exponent: f64) -> AnalyticHint {
    leading(&[(constant, exponent)])
}

fn pb(exponent: f64) -> Option<Certificate> {
    Some(Certificate::PowerBound { exponent })
}

impl RegistryFamily {
    pub fn spec(&self) -> &FamilySpec {
        &self.spec
    }

    /// The limit law has a globally Lipschitz distribution function.
    pub fn limit_cdf_is_lipschitz(&self) -> bool {
        self.limit
            .normalized_pieces()
            .iter()
            .all(|p| matches!(p.expr, Expr::AffineInOmega { .. }))
    }

    // Left density of an all-affine law at x.
    fn left_density(&self, x: f64) -> f64 {
        self.limit
            .normalized_pieces()
            .iter()
            .filter_map(|p| match p.expr {
                Expr::AffineInOmega { slope, .. } => {
                    let (lo, hi) = p.expr.range_on(p.start, p.end);
                    (lo < x && x <= hi).then_some(1.0 / slope.abs())
                }
                _ => None,
            })
            .sum()
    }

    fn mean_derivative(&self, f: TestFunction, absolute: bool) -> Option<f64> {
        expectation(
            &self.limit,
            Integrand::TestDerivative { f, absolute },
            &QuadConfig::default(),
        )
        .ok()
        .map(|e| e.value)
    }

    fn char_modulus(&self, t: f64) -> Option<f64> {
        char_fn(&self.limit, t, &QuadConfig::default()).ok().map(|(z, _)| z.norm())
    }

    // Hints shared by families of the form X + c n^(-q).
    fn shift_hint(&self, kind: &TermKind, c: f64, q: f64) -> Option<AnalyticHint> {
        if c == 0.0 {
            return Some(AnalyticHint::EventuallyZero);
        }
        Some(match *kind {
            TermKind::Pointwise { .. } | TermKind::Slinf | TermKind::Truncated { .. } => power(c, q),
            TermKind::SaAs { alpha, .. } => power(c.powf(alpha), alpha * q),
            TermKind::Slp { p } => power(c.powf(p), p * q),
            TermKind::Cc { .. } => AnalyticHint::EventuallyZero,
            TermKind::S1d { f } => power(c * self.mean_derivative(f, false)?, q),
            TermKind::S1star { f } => power(c * self.mean_derivative(f, true)?, q),
            TermKind::S3d { t } => power(c * t.abs() * self.char_modulus(t)?, q),
            TermKind::S2d { .. } => return None,
        })
    }
}

impl SequenceFamily for RegistryFamily {
    fn label(&self) -> String {
        self.spec.to_string()
    }

    fn member(&self, n: u64) -> Result<RandomVariable> {
        let nf = n as f64;
        match self.spec {
            FamilySpec::Ex31 { alpha } => {
                let cut = 1.0 / (nf * nf);
                RandomVariable::new(vec![
                    Piece::new(0.0, cut, Expr::constant(1.0)),
                    Piece::new(cut, 1.0, Expr::constant(nf.powf(-1.0 / alpha))),
                ])
            }
            FamilySpec::Ex32 { beta, .. } => self.limit.clone().shifted(nf.powf(-beta)),
            FamilySpec::Ex33 => RandomVariable::indicator_split(1.0 / nf, 1.0, 0.0),
            FamilySpec::Shift { constant, exponent, .. } => self.limit.clone().shifted(constant * nf.powf(-exponent)),
            FamilySpec::Constant { c } => Ok(RandomVariable::constant(c)),
        }
    }

    fn limit(&self) -> &RandomVariable {
        &self.limit
    }

    fn shift(&self, n: u64) -> Option<f64> {
        let nf = n as f64;
        match self.spec {
            FamilySpec::Ex32 { beta, .. } => Some(nf.powf(-beta)),
            FamilySpec::Shift { constant, exponent, .. } => Some(constant * nf.powf(-exponent)),
            FamilySpec::Constant { .. } => Some(0.0),
            _ => None,
        }
    }

    fn term_hint(&self, kind: &TermKind) -> Option<AnalyticHint> {
        use AnalyticHint::*;
        match self.spec {
            FamilySpec::Constant { .. } => Some(EventuallyZero),
            FamilySpec::Ex31 { alpha } => {
                // Atoms: 1 with mass n^-2 and n^(-1/alpha) with the rest.
                let e = 1.0 / alpha;
                Some(match *kind {
                    TermKind::Pointwise { .. } => power(1.0, e),
                    TermKind::SaAs { alpha: a, .. } => power(1.0, a * e),
                    TermKind::Cc { eps } if eps <= 1.0 => power(1.0, 2.0),
                    TermKind::Cc { .. } => EventuallyZero,
                    TermKind::Slp { p } => leading(&[(1.0, 2.0), (1.0, p * e)]),
                    TermKind::Slinf => EventuallyConstant { value: 1.0 },
                    TermKind::Truncated { eps } if eps <= 1.0 => power(1.0, e),
                    TermKind::Truncated { .. } => leading(&[(1.0, 2.0), (1.0, e)]),
                    TermKind::S1d { f } | TermKind::S1star { f } => {
                        if f.kinks().contains(&0.0) {
                            return None;
                        }
                        let (jump, slope) = (f.eval(1.0) - f.eval(0.0), f.derivative(0.0));
                        if matches!(kind, TermKind::S1star { .. }) {
                            leading(&[(jump.abs(), 2.0), (slope.abs(), e)])
                        } else {
                            leading(&[(jump, 2.0), (slope, e)])
                        }
                    }
                    TermKind::S2d { x } if x > 0.0 && x < 1.0 => power(1.0, 2.0),
                    TermKind::S2d { .. } => EventuallyZero,
                    TermKind::S3d { t } => {
                        let jump = 2.0 * (0.5 * t).sin().abs();
                        leading(&[(jump, 2.0), (t.abs(), e)])
                    }
                })
            }
            FamilySpec::Ex32 { alpha, beta } => match *kind {
                TermKind::S2d { x } => Some(if x <= 0.0 || x > 1.0 {
                    EventuallyZero
                } else if x == 1.0 {
                    power(1.0, (1.0 - alpha) * beta)
                } else {
                    power(DensitySpec::PowerAtOne { alpha }.density(x), beta)
                }),
                _ => self.shift_hint(kind, 1.0, beta),
            },
            FamilySpec::Ex33 => Some(match *kind {
                TermKind::Pointwise { .. } | TermKind::SaAs { .. } => EventuallyZero,
                TermKind::Cc { eps } if eps <= 1.0 => power(1.0, 1.0),
                TermKind::Cc { .. } => EventuallyZero,
                TermKind::Slp { .. } => power(1.0, 1.0),
                TermKind::Slinf => EventuallyConstant { value: 1.0 },
                TermKind::Truncated { eps } if eps > 1.0 => power(1.0, 1.0),
                TermKind::Truncated { .. } => EventuallyZero,
                TermKind::S1d { f } | TermKind::S1star { f } => power(f.eval(1.0) - f.eval(0.0), 1.0),
                TermKind::S2d { x } if x > 0.0 && x < 1.0 => power(1.0, 1.0),
                TermKind::S2d { .. } => EventuallyZero,
                TermKind::S3d { t } => power(2.0 * (0.5 * t).sin(), 1.0),
            }),
            FamilySpec::Shift { constant, exponent, .. } => match *kind {
                TermKind::S2d { x } if constant > 0.0 => {
                    if self.limit_cdf_is_lipschitz() {
                        Some(power(constant * self.left_density(x), exponent))
                    } else {
                        None
                    }
                }
                _ => self.shift_hint(kind, constant, exponent),
            },
        }
    }

    fn certificate(&self, mode: ModeTag, params: &ModeParams) -> Option<Certificate> {
        use ModeTag::*;
        match self.spec {
            FamilySpec::Constant { .. } => Some(Certificate::EventuallyZero),
            FamilySpec::Ex31 { alpha } => {
                let e = 1.0 / alpha;
                match mode {
                    CompleteConvergence | S2d | Probability => pb(2.0),
                    AlmostSure => pb(e),
                    SAlphaAs => pb(params.alpha * e),
                    Distribution | S1d | S1StarD | S3d => pb(e.min(2.0)),
                    _ => None,
                }
            }
            FamilySpec::Ex32 { alpha, beta } => match mode {
                CompleteConvergence | Probability => Some(Certificate::EventuallyZero),
                AlmostSure | S1d | S1StarD | S3d => pb(beta),
                SAlphaAs => pb(params.alpha * beta),
                // F is (1 - alpha)-Hölder, so |F(x) - F(x - h)| <= h^(1 - alpha).
                S2d | Distribution => pb((1.0 - alpha) * beta),
                _ => None,
            },
            FamilySpec::Ex33 => match mode {
                AlmostSure | SAlphaAs => Some(Certificate::EventuallyZero),
                Probability | Distribution => pb(1.0),
                _ => None,
            },
            FamilySpec::Shift { constant, exponent, .. } => {
                if constant == 0.0 {
                    return Some(Certificate::EventuallyZero);
                }
                match mode {
                    CompleteConvergence | Probability => Some(Certificate::EventuallyZero),
                    AlmostSure | S1d | S1StarD | S3d => pb(exponent),
                    SAlphaAs => pb(params.alpha * exponent),
                    S2d | Distribution if self.limit_cdf_is_lipschitz() => pb(exponent),
                    _ => None,
                }
            }
        }
    }
}
