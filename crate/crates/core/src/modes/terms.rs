use std::cell::OnceCell;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::SequenceFamily;
use crate::measure::{coupled_expectation, expectation, Cdf, Coupling, Integrand, OmegaPoint, RandomVariable};
use crate::quadrature::QuadConfig;
use crate::testfn::TestFunction;

/// One term sequence `n -> a_n` extracted from a mode definition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "term", rename_all = "snake_case")]
pub enum TermKind {
    /// `|X_n(w) - X(w)|`.
    Pointwise { omega: OmegaPoint },
    /// `P(|X_n - X| >= eps)`.
    Cc { eps: f64 },
    /// `E|X_n - X|^p`.
    Slp { p: f64 },
    /// `||X_n - X||_inf`.
    Slinf,
    /// `|E f(X_n) - E f(X)|`.
    S1d { f: TestFunction },
    /// `E|f(X_n) - f(X)|`.
    S1star { f: TestFunction },
    /// `|F_n(x) - F(x)|`.
    S2d { x: f64 },
    /// `|phi_n(t) - phi(t)|`.
    S3d { t: f64 },
    /// `|X_n(w) - X(w)|^alpha`.
    SaAs { alpha: f64, omega: OmegaPoint },
    /// `E[|X_n - X| 1{|X_n - X| < eps}]`.
    Truncated { eps: f64 },
}

impl TermKind {
    /// Short probe description, e.g. `f=sin` or `x=0.5`.
    pub fn label(&self) -> String {
        match self {
            TermKind::Pointwise { omega } => format!("omega={}", omega.value()),
            TermKind::Cc { eps } | TermKind::Truncated { eps } => format!("eps={eps}"),
            TermKind::Slp { p } => format!("p={p}"),
            TermKind::Slinf => "sup".to_string(),
            TermKind::S1d { f } | TermKind::S1star { f } => format!("f={}", f.label()),
            TermKind::S2d { x } => format!("x={x}"),
            TermKind::S3d { t } => format!("t={t}"),
            TermKind::SaAs { alpha, omega } => format!("alpha={alpha},omega={}", omega.value()),
        }
    }
}

/// Evaluates terms for one family; the limit's law is computed once.
pub struct TermEvaluator<'f> {
    family: &'f dyn SequenceFamily,
    limit: RandomVariable,
    limit_cdf: Cdf,
    cfg: QuadConfig,
}

impl<'f> TermEvaluator<'f> {
    pub fn new(family: &'f dyn SequenceFamily, cfg: QuadConfig) -> Self {
        let limit = family.limit().normalized();
        let limit_cdf = limit.cdf();
        Self {
            family,
            limit,
            limit_cdf,
            cfg,
        }
    }

    pub fn limit_cdf(&self) -> &Cdf {
        &self.limit_cdf
    }

    /// Checks probe preconditions that do not depend on `n`.
    pub fn check(&self, kind: &TermKind) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Parameter(format!("{name} must be positive, got {v}")))
            }
        };
        match *kind {
            TermKind::S2d { x } => {
                let jump = self.limit_cdf.jump_at(x);
                if jump > 0.0 {
                    return Err(Error::Precondition(format!(
                        "x = {x} is a jump point of the limit distribution function (jump {jump})"
                    )));
                }
                Ok(())
            }
            TermKind::Cc { eps } | TermKind::Truncated { eps } => positive("epsilon", eps),
            TermKind::Slp { p } => positive("p", p),
            TermKind::SaAs { alpha, .. } => positive("alpha", alpha),
            TermKind::S1d { f } | TermKind::S1star { f } => f.validate(),
            TermKind::S3d { t } if !t.is_finite() => Err(Error::Parameter(format!("t = {t} is not finite"))),
            _ => Ok(()),
        }
    }

    pub fn at(&self, n: u64) -> Result<MemberTerms<'_, 'f>> {
        if n == 0 {
            return Err(Error::Parameter("indices start at n = 1".into()));
        }
        Ok(MemberTerms {
            ev: self,
            member: self.family.member(n)?.normalized(),
            diff: OnceCell::new(),
            diff_abs: OnceCell::new(),
        })
    }

    /// Convenience: the `n`-th term of `kind`, with preconditions checked.
    pub fn term(&self, n: u64, kind: &TermKind) -> Result<f64> {
        self.check(kind)?;
        self.at(n)?.term(kind)
    }
}

/// The `n`-th member with lazily built differences to the limit.
pub struct MemberTerms<'e, 'f> {
    ev: &'e TermEvaluator<'f>,
    member: RandomVariable,
    diff: OnceCell<Result<RandomVariable>>,
    diff_abs: OnceCell<Result<RandomVariable>>,
}

impl MemberTerms<'_, '_> {
    pub fn member(&self) -> &RandomVariable {
        &self.member
    }

    fn diff(&self) -> Result<&RandomVariable> {
        self.diff
            .get_or_init(|| self.member.difference(&self.ev.limit))
            .as_ref()
            .map_err(Clone::clone)
    }

    fn diff_abs(&self) -> Result<&RandomVariable> {
        self.diff_abs
            .get_or_init(|| self.member.diff_abs(&self.ev.limit))
            .as_ref()
            .map_err(Clone::clone)
    }

    fn pointwise(&self, omega: OmegaPoint) -> f64 {
        match self.diff() {
            Ok(d) => d.eval(omega).abs(),
            Err(_) => (self.member.eval(omega) - self.ev.limit.eval(omega)).abs(),
        }
    }

    pub fn term(&self, kind: &TermKind) -> Result<f64> {
        let cfg = &self.ev.cfg;
        Ok(match *kind {
            TermKind::Pointwise { omega } => self.pointwise(omega),
            TermKind::SaAs { alpha, omega } => self.pointwise(omega).powf(alpha),
            TermKind::Cc { eps } => self.diff_abs()?.prob_ge(eps),
            TermKind::Slp { p } => expectation(self.diff_abs()?, Integrand::AbsPower(p), cfg)?.value,
            TermKind::Slinf => self.diff_abs()?.sup_norm(),
            TermKind::Truncated { eps } => expectation(self.diff_abs()?, Integrand::TruncatedAbs(eps), cfg)?.value,
            TermKind::S1d { f } => self.test_diff(f, false)?.abs(),
            TermKind::S1star { f } => self.test_diff(f, true)?,
            TermKind::S2d { x } => self.cdf_gap(x),
            TermKind::S3d { t } => self.char_gap(t)?,
        })
    }

    fn test_diff(&self, f: TestFunction, absolute: bool) -> Result<f64> {
        let kinks = f.kinks();
        let coupling = Coupling {
            kinks: &kinks,
            frequency: 0.0,
        };
        let res = coupled_expectation(
            &self.member,
            &self.ev.limit,
            1,
            coupling,
            |a, b, d, out| {
                let v = f.diff(a, b, d);
                out[0] = if absolute { v.abs() } else { v };
            },
            &self.ev.cfg,
        )?;
        Ok(res.values[0])
    }

    // Works with survival functions above the median so that gaps near
    // F = 1 keep relative precision.
    fn cdf_gap(&self, x: f64) -> f64 {
        let limit = &self.ev.limit_cdf;
        let fx = limit.eval(x);
        if fx > 0.5 {
            (self.member.prob_gt(x) - limit.survival(x)).abs()
        } else {
            (self.member.prob_le(x) - fx).abs()
        }
    }

    fn char_gap(&self, t: f64) -> Result<f64> {
        if t == 0.0 {
            return Ok(0.0);
        }
        let res = coupled_expectation(
            &self.member,
            &self.ev.limit,
            2,
            Coupling {
                kinks: &[],
                frequency: t.abs(),
            },
            |a, b, d, out| {
                // e^{ita} - e^{itb} = 2i sin(t d / 2) e^{it(a+b)/2}
                let s = 2.0 * (0.5 * t * d).sin();
                let (sm, cm) = (0.5 * t * (a + b)).sin_cos();
                out[0] = -s * sm;
                out[1] = s * cm;
            },
            &self.ev.cfg,
        )?;
        Ok(res.values[0].hypot(res.values[1]))
    }
}

fn one(family: &dyn SequenceFamily, n: u64, kind: TermKind, cfg: &QuadConfig) -> Result<f64> {
    TermEvaluator::new(family, *cfg).term(n, &kind)
}

pub fn term_cc(family: &dyn SequenceFamily, n: u64, eps: f64, cfg: &QuadConfig) -> Result<f64> {
    one(family, n, TermKind::Cc { eps }, cfg)
}

pub fn term_slp(family: &dyn SequenceFamily, n: u64, p: f64, cfg: &QuadConfig) -> Result<f64> {
    one(family, n, TermKind::Slp { p }, cfg)
}

pub fn term_slinf(family: &dyn SequenceFamily, n: u64, cfg: &QuadConfig) -> Result<f64> {
    one(family, n, TermKind::Slinf, cfg)
}

pub fn term_s1d(family: &dyn SequenceFamily, n: u64, f: TestFunction, cfg: &QuadConfig) -> Result<f64> {
    one(family, n, TermKind::S1d { f }, cfg)
}

pub fn term_s1star(family: &dyn SequenceFamily, n: u64, f: TestFunction, cfg: &QuadConfig) -> Result<f64> {
    one(family, n, TermKind::S1star { f }, cfg)
}

pub fn term_s2d(family: &dyn SequenceFamily, n: u64, x: f64, cfg: &QuadConfig) -> Result<f64> {
    one(family, n, TermKind::S2d { x }, cfg)
}

pub fn term_s3d(family: &dyn SequenceFamily, n: u64, t: f64, cfg: &QuadConfig) -> Result<f64> {
    one(family, n, TermKind::S3d { t }, cfg)
}

pub fn term_sa_as(family: &dyn SequenceFamily, n: u64, alpha: f64, omega: OmegaPoint, cfg: &QuadConfig) -> Result<f64> {
    one(family, n, TermKind::SaAs { alpha, omega }, cfg)
}

pub fn term_truncated(family: &dyn SequenceFamily, n: u64, eps: f64, cfg: &QuadConfig) -> Result<f64> {
    one(family, n, TermKind::Truncated { eps }, cfg)
}

/// Limit-mode probes for the null-sequence test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LimitProbe {
    Probability { eps: f64 },
    Lp { p: f64 },
    LInf,
    DistributionCdf { x: f64 },
    DistributionTest { f: TestFunction },
    AlmostSure { omega: OmegaPoint },
}

impl LimitProbe {
    /// Limit modes share the summability term formulas.
    pub fn term_kind(self) -> TermKind {
        match self {
            LimitProbe::Probability { eps } => TermKind::Cc { eps },
            LimitProbe::Lp { p } => TermKind::Slp { p },
            LimitProbe::LInf => TermKind::Slinf,
            LimitProbe::DistributionCdf { x } => TermKind::S2d { x },
            LimitProbe::DistributionTest { f } => TermKind::S1d { f },
            LimitProbe::AlmostSure { omega } => TermKind::Pointwise { omega },
        }
    }
}

pub fn limit_terms(family: &dyn SequenceFamily, probe: LimitProbe, n: u64, cfg: &QuadConfig) -> Result<f64> {
    one(family, n, probe.term_kind(), cfg)
}
