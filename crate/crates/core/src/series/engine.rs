use statrs::distribution::{ContinuousCDF, StudentsT};

use super::policy::EnginePolicy;
use super::verdict::{
    AnalyticHint, DivergenceEvidence, ExponentFit, NullClass, NullVerdict, SeriesClass, SeriesVerdict,
};
use crate::error::{Error, Result};
use crate::summation::NeumaierSum;

/// Quadrature noise below this magnitude is clamped to zero.
pub const NEGATIVE_SLACK: f64 = 1e-12;

/// A nonnegative term sequence `a_1, a_2, ...`.
pub struct TermSource<'a> {
    generator: Box<dyn FnMut(u64) -> Result<f64> + 'a>,
    len: Option<u64>,
    pub hint: Option<AnalyticHint>,
}

impl<'a> TermSource<'a> {
    pub fn new(generator: impl FnMut(u64) -> Result<f64> + 'a) -> Self {
        Self {
            generator: Box::new(generator),
            len: None,
            hint: None,
        }
    }

    /// A finite stream; `terms[0]` is `a_1`.
    pub fn from_slice(terms: &'a [f64]) -> Self {
        Self {
            generator: Box::new(move |n| Ok(terms[(n - 1) as usize])),
            len: Some(terms.len() as u64),
            hint: None,
        }
    }

    pub fn with_hint(mut self, hint: Option<AnalyticHint>) -> Self {
        self.hint = hint;
        self
    }

    fn n_used(&self, policy: &EnginePolicy) -> u64 {
        self.len.map_or(policy.n_max, |l| l.min(policy.n_max))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockStat {
    pub sum: f64,
    pub max: f64,
    pub min: f64,
}

/// Summary of one scanned column. Block `k` covers `[2^k, 2^(k+1) - 1]`;
/// only complete blocks are kept.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnStats {
    pub blocks: Vec<BlockStat>,
    pub total: f64,
    pub n_used: u64,
    pub blowup_at: Option<u64>,
    pub last_nonzero: Option<u64>,
    /// Start of the last complete block.
    pub tail_start: u64,
    /// Largest term from `tail_start` through `n_used`.
    pub tail_max: f64,
}

/// Streaming accumulator for one column; terms must arrive as `n = 1, 2, ...`.
#[derive(Debug, Clone)]
pub struct ColumnScan {
    blocks: Vec<BlockStat>,
    cur: NeumaierSum,
    cur_max: f64,
    cur_min: f64,
    cur_end: u64,
    total: NeumaierSum,
    threshold: f64,
    blowup_at: Option<u64>,
    last_nonzero: Option<u64>,
    tail_start: u64,
    tail_max: f64,
    seen: u64,
}

impl ColumnScan {
    /// `n_planned` fixes which block is the last complete one.
    pub fn new(n_planned: u64, policy: &EnginePolicy) -> Self {
        Self {
            blocks: Vec::new(),
            cur: NeumaierSum::new(),
            cur_max: f64::NEG_INFINITY,
            cur_min: f64::INFINITY,
            cur_end: 1,
            total: NeumaierSum::new(),
            threshold: policy.blowup_threshold,
            blowup_at: None,
            last_nonzero: None,
            tail_start: last_block_start(n_planned),
            tail_max: 0.0,
            seen: 0,
        }
    }

    pub fn push(&mut self, n: u64, value: f64) -> Result<()> {
        debug_assert_eq!(n, self.seen + 1);
        let v = clamp_term(n, value)?;
        self.seen = n;
        self.total.add(v);
        if self.blowup_at.is_none() && self.total.value() > self.threshold {
            self.blowup_at = Some(n);
        }
        if v > 0.0 {
            self.last_nonzero = Some(n);
        }
        if n >= self.tail_start {
            self.tail_max = self.tail_max.max(v);
        }
        self.cur.add(v);
        self.cur_max = self.cur_max.max(v);
        self.cur_min = self.cur_min.min(v);
        if n == self.cur_end {
            self.blocks.push(BlockStat {
                sum: self.cur.value(),
                max: self.cur_max,
                min: self.cur_min,
            });
            self.cur = NeumaierSum::new();
            self.cur_max = f64::NEG_INFINITY;
            self.cur_min = f64::INFINITY;
            self.cur_end = 2 * self.cur_end + 1;
        }
        Ok(())
    }

    pub fn finish(self) -> ColumnStats {
        ColumnStats {
            blocks: self.blocks,
            total: self.total.value(),
            n_used: self.seen,
            blowup_at: self.blowup_at,
            last_nonzero: self.last_nonzero,
            tail_start: self.tail_start,
            tail_max: self.tail_max,
        }
    }
}

fn clamp_term(n: u64, v: f64) -> Result<f64> {
    if v.is_nan() || v < -NEGATIVE_SLACK || v == f64::INFINITY {
        return Err(Error::TermEvaluation {
            index: n,
            source: Box::new(Error::Parameter(format!("term {v} is not a nonnegative finite number"))),
        });
    }
    Ok(v.max(0.0))
}

// Start of the last block [2^k, 2^(k+1) - 1] contained in [1, n].
fn last_block_start(n: u64) -> u64 {
    if n == 0 {
        return 1;
    }
    let k = (n + 1).ilog2() - 1;
    1u64 << k
}

pub fn scan(src: &mut TermSource<'_>, policy: &EnginePolicy) -> Result<ColumnStats> {
    let n_used = src.n_used(policy);
    let mut col = ColumnScan::new(n_used, policy);
    for n in 1..=n_used {
        let v = (src.generator)(n).map_err(|e| wrap(n, e))?;
        col.push(n, v)?;
    }
    Ok(col.finish())
}

pub(crate) fn wrap(n: u64, e: Error) -> Error {
    match e {
        e @ Error::TermEvaluation { .. } => e,
        other => Error::TermEvaluation {
            index: n,
            source: Box::new(other),
        },
    }
}

/// Result of [`fit_exponent`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FitOutcome {
    Fitted(ExponentFit),
    /// Every block in the window summed to zero.
    EventuallyZero,
    /// Too few blocks, or zero blocks mixed with positive ones.
    Insufficient,
}

struct LineFit {
    slope: f64,
    half_width: f64,
}

fn line_fit(xs: &[f64], ys: &[f64]) -> LineFit {
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let half_width = if xs.len() > 2 {
        let ssr: f64 = xs
            .iter()
            .zip(ys)
            .map(|(x, y)| (y - my - slope * (x - mx)).powi(2))
            .sum();
        let dof = m - 2.0;
        let se = (ssr / dof / sxx).sqrt();
        let t = StudentsT::new(0.0, 1.0, dof).map(|d| d.inverse_cdf(0.975)).unwrap_or(f64::INFINITY);
        t * se
    } else {
        f64::INFINITY
    };
    LineFit { slope, half_width }
}

// Fits ln(value_k) = c + slope * k ln 2 over the trailing window and maps
// the slope to an exponent with `to_exponent`.
fn fit_window(
    blocks: &[BlockStat],
    value: impl Fn(&BlockStat) -> f64,
    to_exponent: impl Fn(f64) -> f64,
    policy: &EnginePolicy,
) -> FitOutcome {
    let m = blocks.len().min(policy.dyadic_window as usize);
    let first = blocks.len() - m;
    let window = &blocks[first..];
    if m > 0 && window.iter().all(|b| value(b) == 0.0) {
        return FitOutcome::EventuallyZero;
    }
    if m < 3 || window.iter().any(|b| value(b) <= 0.0) {
        return FitOutcome::Insufficient;
    }
    let ln2 = std::f64::consts::LN_2;
    let xs: Vec<f64> = (first..blocks.len()).map(|k| k as f64 * ln2).collect();
    let ys: Vec<f64> = window.iter().map(|b| value(b).ln()).collect();
    let all = line_fit(&xs, &ys);
    let p_hat = to_exponent(all.slope);
    let ci = all.half_width.max(policy.ci_floor);
    let h = m / 2;
    let p_limit = if h >= 2 && m - h >= 2 {
        let (s1, s2) = (line_fit(&xs[..h], &ys[..h]), line_fit(&xs[h..], &ys[h..]));
        let (k1, k2) = (mean(&xs[..h]), mean(&xs[h..]));
        let (p1, p2) = (to_exponent(s1.slope), to_exponent(s2.slope));
        (k2 * p2 - k1 * p1) / (k2 - k1)
    } else {
        p_hat
    };
    FitOutcome::Fitted(ExponentFit {
        p_hat,
        ci,
        p_limit,
        first_block: first as u32,
        blocks: m as u32,
    })
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Series exponent from block sums: `B_k ~ 2^(k(1-p))`.
pub fn fit_stats(stats: &ColumnStats, policy: &EnginePolicy) -> FitOutcome {
    fit_window(&stats.blocks, |b| b.sum, |s| 1.0 - s, policy)
}

/// Least-squares decay exponent of a source over its trailing dyadic blocks.
pub fn fit_exponent(src: &mut TermSource<'_>, policy: &EnginePolicy) -> Result<FitOutcome> {
    policy.validate()?;
    Ok(fit_stats(&scan(src, policy)?, policy))
}

pub fn analyze_series(src: &mut TermSource<'_>, policy: &EnginePolicy) -> Result<SeriesVerdict> {
    policy.validate()?;
    let stats = scan(src, policy)?;
    Ok(classify_series(&stats, src.hint, policy))
}

pub fn null_sequence_test(src: &mut TermSource<'_>, policy: &EnginePolicy) -> Result<NullVerdict> {
    policy.validate()?;
    let stats = scan(src, policy)?;
    Ok(classify_null(&stats, src.hint, policy))
}

/// `[lower, upper]` bracket on `sum_{n > N} c n^(-p)` from the integral test.
fn tail_bracket(c: f64, p: f64, n: u64) -> (f64, f64) {
    let n = n as f64;
    let lower = c * (n + 1.0).powf(1.0 - p) / (p - 1.0);
    let upper = c * n.powf(1.0 - p) / (p - 1.0);
    (lower, upper)
}

fn bracketed(total: f64, c: f64, p: f64, n: u64, policy: &EnginePolicy) -> Option<SeriesClass> {
    let (lower, upper) = tail_bracket(c, p, n);
    let tail_bound = upper - lower;
    (tail_bound < policy.tail_tolerance).then_some(SeriesClass::Converges {
        sum_estimate: total + lower,
        tail_bound,
    })
}

fn exact_sum(total: f64) -> SeriesClass {
    SeriesClass::Converges {
        sum_estimate: total,
        tail_bound: 0.0,
    }
}

fn eventually_zero(stats: &ColumnStats) -> bool {
    stats.last_nonzero.is_none_or(|n| n < stats.tail_start)
}

pub fn classify_series(stats: &ColumnStats, hint: Option<AnalyticHint>, policy: &EnginePolicy) -> SeriesVerdict {
    let fit = match fit_stats(stats, policy) {
        FitOutcome::Fitted(f) => Some(f),
        _ => None,
    };
    let class = match hint {
        Some(h) => classify_with_hint(stats, h, policy),
        None => classify_from_data(stats, fit, policy),
    };
    SeriesVerdict {
        class,
        n_used: stats.n_used,
        partial_sum: stats.total,
        fit,
        hint,
        policy: *policy,
    }
}

fn classify_with_hint(stats: &ColumnStats, hint: AnalyticHint, policy: &EnginePolicy) -> SeriesClass {
    match hint {
        AnalyticHint::EventuallyZero => exact_sum(stats.total),
        AnalyticHint::EventuallyConstant { value } if value == 0.0 => exact_sum(stats.total),
        AnalyticHint::EventuallyConstant { .. } => SeriesClass::Diverges {
            evidence: DivergenceEvidence::ExponentFit { p_hat: 0.0, ci: 0.0 },
        },
        AnalyticHint::PowerLaw { constant, .. } if constant == 0.0 => exact_sum(stats.total),
        AnalyticHint::PowerLaw { constant, exponent } => {
            if exponent > 1.0 {
                bracketed(stats.total, constant, exponent, stats.n_used, policy).unwrap_or(
                    SeriesClass::Inconclusive {
                        p_hat: Some(exponent),
                        ci: Some(0.0),
                    },
                )
            } else {
                SeriesClass::Diverges {
                    evidence: DivergenceEvidence::ExponentFit {
                        p_hat: exponent,
                        ci: 0.0,
                    },
                }
            }
        }
    }
}

fn classify_from_data(stats: &ColumnStats, fit: Option<ExponentFit>, policy: &EnginePolicy) -> SeriesClass {
    if let Some(n) = stats.blowup_at {
        return SeriesClass::Diverges {
            evidence: DivergenceEvidence::PartialSumBlowup {
                threshold: policy.blowup_threshold,
                crossed_at: n,
            },
        };
    }
    if eventually_zero(stats) {
        return exact_sum(stats.total);
    }
    let Some(f) = fit else {
        return SeriesClass::Inconclusive { p_hat: None, ci: None };
    };
    let inconclusive = SeriesClass::Inconclusive {
        p_hat: Some(f.p_hat),
        ci: Some(f.ci),
    };
    let lo = f.p_hat.min(f.p_limit) - f.ci;
    let hi = f.p_hat.max(f.p_limit) + f.ci;
    if lo > 1.0 + policy.exponent_margin {
        // Constant of the tail law from the last complete block, whose sum
        // approximates the integral over [2^K - 1/2, 2^(K+1) - 1/2].
        let last = stats.blocks.last().expect("fit implies blocks");
        let k = (stats.blocks.len() - 1) as i32;
        let (a, b) = (2f64.powi(k) - 0.5, 2f64.powi(k + 1) - 0.5);
        let p = f.p_hat;
        let integral = (a.powf(1.0 - p) - b.powf(1.0 - p)) / (p - 1.0);
        let c = last.sum / integral;
        bracketed(stats.total, c, p, stats.n_used, policy).unwrap_or(inconclusive)
    } else if lo <= 1.0 && hi <= 1.0 + policy.exponent_margin {
        SeriesClass::Diverges {
            evidence: DivergenceEvidence::ExponentFit { p_hat: f.p_hat, ci: f.ci },
        }
    } else {
        inconclusive
    }
}

pub fn classify_null(stats: &ColumnStats, hint: Option<AnalyticHint>, policy: &EnginePolicy) -> NullVerdict {
    let fit = match fit_window(&stats.blocks, |b| b.max, |s| -s, policy) {
        FitOutcome::Fitted(f) => Some(f),
        _ => None,
    };
    let class = match hint {
        Some(AnalyticHint::EventuallyZero) => NullClass::TendsToZero,
        Some(AnalyticHint::EventuallyConstant { value }) if value > 0.0 => NullClass::StaysAbove { level: value },
        Some(AnalyticHint::EventuallyConstant { .. }) => NullClass::TendsToZero,
        Some(AnalyticHint::PowerLaw { constant, exponent }) => {
            if constant == 0.0 || exponent > 0.0 {
                NullClass::TendsToZero
            } else {
                NullClass::StaysAbove { level: constant }
            }
        }
        None => null_from_data(stats, fit, policy),
    };
    NullVerdict {
        class,
        n_used: stats.n_used,
        last_block_max: stats.tail_max,
        fit,
        hint,
    }
}

fn null_from_data(stats: &ColumnStats, fit: Option<ExponentFit>, policy: &EnginePolicy) -> NullClass {
    if stats.tail_max < policy.null_tolerance {
        return NullClass::TendsToZero;
    }
    let Some(f) = fit else {
        return NullClass::Inconclusive;
    };
    let m = f.blocks as usize;
    let floor = stats.blocks[stats.blocks.len() - m..]
        .iter()
        .map(|b| b.max)
        .fold(f64::INFINITY, f64::min);
    if f.p_hat - f.ci > policy.exponent_margin {
        NullClass::TendsToZero
    } else if f.p_hat + f.ci <= policy.exponent_margin && floor > policy.null_tolerance {
        NullClass::StaysAbove { level: floor }
    } else {
        NullClass::Inconclusive
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn policy() -> EnginePolicy {
        EnginePolicy::default()
    }

    fn power(p: f64) -> TermSource<'static> {
        TermSource::new(move |n| Ok((n as f64).powf(-p)))
    }

    #[test]
    fn block_layout() {
        assert_eq!(last_block_start(1), 1);
        assert_eq!(last_block_start(2), 1);
        assert_eq!(last_block_start(3), 2);
        assert_eq!(last_block_start(1_000_000), 1 << 18);
    }

    #[test]
    fn harmonic_diverges() {
        let v = analyze_series(&mut power(1.0), &policy()).unwrap();
        assert!(v.diverges(), "{v:?}");
    }

    #[test]
    fn basel_sum() {
        let v = analyze_series(&mut power(2.0), &policy()).unwrap();
        match v.class {
            SeriesClass::Converges { sum_estimate, tail_bound } => {
                let zeta2 = std::f64::consts::PI.powi(2) / 6.0;
                assert!((sum_estimate - zeta2).abs() < 1e-9, "{sum_estimate}");
                assert!(tail_bound < 1e-6);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sine_of_inverse_sqrt_diverges() {
        let mut src = TermSource::new(|n| Ok((n as f64).powf(-0.5).sin()));
        let v = analyze_series(&mut src, &policy()).unwrap();
        assert!(v.diverges());
        let f = v.fit.unwrap();
        assert!((f.p_hat - 0.5).abs() < 0.01, "{f:?}");
    }

    #[test]
    fn exact_power_fit() {
        let FitOutcome::Fitted(f) = fit_exponent(&mut power(1.5), &policy()).unwrap() else {
            panic!()
        };
        assert!((f.p_hat - 1.5).abs() < 0.01);
        assert!(f.ci <= 0.01);
    }

    #[test]
    fn zero_source_is_eventually_zero() {
        let mut src = TermSource::new(|_| Ok(0.0));
        let p = policy().with_n_max(1024);
        assert_eq!(fit_exponent(&mut src, &p).unwrap(), FitOutcome::EventuallyZero);
        let v = analyze_series(&mut TermSource::new(|n| Ok(if n < 10 { 1.0 } else { 0.0 })), &p).unwrap();
        assert_eq!(
            v.class,
            SeriesClass::Converges {
                sum_estimate: 9.0,
                tail_bound: 0.0
            }
        );
    }

    #[test]
    fn log_refined_boundary_is_inconclusive() {
        let mut src = TermSource::new(|n| {
            let x = n as f64 + 1.0;
            Ok(1.0 / (x * x.ln().powi(2)))
        });
        let v = analyze_series(&mut src, &policy()).unwrap();
        assert!(matches!(v.class, SeriesClass::Inconclusive { .. }), "{v:?}");
    }

    #[test]
    fn blowup_is_reported_with_index() {
        let mut src = TermSource::new(|n| Ok(n as f64));
        let v = analyze_series(&mut src, &policy().with_n_max(10_000)).unwrap();
        // 1 + ... + 1414 = 1000405 is the first partial sum above 10^6.
        assert!(matches!(
            v.class,
            SeriesClass::Diverges {
                evidence: DivergenceEvidence::PartialSumBlowup { crossed_at: 1414, .. }
            }
        ));
    }

    #[test]
    fn negative_term_reports_index() {
        let mut src = TermSource::new(|n| Ok(if n == 7 { -1.0 } else { 1.0 }));
        let err = analyze_series(&mut src, &policy().with_n_max(256)).unwrap_err();
        assert!(matches!(err, Error::TermEvaluation { index: 7, .. }));
        let mut tiny = TermSource::new(|n| Ok(if n == 7 { -1e-13 } else { (n as f64).powi(-2) }));
        assert!(analyze_series(&mut tiny, &policy().with_n_max(256)).is_ok());
    }

    #[test]
    fn generator_errors_carry_index() {
        let mut src = TermSource::new(|n| {
            if n == 300 {
                Err(Error::Representation("boom".into()))
            } else {
                Ok(1.0)
            }
        });
        let err = analyze_series(&mut src, &policy().with_n_max(512)).unwrap_err();
        assert!(matches!(err, Error::TermEvaluation { index: 300, .. }));
    }

    #[test]
    fn null_tests() {
        let p = policy();
        assert!(null_sequence_test(&mut power(1.0), &p).unwrap().tends_to_zero());
        let c = null_sequence_test(&mut TermSource::new(|_| Ok(1.0)), &p).unwrap();
        assert_eq!(c.class, NullClass::StaysAbove { level: 1.0 });
    }

    #[test]
    fn hints_decide_the_class() {
        let p = policy().with_n_max(4096);
        let hinted = power(0.5).with_hint(Some(AnalyticHint::PowerLaw {
            constant: 1.0,
            exponent: 0.5,
        }));
        let v = analyze_series(&mut { hinted }, &p).unwrap();
        assert_eq!(
            v.class,
            SeriesClass::Diverges {
                evidence: DivergenceEvidence::ExponentFit { p_hat: 0.5, ci: 0.0 }
            }
        );
        assert!(v.fit.is_some());
    }

    #[test]
    fn slices_respect_their_length() {
        let terms: Vec<f64> = (1..=1000).map(|n| 1.0 / n as f64).collect();
        let v = analyze_series(&mut TermSource::from_slice(&terms), &policy()).unwrap();
        assert_eq!(v.n_used, 1000);
    }
}
