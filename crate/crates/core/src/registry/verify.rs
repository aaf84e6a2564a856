use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::SequenceFamily;
use crate::measure::Cdf;
use crate::modes::{check_modes, scan_columns, scan_kinds, ModeParams, RowObserver, ModeReport, ModeTag, TermKind, TestFunction};
use crate::series::{classify_series, EnginePolicy, SeriesVerdict};
use crate::summation::NeumaierSum;

/// Slack allowed in the shift sandwich bound.
pub const SANDWICH_SLACK: f64 = 1e-12;
/// Slack allowed in the truncation splitting bound.
pub const SPLITTING_SLACK: f64 = 1e-9;
/// Indices checked against the splitting bound.
pub const SPLITTING_N: u64 = 10_000;

const GRID: usize = 400;

/// Claimed local Lipschitz constant `k` of the limit CDF on `(x - delta, x + delta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LipschitzWitness {
    pub k: f64,
    pub delta: f64,
    pub x: f64,
}

impl LipschitzWitness {
    pub fn new(k: f64, delta: f64, x: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite() && delta > 0.0 && delta.is_finite() && x.is_finite()) {
            return Err(Error::Parameter(format!("invalid Lipschitz witness k={k}, delta={delta}, x={x}")));
        }
        Ok(Self { k, delta, x })
    }

    /// Checks the bound between consecutive points of a uniform grid on the
    /// open neighbourhood, which by the triangle inequality covers all pairs
    /// of grid points.
    pub fn grid_test(&self, cdf: &Cdf) -> bool {
        let a = self.x - self.delta;
        let h = 2.0 * self.delta / GRID as f64;
        let pts: Vec<f64> = (1..GRID).map(|i| a + h * i as f64).collect();
        pts.windows(2).all(|w| {
            let du = w[1] - w[0];
            (cdf.eval(w[1]) - cdf.eval(w[0])).abs() <= self.k * du * (1.0 + 1e-9) + 1e-15
                && (cdf.eval(w[0]) - cdf.left_limit(w[0])) == 0.0
        })
    }
}

/// Numerical form of the bound `sum <= prefix + K * sum_{n >= n0} a_n`,
/// all sums over `n <= n_max`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProofBound {
    /// First index with shift below `delta`.
    pub n0: Option<u64>,
    pub prefix: f64,
    pub shift_tail: f64,
    pub bound: f64,
    pub observed: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessCheck {
    pub witness: LipschitzWitness,
    /// Whether the witness passed its grid test.
    pub hypothesis_holds: bool,
    pub s2d: SeriesVerdict,
    /// Largest `term - sandwich bound` seen, after allowing for rounding of
    /// the shifted arguments.
    pub sandwich_excess: f64,
    pub sandwich_holds: bool,
    pub proof_bound: ProofBound,
}

impl WitnessCheck {
    /// Consistent with the implication: either the hypothesis fails or every
    /// conclusion checks out.
    pub fn consistent(&self, slinf_holds: bool) -> bool {
        self.sandwich_holds
            && (!(self.hypothesis_holds && slinf_holds) || (self.s2d.converges() && self.proof_bound.holds))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LipschitzReport {
    pub family: String,
    pub slinf: ModeReport,
    pub witnesses: Vec<WitnessCheck>,
    pub passed: bool,
}

/// Checks the locally-Lipschitz route to S2-d convergence on a shift family.
pub fn verify_lipschitz_s2d(
    family: &dyn SequenceFamily,
    witnesses: &[LipschitzWitness],
    policy: &EnginePolicy,
) -> Result<LipschitzReport> {
    if family.shift(1).is_none() {
        return Err(Error::Precondition(format!("{} is not a shift family", family.label())));
    }
    if witnesses.is_empty() {
        return Err(Error::Parameter("no Lipschitz witnesses given".into()));
    }
    let cdf = family.limit().cdf();
    for w in witnesses {
        if !cdf.is_continuity_point(w.x) {
            return Err(Error::Witness(format!("x={} is a jump point of the limit", w.x)));
        }
    }
    let mut params = ModeParams::defaults_for(family);
    params.x_points = witnesses.iter().map(|w| w.x).collect();

    let m = witnesses.len();
    let mut excess = vec![f64::NEG_INFINITY; m];
    let mut n0: Vec<Option<u64>> = vec![None; m];
    let mut prefix = vec![NeumaierSum::new(); m];
    let mut observed = vec![NeumaierSum::new(); m];
    let mut shift_tail = vec![NeumaierSum::new(); m];
    let modes = [ModeTag::SLInf, ModeTag::S2d];
    let kinds = scan_columns(&modes, &params)?;
    let cols: Vec<usize> = witnesses
        .iter()
        .map(|w| kinds.iter().position(|k| *k == TermKind::S2d { x: w.x }).expect("probed"))
        .collect();
    let mut shift_missing = None;
    let mut observer = |n: u64, row: &[f64]| {
        let Some(a) = family.shift(n) else {
            shift_missing.get_or_insert(n);
            return;
        };
        for (i, w) in witnesses.iter().enumerate() {
            let term = row[cols[i]];
            let f = cdf.eval(w.x);
            let (up, down) = (cdf.eval(w.x + a) - f, f - cdf.eval(w.x - a));
            // Rounding of x -/+ a moves F by up to the local slope times an ulp.
            let slope = if a > 0.0 { up.max(down) / a } else { 0.0 };
            let rounding = 4.0 * f64::EPSILON * (w.x.abs() + a) * slope;
            excess[i] = excess[i].max(term - (up + down) - rounding);
            observed[i].add(term);
            if n0[i].is_none() && a < w.delta {
                n0[i] = Some(n);
            }
            if n0[i].is_some() {
                shift_tail[i].add(a);
            } else {
                prefix[i].add(term);
            }
        }
    };
    let mut reports = {
        let obs: RowObserver<'_> = &mut observer;
        check_modes(family, &modes, &params, policy, Some((&mut Vec::new(), obs)))?
    };
    if let Some(n) = shift_missing {
        return Err(Error::Precondition(format!("shift undefined at n={n}")));
    }
    let s2d = reports.pop().expect("two reports");
    let slinf = reports.pop().expect("two reports");
    let slinf_holds = slinf.verdict.is_holds();

    let checks: Vec<WitnessCheck> = witnesses
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let series = s2d
                .probes
                .iter()
                .find(|p| p.kind == TermKind::S2d { x: w.x })
                .and_then(|p| p.outcome.series())
                .cloned()
                .expect("series probe");
            let pre = prefix[i].value();
            let tail = shift_tail[i].value();
            let bound = pre + w.k * tail;
            let obs = observed[i].value();
            WitnessCheck {
                witness: *w,
                hypothesis_holds: w.grid_test(&cdf),
                s2d: series,
                sandwich_excess: excess[i],
                sandwich_holds: excess[i] <= SANDWICH_SLACK,
                proof_bound: ProofBound {
                    n0: n0[i],
                    prefix: pre,
                    shift_tail: tail,
                    bound,
                    observed: obs,
                    holds: obs <= bound * (1.0 + 1e-12) + SANDWICH_SLACK,
                },
            }
        })
        .collect();
    let passed = checks.iter().all(|c| c.consistent(slinf_holds));
    Ok(LipschitzReport {
        family: family.label(),
        slinf,
        witnesses: checks,
        passed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplittingCheck {
    pub f: TestFunction,
    /// Largest `term - (K * truncated + 2M * cc)` over `n <= SPLITTING_N`.
    pub max_excess: f64,
    pub holds: bool,
}

/// The truncated first moment recovered through `f_eps`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConverseCheck {
    pub f: TestFunction,
    pub s1star: SeriesVerdict,
    /// Largest `truncated - term` over `n <= SPLITTING_N`.
    pub max_excess: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncationReport {
    pub family: String,
    pub eps: f64,
    pub truncated: SeriesVerdict,
    pub cc: ModeReport,
    /// Truncated terms summable and complete convergence not refuted.
    pub hypothesis_holds: bool,
    pub s1star: ModeReport,
    pub s1d: ModeReport,
    pub splitting: Vec<SplittingCheck>,
    pub converse: Option<ConverseCheck>,
    pub passed: bool,
}

/// Checks the truncated-moment route to S1*-d convergence.
pub fn verify_truncation_s1star(
    family: &dyn SequenceFamily,
    eps: f64,
    fs: &[TestFunction],
    policy: &EnginePolicy,
) -> Result<TruncationReport> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Parameter(format!("epsilon must be positive, got {eps}")));
    }
    if fs.is_empty() {
        return Err(Error::Parameter("no test functions given".into()));
    }
    for f in fs {
        f.validate()?;
    }
    let limit = family.limit();
    let (lo, hi) = limit.essential_range();
    let f_eps = (lo.is_finite() && hi.is_finite())
        .then(|| TestFunction::clamped_identity(limit.sup_norm(), eps))
        .transpose()?;

    // First pass: truncated moments, and the converse probe when available.
    let mut first = vec![TermKind::Truncated { eps }];
    if let Some(f) = f_eps {
        first.push(TermKind::S1star { f });
    }
    let keep = SPLITTING_N.min(policy.n_max) as usize;
    let mut trunc_terms = Vec::with_capacity(keep);
    let mut converse_excess = f64::NEG_INFINITY;
    let stats = {
        let mut obs = |n: u64, row: &[f64]| {
            if n as usize <= keep {
                trunc_terms.push(row[0]);
                if row.len() > 1 {
                    converse_excess = converse_excess.max(row[0] - row[1]);
                }
            }
        };
        scan_kinds(family, &first, policy, Some(&mut obs))?
    };
    let truncated = classify_series(&stats[0], family.term_hint(&first[0]), policy);
    let converse = f_eps.map(|f| ConverseCheck {
        f,
        s1star: classify_series(&stats[1], family.term_hint(&first[1]), policy),
        max_excess: converse_excess,
        holds: converse_excess <= SPLITTING_SLACK,
    });

    // Second pass: the modes, with the splitting bound checked row by row.
    let mut params = ModeParams::defaults_for(family);
    params.epsilon = vec![eps];
    params.test_functions = fs.to_vec();
    let modes = [ModeTag::CompleteConvergence, ModeTag::S1StarD, ModeTag::S1d];
    let kinds = scan_columns(&modes, &params)?;
    let cc = kinds.iter().position(|k| *k == TermKind::Cc { eps }).expect("probed");
    let idx: Vec<(usize, usize)> = fs
        .iter()
        .map(|&f| (kinds.iter().position(|k| *k == TermKind::S1star { f }).expect("probed"), cc))
        .collect();
    let mut split_excess = vec![f64::NEG_INFINITY; fs.len()];
    let mut observer = |n: u64, row: &[f64]| {
        if n as usize > keep {
            return;
        }
        let t = trunc_terms[n as usize - 1];
        for (i, f) in fs.iter().enumerate() {
            let (s, c) = idx[i];
            let bound = f.lipschitz() * t + 2.0 * f.bound() * row[c];
            split_excess[i] = split_excess[i].max(row[s] - bound);
        }
    };
    let mut reports = {
        let obs: RowObserver<'_> = &mut observer;
        check_modes(family, &modes, &params, policy, Some((&mut Vec::new(), obs)))?
    };
    let s1d = reports.pop().expect("three reports");
    let s1star = reports.pop().expect("three reports");
    let cc = reports.pop().expect("three reports");
    let splitting: Vec<SplittingCheck> = fs
        .iter()
        .zip(&split_excess)
        .map(|(&f, &e)| SplittingCheck {
            f,
            max_excess: e,
            holds: e <= SPLITTING_SLACK,
        })
        .collect();
    let hypothesis_holds = truncated.converges() && cc.verdict.is_positive();
    let conclusion = s1star.verdict.is_positive();
    let passed = splitting.iter().all(|s| s.holds)
        && converse.as_ref().is_none_or(|c| c.holds)
        && (!hypothesis_holds || conclusion);
    Ok(TruncationReport {
        family: family.label(),
        eps,
        truncated,
        cc,
        hypothesis_holds,
        s1star,
        s1d,
        splitting,
        converse,
        passed,
    })
}
