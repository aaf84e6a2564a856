use serde::Serialize;

use super::params::ModeParams;
use super::tag::ModeTag;
use super::terms::{TermEvaluator, TermKind};
use crate::error::{Error, Result};
use crate::family::SequenceFamily;
use crate::series::engine::wrap;
use crate::series::{classify_null, classify_series, ColumnScan, EnginePolicy, NullClass, NullVerdict, SeriesClass, SeriesVerdict};

/// Family-supplied analytic bound on the terms of every probe of a mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    EventuallyZero,
    /// Terms are eventually at most `C n^(-exponent)` for each parameter value.
    PowerBound { exponent: f64 },
}

impl Certificate {
    /// Whether the bound proves the mode: summable for series modes,
    /// vanishing for limit modes.
    pub fn proves(&self, series: bool) -> bool {
        match *self {
            Certificate::EventuallyZero => true,
            Certificate::PowerBound { exponent } => {
                if series {
                    exponent > 1.0
                } else {
                    exponent > 0.0
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails { witness: String },
    NotFalsified,
    Inconclusive,
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Holds => "Holds",
            Verdict::Fails { .. } => "Fails",
            Verdict::NotFalsified => "NotFalsified",
            Verdict::Inconclusive => "Inconclusive",
        }
    }

    pub fn is_holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    pub fn is_fails(&self) -> bool {
        matches!(self, Verdict::Fails { .. })
    }

    /// Holds, or NotFalsified: nothing contradicts the mode.
    pub fn is_positive(&self) -> bool {
        matches!(self, Verdict::Holds | Verdict::NotFalsified)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "test", rename_all = "snake_case")]
pub enum ProbeOutcome {
    Series(SeriesVerdict),
    Null(NullVerdict),
}

impl ProbeOutcome {
    fn failed(&self) -> bool {
        match self {
            ProbeOutcome::Series(v) => v.diverges(),
            ProbeOutcome::Null(v) => matches!(v.class, NullClass::StaysAbove { .. }),
        }
    }

    fn passed(&self) -> bool {
        match self {
            ProbeOutcome::Series(v) => v.converges(),
            ProbeOutcome::Null(v) => v.tends_to_zero(),
        }
    }

    pub fn series(&self) -> Option<&SeriesVerdict> {
        match self {
            ProbeOutcome::Series(v) => Some(v),
            ProbeOutcome::Null(_) => None,
        }
    }

    pub fn null(&self) -> Option<&NullVerdict> {
        match self {
            ProbeOutcome::Null(v) => Some(v),
            ProbeOutcome::Series(_) => None,
        }
    }

    pub fn class_name(&self) -> &'static str {
        match self {
            ProbeOutcome::Series(v) => match v.class {
                SeriesClass::Converges { .. } => "Converges",
                SeriesClass::Diverges { .. } => "Diverges",
                SeriesClass::Inconclusive { .. } => "Inconclusive",
            },
            ProbeOutcome::Null(v) => match v.class {
                NullClass::TendsToZero => "TendsToZero",
                NullClass::StaysAbove { .. } => "StaysAbove",
                NullClass::Inconclusive => "Inconclusive",
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport {
    pub probe: String,
    pub kind: TermKind,
    pub outcome: ProbeOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeReport {
    pub mode: ModeTag,
    pub family: String,
    pub params: ModeParams,
    #[serde(flatten)]
    pub verdict: Verdict,
    pub certificate: Option<Certificate>,
    pub probes: Vec<ProbeReport>,
}

impl ModeReport {
    pub fn probe(&self, label: &str) -> Option<&ProbeReport> {
        self.probes.iter().find(|p| p.probe == label)
    }
}

/// Term sequences a mode is probed with, in fixed order.
pub fn probes_for(mode: ModeTag, params: &ModeParams) -> Result<Vec<TermKind>> {
    let omegas = || params.omega_points.iter().map(|&omega| TermKind::Pointwise { omega });
    let eps = || params.epsilon.iter().map(|&eps| TermKind::Cc { eps });
    let xs = || params.x_points.iter().map(|&x| TermKind::S2d { x });
    let fs = || params.test_functions.iter().map(|&f| TermKind::S1d { f });
    let kinds: Vec<TermKind> = match mode {
        ModeTag::AlmostSure => omegas().collect(),
        ModeTag::Probability | ModeTag::CompleteConvergence => eps().collect(),
        ModeTag::Lp | ModeTag::SLp => vec![TermKind::Slp { p: params.p }],
        ModeTag::LInf | ModeTag::SLInf => vec![TermKind::Slinf],
        ModeTag::Distribution => xs().chain(fs()).collect(),
        ModeTag::SAlphaAs => params
            .omega_points
            .iter()
            .map(|&omega| TermKind::SaAs {
                alpha: params.alpha,
                omega,
            })
            .collect(),
        ModeTag::S1d => fs().collect(),
        ModeTag::S1StarD => params.test_functions.iter().map(|&f| TermKind::S1star { f }).collect(),
        ModeTag::S2d => xs().collect(),
        ModeTag::S3d => params.t_points.iter().map(|&t| TermKind::S3d { t }).collect(),
    };
    if kinds.is_empty() {
        return Err(Error::Parameter(format!("mode {} has an empty probe set", mode.symbol())));
    }
    Ok(kinds)
}

/// Row observer for term export: receives `n` and the values of every
/// distinct term kind, in the order returned alongside.
pub type RowObserver<'a> = &'a mut dyn FnMut(u64, &[f64]);

/// Scans distinct term kinds jointly for `n = 1..=n_max`.
pub fn scan_kinds(
    family: &dyn SequenceFamily,
    kinds: &[TermKind],
    policy: &EnginePolicy,
    mut observer: Option<RowObserver<'_>>,
) -> Result<Vec<crate::series::ColumnStats>> {
    let ev = TermEvaluator::new(family, policy.quadrature);
    for k in kinds {
        ev.check(k)?;
    }
    let mut cols: Vec<ColumnScan> = kinds.iter().map(|_| ColumnScan::new(policy.n_max, policy)).collect();
    let mut row = vec![0.0; kinds.len()];
    for n in 1..=policy.n_max {
        let ctx = ev.at(n).map_err(|e| wrap(n, e))?;
        for (j, k) in kinds.iter().enumerate() {
            let v = ctx.term(k).map_err(|e| wrap(n, e))?;
            cols[j].push(n, v)?;
            row[j] = v;
        }
        if let Some(obs) = observer.as_mut() {
            obs(n, &row);
        }
    }
    Ok(cols.into_iter().map(ColumnScan::finish).collect())
}

fn dedupe<'k>(kinds: impl Iterator<Item = &'k TermKind>) -> Vec<TermKind> {
    let mut distinct: Vec<TermKind> = Vec::new();
    for k in kinds {
        if !distinct.contains(k) {
            distinct.push(*k);
        }
    }
    distinct
}

/// Column order of the joint scan performed by [`check_modes`].
pub fn scan_columns(modes: &[ModeTag], params: &ModeParams) -> Result<Vec<TermKind>> {
    let per_mode: Vec<Vec<TermKind>> = modes.iter().map(|&m| probes_for(m, params)).collect::<Result<_>>()?;
    Ok(dedupe(per_mode.iter().flatten()))
}

pub fn check_mode(
    family: &dyn SequenceFamily,
    mode: ModeTag,
    params: &ModeParams,
    policy: &EnginePolicy,
) -> Result<ModeReport> {
    Ok(check_modes(family, &[mode], params, policy, None)?.remove(0))
}

/// Checks several modes with one joint scan; identical term sequences are
/// evaluated once. Each verdict depends only on its own probes.
pub fn check_modes(
    family: &dyn SequenceFamily,
    modes: &[ModeTag],
    params: &ModeParams,
    policy: &EnginePolicy,
    observer: Option<(&mut Vec<TermKind>, RowObserver<'_>)>,
) -> Result<Vec<ModeReport>> {
    policy.validate()?;
    params.validate()?;
    let per_mode: Vec<Vec<TermKind>> = modes.iter().map(|&m| probes_for(m, params)).collect::<Result<_>>()?;
    let distinct = dedupe(per_mode.iter().flatten());
    let obs = match observer {
        Some((kinds_out, f)) => {
            kinds_out.clone_from(&distinct);
            Some(f)
        }
        None => None,
    };
    let stats = scan_kinds(family, &distinct, policy, obs)?;
    let mut reports = Vec::with_capacity(modes.len());
    for (&mode, kinds) in modes.iter().zip(&per_mode) {
        let probes: Vec<ProbeReport> = kinds
            .iter()
            .map(|k| {
                let s = &stats[distinct.iter().position(|d| d == k).expect("distinct covers probes")];
                let hint = family.term_hint(k);
                let outcome = if mode.is_series() {
                    ProbeOutcome::Series(classify_series(s, hint, policy))
                } else {
                    ProbeOutcome::Null(classify_null(s, hint, policy))
                };
                ProbeReport {
                    probe: k.label(),
                    kind: *k,
                    outcome,
                }
            })
            .collect();
        let certificate = family.certificate(mode, params);
        let verdict = aggregate(mode, &probes, certificate);
        reports.push(ModeReport {
            mode,
            family: family.label(),
            params: params.clone(),
            verdict,
            certificate,
            probes,
        });
    }
    Ok(reports)
}

fn aggregate(mode: ModeTag, probes: &[ProbeReport], certificate: Option<Certificate>) -> Verdict {
    if let Some(w) = probes.iter().find(|p| p.outcome.failed()) {
        return Verdict::Fails {
            witness: w.probe.clone(),
        };
    }
    if probes.iter().all(|p| p.outcome.passed()) {
        let certified = certificate.is_some_and(|c| c.proves(mode.is_series()));
        if mode.is_probe_complete() || certified {
            Verdict::Holds
        } else {
            Verdict::NotFalsified
        }
    } else {
        Verdict::Inconclusive
    }
}
