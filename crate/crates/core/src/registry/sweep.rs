use rayon::prelude::*;
use serde::Serialize;

use super::diagram::{ImplicationDiagram, NonEdge};
use super::expected::{agrees, expected_verdicts, holds_or_hinted, Expected};
use super::families::{build_family, FamilySpec};
use crate::error::Result;
use crate::family::SequenceFamily;
use crate::modes::{check_modes, ModeParams, ModeReport, ModeTag};
use crate::series::EnginePolicy;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyResult {
    pub label: String,
    pub spec: FamilySpec,
    pub reports: Vec<ModeReport>,
}

impl FamilyResult {
    pub fn report(&self, mode: ModeTag) -> Option<&ModeReport> {
        self.reports.iter().find(|r| r.mode == mode)
    }
}

/// A family where `antecedent` is not contradicted while consequences of
/// it under the closure fail.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub family: String,
    pub antecedent: ModeTag,
    pub antecedent_verdict: String,
    pub failing: Vec<ModeTag>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NonEdgeStatus {
    Reproduced,
    NotReproduced,
    NoWitness,
    WitnessNotSwept,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonEdgeResult {
    pub from: ModeTag,
    pub to: ModeTag,
    pub witness: Option<String>,
    pub status: NonEdgeStatus,
    pub from_verdict: Option<String>,
    pub to_verdict: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageGap {
    pub family: String,
    pub mode: ModeTag,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GoldenMismatch {
    pub family: String,
    pub mode: ModeTag,
    pub expected: Expected,
    pub actual: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub schema_version: u32,
    pub policy: EnginePolicy,
    pub families: Vec<FamilyResult>,
    pub violations: Vec<Violation>,
    pub non_edges: Vec<NonEdgeResult>,
    pub contradictions: Vec<NonEdge>,
    pub coverage_gaps: Vec<CoverageGap>,
    pub golden_mismatches: Vec<GoldenMismatch>,
}

impl SweepReport {
    /// No violations, no contradictions, every witnessed non-edge reproduced
    /// and every golden verdict matched.
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
            && self.contradictions.is_empty()
            && self.golden_mismatches.is_empty()
            && self
                .non_edges
                .iter()
                .all(|n| !matches!(n.status, NonEdgeStatus::NotReproduced))
    }
}

/// Checks every mode on one family with its default probes.
pub fn run_family(spec: &FamilySpec, policy: &EnginePolicy) -> Result<FamilyResult> {
    let family = build_family(spec)?;
    let params = ModeParams::defaults_for(&family);
    let reports = check_modes(&family, &ModeTag::ALL, &params, policy, None)?;
    Ok(FamilyResult {
        label: family.label(),
        spec: spec.clone(),
        reports,
    })
}

/// Runs families in parallel; results keep the input order.
pub fn run_families(specs: &[FamilySpec], policy: &EnginePolicy) -> Result<Vec<FamilyResult>> {
    specs.par_iter().map(|s| run_family(s, policy)).collect()
}

pub fn soundness_sweep(
    diagram: &ImplicationDiagram,
    specs: &[FamilySpec],
    policy: &EnginePolicy,
) -> Result<SweepReport> {
    policy.validate()?;
    let families = run_families(specs, policy)?;
    Ok(evaluate(diagram, families, policy))
}

/// Judges precomputed family results against a diagram.
pub fn evaluate(diagram: &ImplicationDiagram, families: Vec<FamilyResult>, policy: &EnginePolicy) -> SweepReport {
    let closure = diagram.closure();
    let mut violations = Vec::new();
    let mut coverage_gaps = Vec::new();
    let mut golden_mismatches = Vec::new();
    for fam in &families {
        for r in &fam.reports {
            if matches!(r.verdict, crate::modes::Verdict::Inconclusive) {
                coverage_gaps.push(CoverageGap {
                    family: fam.label.clone(),
                    mode: r.mode,
                });
            }
            if !r.verdict.is_positive() {
                continue;
            }
            let failing: Vec<ModeTag> = closure
                .iter()
                .filter(|&&(a, _)| a == r.mode)
                .filter_map(|&(_, b)| fam.report(b).filter(|rb| rb.verdict.is_fails()).map(|_| b))
                .collect();
            if !failing.is_empty() {
                violations.push(Violation {
                    family: fam.label.clone(),
                    antecedent: r.mode,
                    antecedent_verdict: r.verdict.name().to_string(),
                    failing,
                });
            }
        }
        for e in expected_verdicts(&fam.spec).entries {
            if let Some(r) = fam.report(e.mode) {
                if !agrees(e.expected, r) {
                    golden_mismatches.push(GoldenMismatch {
                        family: fam.label.clone(),
                        mode: e.mode,
                        expected: e.expected,
                        actual: r.verdict.name().to_string(),
                    });
                }
            }
        }
    }
    let non_edges = diagram
        .non_edges
        .iter()
        .map(|ne| {
            let witness = ne.witness.as_ref().map(|w| w.to_string());
            let Some(spec) = &ne.witness else {
                return NonEdgeResult {
                    from: ne.from,
                    to: ne.to,
                    witness,
                    status: NonEdgeStatus::NoWitness,
                    from_verdict: None,
                    to_verdict: None,
                };
            };
            let found = families.iter().find(|f| &f.spec == spec);
            let (from, to) = match found {
                Some(f) => (f.report(ne.from), f.report(ne.to)),
                None => (None, None),
            };
            let status = match (from, to) {
                (Some(a), Some(b)) if holds_or_hinted(a) && b.verdict.is_fails() => NonEdgeStatus::Reproduced,
                (Some(_), Some(_)) => NonEdgeStatus::NotReproduced,
                _ => NonEdgeStatus::WitnessNotSwept,
            };
            NonEdgeResult {
                from: ne.from,
                to: ne.to,
                witness,
                status,
                from_verdict: from.map(|r| r.verdict.name().to_string()),
                to_verdict: to.map(|r| r.verdict.name().to_string()),
            }
        })
        .collect();
    SweepReport {
        schema_version: SCHEMA_VERSION,
        policy: *policy,
        families,
        violations,
        non_edges,
        contradictions: diagram.contradictions(),
        coverage_gaps,
        golden_mismatches,
    }
}
