use serde::Serialize;

use super::families::{build_family, FamilySpec};
use crate::modes::{ModeReport, ModeTag, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Expected {
    Holds,
    Fails,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpectedEntry {
    pub mode: ModeTag,
    pub expected: Expected,
}

/// A verdict that is only established for other parameter values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AbsentEntry {
    pub mode: ModeTag,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ExpectedTable {
    pub entries: Vec<ExpectedEntry>,
    pub absent: Vec<AbsentEntry>,
}

impl ExpectedTable {
    pub fn get(&self, mode: ModeTag) -> Option<Expected> {
        self.entries.iter().find(|e| e.mode == mode).map(|e| e.expected)
    }

    fn push(&mut self, mode: ModeTag, expected: Expected) {
        self.entries.push(ExpectedEntry { mode, expected });
    }

    fn absent(&mut self, mode: ModeTag, reason: &str) {
        self.absent.push(AbsentEntry {
            mode,
            reason: reason.to_string(),
        });
    }
}

/// Golden verdicts established analytically for a family.
pub fn expected_verdicts(spec: &FamilySpec) -> ExpectedTable {
    use Expected::*;
    use ModeTag::*;
    let mut t = ExpectedTable::default();
    match *spec {
        FamilySpec::Ex31 { alpha } => {
            t.push(CompleteConvergence, Holds);
            t.push(S2d, Holds);
            if alpha > 1.0 {
                t.push(S1d, Fails);
                t.push(S3d, Fails);
            } else {
                t.absent(S1d, "failure is established for alpha > 1 only");
                t.absent(S3d, "failure is established for alpha > 1 only");
            }
        }
        FamilySpec::Ex32 { alpha, beta } => {
            for m in [SLInf, SLp, CompleteConvergence, S1d, S1StarD, S3d] {
                t.push(m, Holds);
            }
            if (1.0 - alpha) * beta <= 1.0 {
                t.push(S2d, Fails);
            } else {
                t.absent(S2d, "failure is established for (1 - alpha) beta <= 1 only");
            }
        }
        FamilySpec::Ex33 => {
            t.push(SAlphaAs, Holds);
            t.push(S1d, Fails);
            t.push(S3d, Fails);
        }
        FamilySpec::Constant { .. } => {
            for m in ModeTag::ALL {
                t.push(m, Holds);
            }
        }
        FamilySpec::Shift { .. } => {
            t.push(SLInf, Holds);
            let lipschitz = build_family(spec).map(|f| f.limit_cdf_is_lipschitz()).unwrap_or(false);
            if lipschitz {
                t.push(S2d, Holds);
            } else {
                t.absent(S2d, "convergence is established for locally Lipschitz limit laws only");
            }
        }
    }
    t
}

/// Holds, or NotFalsified with every probe decided by an analytic hint.
pub fn holds_or_hinted(report: &ModeReport) -> bool {
    match report.verdict {
        Verdict::Holds => true,
        Verdict::NotFalsified => report.probes.iter().all(|p| match &p.outcome {
            crate::modes::ProbeOutcome::Series(v) => v.hint.is_some(),
            crate::modes::ProbeOutcome::Null(v) => v.hint.is_some(),
        }),
        _ => false,
    }
}

/// Whether a computed verdict matches the golden one.
pub fn agrees(expected: Expected, report: &ModeReport) -> bool {
    match expected {
        Expected::Holds => holds_or_hinted(report),
        Expected::Fails => report.verdict.is_fails(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ex31_regimes() {
        let t = expected_verdicts(&FamilySpec::Ex31 { alpha: 2.0 });
        assert_eq!(t.get(ModeTag::S1d), Some(Expected::Fails));
        let t = expected_verdicts(&FamilySpec::Ex31 { alpha: 0.5 });
        assert_eq!(t.get(ModeTag::S1d), None);
        assert!(t.absent.iter().any(|a| a.mode == ModeTag::S1d));
    }

    #[test]
    fn ex32_boundary() {
        let t = expected_verdicts(&FamilySpec::Ex32 { alpha: 0.5, beta: 2.0 });
        assert_eq!(t.get(ModeTag::S2d), Some(Expected::Fails));
        assert_eq!(t.get(ModeTag::SLInf), Some(Expected::Holds));
        let t = expected_verdicts(&FamilySpec::Ex32 { alpha: 0.4, beta: 2.0 });
        assert_eq!(t.get(ModeTag::S2d), None);
    }

    #[test]
    fn ex33_table() {
        let t = expected_verdicts(&FamilySpec::Ex33);
        assert_eq!(t.get(ModeTag::SAlphaAs), Some(Expected::Holds));
        assert_eq!(t.get(ModeTag::S3d), Some(Expected::Fails));
    }
}
