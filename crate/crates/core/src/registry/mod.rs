//! Catalog of example families, the implication diagram between modes, and
//! the harness that checks one against the other.

mod catalog;
mod diagram;
mod expected;
mod families;
mod sweep;
mod verify;

pub use catalog::{catalog, catalog_json, Catalog, CatalogEntry};
pub use diagram::{ImplicationDiagram, NonEdge};
pub use expected::{agrees, expected_verdicts, holds_or_hinted, AbsentEntry, Expected, ExpectedEntry, ExpectedTable};
pub use families::{build_family, FamilySpec, RegistryFamily};
pub use sweep::{
    evaluate, run_families, run_family, soundness_sweep, CoverageGap, FamilyResult, GoldenMismatch, NonEdgeResult,
    NonEdgeStatus, SweepReport, Violation, SCHEMA_VERSION,
};
pub use verify::{
    verify_lipschitz_s2d, verify_truncation_s1star, ConverseCheck, LipschitzReport, LipschitzWitness, ProofBound,
    SplittingCheck, TruncationReport, WitnessCheck, SANDWICH_SLACK, SPLITTING_N, SPLITTING_SLACK,
};
