use serde::Serialize;

use super::diagram::ImplicationDiagram;
use super::expected::{expected_verdicts, ExpectedTable};
use super::families::FamilySpec;
use super::sweep::SCHEMA_VERSION;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CatalogEntry {
    pub label: String,
    pub spec: FamilySpec,
    pub expected: ExpectedTable,
}

/// Machine-readable listing of the families and the diagram.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Catalog {
    pub schema_version: u32,
    pub families: Vec<CatalogEntry>,
    pub diagram: ImplicationDiagram,
    pub closure: Vec<(crate::modes::ModeTag, crate::modes::ModeTag)>,
}

pub fn catalog(specs: &[FamilySpec], diagram: &ImplicationDiagram) -> Catalog {
    Catalog {
        schema_version: SCHEMA_VERSION,
        families: specs
            .iter()
            .map(|s| CatalogEntry {
                label: s.to_string(),
                spec: s.clone(),
                expected: expected_verdicts(s),
            })
            .collect(),
        diagram: diagram.clone(),
        closure: diagram.closure(),
    }
}

pub fn catalog_json(specs: &[FamilySpec], diagram: &ImplicationDiagram) -> String {
    serde_json::to_string_pretty(&catalog(specs, diagram)).expect("catalog serializes")
}
