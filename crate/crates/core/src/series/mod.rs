//! Classification of nonnegative series and null sequences.

pub mod csv;
pub mod engine;
pub mod policy;
pub mod verdict;

pub use engine::{
    analyze_series, classify_null, classify_series, fit_exponent, null_sequence_test, ColumnScan, ColumnStats,
    FitOutcome, TermSource,
};
pub use policy::EnginePolicy;
pub use verdict::{AnalyticHint, DivergenceEvidence, ExponentFit, NullClass, NullVerdict, SeriesClass, SeriesVerdict};
