//! Term generators and checkers for the convergence modes.

pub mod check;
pub mod params;
pub mod tag;
pub mod terms;

pub use crate::testfn::TestFunction;
pub use check::{check_mode, check_modes, probes_for, scan_kinds, Certificate, RowObserver, scan_columns, ModeReport, ProbeOutcome, ProbeReport, Verdict};
pub use params::ModeParams;
pub use tag::ModeTag;
pub use terms::{
    limit_terms, term_cc, term_s1d, term_s1star, term_s2d, term_s3d, term_sa_as, term_slinf, term_slp,
    term_truncated, LimitProbe, MemberTerms, TermEvaluator, TermKind,
};
