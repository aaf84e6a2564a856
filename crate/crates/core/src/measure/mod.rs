//! Random variables on `((0,1), Lebesgue)` and their laws.

pub mod cdf;
pub mod density;
pub mod expect;
pub mod omega;
pub mod piece;
pub mod rv;

pub use cdf::{Atom, Cdf};
pub use density::DensitySpec;
pub use expect::{char_fn, coupled_expectation, expectation, Coupling, Estimate, Integrand};
pub use omega::OmegaPoint;
pub use piece::{AffineMap, Expr, Piece};
pub use rv::RandomVariable;
