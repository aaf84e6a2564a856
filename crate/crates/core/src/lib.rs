pub mod error;
pub mod measure;
pub mod quadrature;
pub mod summation;
pub mod testfn;

pub use error::{Error, Result};
pub mod series;
pub mod family;
pub mod modes;
pub mod registry;
