use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A sample point of the standard probability space `((0,1), Borel, Lebesgue)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct OmegaPoint(f64);

impl OmegaPoint {
    pub fn new(value: f64) -> Result<Self> {
        if value > 0.0 && value < 1.0 {
            Ok(Self(value))
        } else {
            Err(Error::Parameter(format!("omega must lie in (0,1), got {value}")))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// The first `count` points of the base-2 van der Corput sequence,
    /// starting at index 1 (0.5, 0.25, 0.75, ...).
    pub fn van_der_corput(count: usize) -> Vec<OmegaPoint> {
        (1..=count as u64)
            .map(|i| {
                let mut k = i;
                let mut denom = 1.0;
                let mut v = 0.0;
                while k > 0 {
                    denom *= 2.0;
                    v += (k & 1) as f64 / denom;
                    k >>= 1;
                }
                OmegaPoint(v)
            })
            .collect()
    }
}

impl TryFrom<f64> for OmegaPoint {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Self::new(value)
    }
}

impl From<OmegaPoint> for f64 {
    fn from(p: OmegaPoint) -> f64 {
        p.0
    }
}
