//! Compensated accumulation.

/// Neumaier's variant of Kahan summation.
///
/// Unlike plain Kahan, the compensation stays correct when an addend is
/// larger in magnitude than the running sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }

    pub fn sum_iter<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
        let mut acc = Self::new();
        for v in iter {
            acc.add(v);
        }
        acc.value()
    }
}

impl Extend<f64> for NeumaierSum {
    fn extend<T: IntoIterator<Item = f64>>(&mut self, iter: T) {
        for v in iter {
            self.add(v);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancelled_small_terms() {
        // Naive summation returns 0 here.
        let values = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(NeumaierSum::sum_iter(values), 2.0);
    }

    #[test]
    fn harmonic_prefix_matches_reverse_order() {
        let forward = NeumaierSum::sum_iter((1..=100_000).map(|n| 1.0 / n as f64));
        let backward = NeumaierSum::sum_iter((1..=100_000).rev().map(|n| 1.0 / n as f64));
        assert!((forward - backward).abs() <= 2.0 * f64::EPSILON * forward);
    }
}
