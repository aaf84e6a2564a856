use serde::Serialize;

use super::piece::Piece;
use crate::summation::NeumaierSum;

/// A point mass of the law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Atom {
    pub x: f64,
    pub mass: f64,
}

/// Distribution function of a piecewise random variable. Constant pieces
/// give atoms, smooth pieces give an absolutely continuous part.
#[derive(Debug, Clone, PartialEq)]
pub struct Cdf {
    smooth: Vec<Piece>,
    atoms: Vec<Atom>,
}

impl Cdf {
    pub(crate) fn from_pieces(pieces: Vec<Piece>) -> Self {
        let mut atoms: Vec<Atom> = Vec::new();
        let mut smooth = Vec::new();
        for p in pieces {
            match p.expr {
                super::piece::Expr::Constant { value } => atoms.push(Atom { x: value, mass: p.len() }),
                _ => smooth.push(p),
            }
        }
        atoms.sort_by(|a, b| a.x.total_cmp(&b.x));
        let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
        for a in atoms {
            match merged.last_mut() {
                Some(last) if last.x == a.x => last.mass += a.mass,
                _ => merged.push(a),
            }
        }
        Self { smooth, atoms: merged }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn jump_points(&self) -> Vec<f64> {
        self.atoms.iter().map(|a| a.x).collect()
    }

    pub fn has_continuous_part(&self) -> bool {
        !self.smooth.is_empty()
    }

    /// `P(X <= x)`.
    pub fn eval(&self, x: f64) -> f64 {
        let mut s = NeumaierSum::new();
        for a in self.atoms.iter().take_while(|a| a.x <= x) {
            s.add(a.mass);
        }
        s.add(self.continuous_part(x));
        s.value().clamp(0.0, 1.0)
    }

    /// `P(X < x)`.
    pub fn left_limit(&self, x: f64) -> f64 {
        let mut s = NeumaierSum::new();
        for a in self.atoms.iter().take_while(|a| a.x < x) {
            s.add(a.mass);
        }
        s.add(self.continuous_part(x));
        s.value().clamp(0.0, 1.0)
    }

    /// `P(X > x)`, summed directly rather than as `1 - F(x)`.
    pub fn survival(&self, x: f64) -> f64 {
        let mut s = NeumaierSum::new();
        for a in self.atoms.iter().rev().take_while(|a| a.x > x) {
            s.add(a.mass);
        }
        for p in &self.smooth {
            s.add(p.expr.measure_gt(x, p.start, p.end));
        }
        s.value().clamp(0.0, 1.0)
    }

    /// Mass of the smooth pieces at or below `x`.
    pub fn continuous_part(&self, x: f64) -> f64 {
        NeumaierSum::sum_iter(self.smooth.iter().map(|p| p.expr.measure_le(x, p.start, p.end)))
    }

    pub fn jump_at(&self, x: f64) -> f64 {
        self.atoms
            .binary_search_by(|a| a.x.total_cmp(&x))
            .map(|i| self.atoms[i].mass)
            .unwrap_or(0.0)
    }

    pub fn is_continuity_point(&self, x: f64) -> bool {
        self.jump_at(x) == 0.0
    }
}

#[cfg(test)]
mod tests {
    use super::super::density::DensitySpec;
    use super::super::rv::RandomVariable;

    #[test]
    fn two_point_law() {
        let x = RandomVariable::indicator_split(0.25, 1.0, 0.0).unwrap();
        let f = x.cdf();
        assert_eq!(f.eval(-0.1), 0.0);
        assert_eq!(f.eval(0.0), 0.75);
        assert_eq!(f.left_limit(0.0), 0.0);
        assert_eq!(f.eval(0.5), 0.75);
        assert_eq!(f.eval(1.0), 1.0);
        assert_eq!(f.survival(0.5), 0.25);
        assert_eq!(f.jump_at(1.0), 0.25);
        assert!(f.is_continuity_point(0.5));
        assert!(!f.is_continuity_point(0.0));
        assert_eq!(f.jump_points(), vec![0.0, 1.0]);
    }

    #[test]
    fn equal_constants_merge_into_one_atom() {
        let x = RandomVariable::indicator_split(0.5, 2.0, 2.0).unwrap();
        assert_eq!(x.cdf().atoms().len(), 1);
        assert_eq!(x.cdf().jump_at(2.0), 1.0);
    }

    #[test]
    fn quantile_law_matches_density_cdf() {
        let d = DensitySpec::power_at_one(0.5).unwrap();
        let x = RandomVariable::from_density(d).unwrap();
        let f = x.cdf();
        for y in [0.0, 0.1, 0.5, 0.9, 0.999, 1.0] {
            assert!((f.eval(y) - d.cdf(y)).abs() < 1e-14, "y = {y}");
            assert!((f.survival(y) - (1.0 - d.cdf(y))).abs() < 1e-14);
        }
        assert!(f.is_continuity_point(1.0));
    }

    #[test]
    fn shifted_survival_keeps_tiny_tails() {
        let d = DensitySpec::power_at_one(0.5).unwrap();
        let h = 1e-10;
        let x = RandomVariable::from_density(d).unwrap().shifted(h).unwrap();
        let s = x.cdf().survival(1.0);
        assert!((s - h.sqrt()).abs() <= 1e-12 * h.sqrt(), "survival {s}");
    }
}
