use std::borrow::Cow;

use serde::{Deserialize, Serialize};

use super::cdf::Cdf;
use super::density::DensitySpec;
use super::omega::OmegaPoint;
use super::piece::{AffineMap, Expr, Piece};
use crate::error::{Error, Result};
use crate::summation::NeumaierSum;

/// A real random variable on `((0,1), Borel, Lebesgue)`, given as a
/// piecewise expression in `omega` followed by an optional affine map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRandomVariable")]
pub struct RandomVariable {
    pieces: Vec<Piece>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    post: Option<AffineMap>,
}

// Unchecked wire form; deserialization goes through the validating constructor.
#[derive(Deserialize)]
struct RawRandomVariable {
    pieces: Vec<Piece>,
    #[serde(default)]
    post: Option<AffineMap>,
}

impl TryFrom<RawRandomVariable> for RandomVariable {
    type Error = Error;

    fn try_from(raw: RawRandomVariable) -> Result<Self> {
        let rv = Self::new(raw.pieces)?;
        match raw.post {
            Some(map) => rv.with_post(map),
            None => Ok(rv),
        }
    }
}

impl RandomVariable {
    /// Builds a variable from pieces that must tile (0,1) in order.
    /// Zero-length pieces are dropped.
    pub fn new(pieces: Vec<Piece>) -> Result<Self> {
        let pieces: Vec<Piece> = pieces
            .into_iter()
            .filter(|p| p.start != p.end)
            .map(|p| Piece::new(p.start, p.end, p.expr))
            .collect();
        validate_partition(&pieces)?;
        Ok(Self { pieces, post: None })
    }

    // Internal constructor for partitions produced by merging valid inputs.
    fn from_valid(pieces: Vec<Piece>) -> Self {
        debug_assert!(validate_partition(&pieces).is_ok());
        Self { pieces, post: None }
    }

    pub fn constant(value: f64) -> Self {
        Self::from_valid(vec![Piece::new(0.0, 1.0, Expr::constant(value))])
    }

    /// `X(omega) = omega`, uniformly distributed on (0,1).
    pub fn uniform() -> Self {
        Self::from_valid(vec![Piece::new(0.0, 1.0, Expr::affine(1.0, 0.0))])
    }

    /// The quantile representation of `density` on the whole space.
    pub fn from_density(density: DensitySpec) -> Result<Self> {
        density.validate()?;
        Ok(Self::from_valid(vec![Piece::new(0.0, 1.0, Expr::quantile(density))]))
    }

    /// Two-valued variable: `high` on `(0, cut)` and `low` on `[cut, 1)`.
    pub fn indicator_split(cut: f64, high: f64, low: f64) -> Result<Self> {
        if !(cut > 0.0 && cut <= 1.0) {
            return Err(Error::Parameter(format!("split point must lie in (0,1], got {cut}")));
        }
        Self::new(vec![
            Piece::new(0.0, cut, Expr::constant(high)),
            Piece::new(cut, 1.0, Expr::constant(low)),
        ])
    }

    pub fn with_post(mut self, map: AffineMap) -> Result<Self> {
        if !(map.scale.is_finite() && map.shift.is_finite()) {
            return Err(Error::Representation(format!("non-finite post transform {map:?}")));
        }
        self.post = Some(match self.post {
            Some(inner) => map.compose(inner),
            None => map,
        });
        Ok(self)
    }

    /// `X + c`.
    pub fn shifted(self, c: f64) -> Result<Self> {
        self.with_post(AffineMap { scale: 1.0, shift: c })
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn post(&self) -> Option<AffineMap> {
        self.post
    }

    /// Pieces with the post transform folded into each expression.
    pub fn normalized_pieces(&self) -> Cow<'_, [Piece]> {
        match self.post {
            None => Cow::Borrowed(&self.pieces),
            Some(m) => Cow::Owned(
                self.pieces
                    .iter()
                    .map(|p| Piece::new(p.start, p.end, p.expr.map(m)))
                    .collect(),
            ),
        }
    }

    /// Same law and same values, post transform folded in.
    pub fn normalized(&self) -> Self {
        Self::from_valid(self.normalized_pieces().into_owned())
    }

    fn piece_index(&self, omega: f64) -> usize {
        self.pieces.partition_point(|p| p.start <= omega).saturating_sub(1)
    }

    pub fn eval(&self, omega: OmegaPoint) -> f64 {
        self.eval_at(omega.value())
    }

    /// Evaluation without the `OmegaPoint` check; `omega` must be in (0,1).
    #[inline]
    pub fn eval_at(&self, omega: f64) -> f64 {
        let v = self.pieces[self.piece_index(omega)].expr.eval(omega);
        match self.post {
            Some(m) => m.scale * v + m.shift,
            None => v,
        }
    }

    /// Essential infimum and supremum.
    pub fn essential_range(&self) -> (f64, f64) {
        self.normalized_pieces()
            .iter()
            .map(|p| p.expr.range_on(p.start, p.end))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (a, b)| (lo.min(a), hi.max(b)))
    }

    /// Essential supremum of `|X|`. Every supported expression is bounded,
    /// so the result is finite; `f64::INFINITY` is reserved for unbounded
    /// representations.
    pub fn sup_norm(&self) -> f64 {
        let (lo, hi) = self.essential_range();
        lo.abs().max(hi.abs())
    }

    pub fn prob_le(&self, x: f64) -> f64 {
        measure_sum(&self.normalized_pieces(), |p| p.expr.measure_le(x, p.start, p.end))
    }

    pub fn prob_lt(&self, x: f64) -> f64 {
        measure_sum(&self.normalized_pieces(), |p| p.expr.measure_lt(x, p.start, p.end))
    }

    pub fn prob_gt(&self, x: f64) -> f64 {
        measure_sum(&self.normalized_pieces(), |p| p.expr.measure_gt(x, p.start, p.end))
    }

    pub fn prob_ge(&self, x: f64) -> f64 {
        measure_sum(&self.normalized_pieces(), |p| p.expr.measure_ge(x, p.start, p.end))
    }

    pub fn cdf(&self) -> Cdf {
        Cdf::from_pieces(self.normalized_pieces().into_owned())
    }

    /// `X - Y` on the common refinement of both partitions.
    pub fn difference(&self, other: &RandomVariable) -> Result<RandomVariable> {
        let mut out = Vec::new();
        for (a, b, ex, ey) in overlaps(&self.normalized_pieces(), &other.normalized_pieces()) {
            out.push(Piece::new(a, b, ex.minus(&ey)?));
        }
        Ok(Self::from_valid(coalesce(out)))
    }

    /// `|X - Y|`, with smooth pieces split where the difference changes sign.
    pub fn diff_abs(&self, other: &RandomVariable) -> Result<RandomVariable> {
        let diff = self.difference(other)?;
        let mut out = Vec::with_capacity(diff.pieces.len() + 1);
        for p in diff.pieces {
            match p.expr.sign_change_in(p.start, p.end) {
                Some(root) => {
                    out.push(abs_piece(Piece::new(p.start, root, p.expr)));
                    out.push(abs_piece(Piece::new(root, p.end, p.expr)));
                }
                None => out.push(abs_piece(p)),
            }
        }
        Ok(Self::from_valid(coalesce(out)))
    }

    /// Whether every piece is a constant, i.e. the law is purely atomic.
    pub fn is_simple(&self) -> bool {
        self.pieces.iter().all(|p| p.expr.is_constant())
    }
}

fn abs_piece(p: Piece) -> Piece {
    let mid = 0.5 * (p.start + p.end);
    if p.expr.eval(mid) < 0.0 {
        Piece::new(p.start, p.end, p.expr.negated())
    } else {
        p
    }
}

// Merges neighbouring constant pieces with identical values.
fn coalesce(pieces: Vec<Piece>) -> Vec<Piece> {
    let mut out: Vec<Piece> = Vec::with_capacity(pieces.len());
    for p in pieces {
        if let Some(last) = out.last_mut() {
            if last.expr.is_constant() && last.expr == p.expr {
                last.end = p.end;
                continue;
            }
        }
        out.push(p);
    }
    out
}

fn measure_sum(pieces: &[Piece], f: impl Fn(&Piece) -> f64) -> f64 {
    if pieces.len() == 1 {
        return f(&pieces[0]);
    }
    NeumaierSum::sum_iter(pieces.iter().map(f))
}

/// Cells of the common refinement of two partitions, with the expression
/// active on each side.
pub(crate) fn overlaps(x: &[Piece], y: &[Piece]) -> Vec<(f64, f64, Expr, Expr)> {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    let mut start = 0.0;
    while i < x.len() && j < y.len() {
        let end = x[i].end.min(y[j].end);
        if end > start {
            out.push((start, end, x[i].expr, y[j].expr));
        }
        start = end;
        if x[i].end == end {
            i += 1;
        }
        if y[j].end == end {
            j += 1;
        }
    }
    out
}

fn validate_partition(pieces: &[Piece]) -> Result<()> {
    let first = pieces
        .first()
        .ok_or_else(|| Error::Representation("a random variable needs at least one piece".into()))?;
    if first.start != 0.0 {
        return Err(Error::Representation(format!(
            "first piece must start at 0, starts at {}",
            first.start
        )));
    }
    for w in pieces.windows(2) {
        if w[0].end < w[1].start {
            return Err(Error::Representation(format!(
                "gap between {} and {}",
                w[0].end, w[1].start
            )));
        }
        if w[0].end > w[1].start {
            return Err(Error::Representation(format!(
                "overlap between [{}, {}) and [{}, {})",
                w[0].start, w[0].end, w[1].start, w[1].end
            )));
        }
    }
    for p in pieces {
        if !(p.start < p.end) {
            return Err(Error::Representation(format!("empty or reversed piece [{}, {})", p.start, p.end)));
        }
        p.expr.validate()?;
    }
    let last = pieces.last().unwrap();
    if last.end != 1.0 {
        return Err(Error::Representation(format!("last piece must end at 1, ends at {}", last.end)));
    }
    Ok(())
}
