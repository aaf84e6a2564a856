use num_complex::Complex64;

use super::piece::{Expr, Piece};
use super::rv::{overlaps, RandomVariable};
use crate::error::Result;
use crate::quadrature::{integrate, Interval, QuadConfig, QuadResult};
use crate::summation::NeumaierSum;
use crate::testfn::TestFunction;

/// Functions `g` for which `E[g(X)]` can be requested.
#[derive(Clone, Copy)]
pub enum Integrand<'a> {
    Identity,
    /// `|x|^p`.
    AbsPower(f64),
    /// `1{x <= threshold}`.
    IndicatorLe(f64),
    /// `|x| * 1{|x| < eps}`.
    TruncatedAbs(f64),
    Test(TestFunction),
    /// `f'(x)`, or `|f'(x)|` when `absolute`.
    TestDerivative { f: TestFunction, absolute: bool },
    Custom(&'a dyn Fn(f64) -> f64),
}

impl Integrand<'_> {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Integrand::Identity => x,
            Integrand::AbsPower(p) => x.abs().powf(p),
            Integrand::IndicatorLe(t) => f64::from(u8::from(x <= t)),
            Integrand::TruncatedAbs(eps) => {
                if x.abs() < eps {
                    x.abs()
                } else {
                    0.0
                }
            }
            Integrand::Test(f) => f.eval(x),
            Integrand::TestDerivative { f, absolute } => {
                let d = f.derivative(x);
                if absolute {
                    d.abs()
                } else {
                    d
                }
            }
            Integrand::Custom(g) => g(x),
        }
    }

    fn kinks(&self) -> Vec<f64> {
        match *self {
            Integrand::Identity | Integrand::Custom(_) => vec![],
            Integrand::AbsPower(_) => vec![0.0],
            Integrand::IndicatorLe(t) => vec![t],
            Integrand::TruncatedAbs(eps) => vec![-eps, 0.0, eps],
            Integrand::Test(f) | Integrand::TestDerivative { f, .. } => f.kinks(),
        }
    }
}

/// A value with an absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self { value, error: 0.0 }
    }
}

/// `E[g(X)]`: exact on atoms, closed form for the identity and indicators,
/// adaptive quadrature elsewhere.
pub fn expectation(rv: &RandomVariable, g: Integrand<'_>, cfg: &QuadConfig) -> Result<Estimate> {
    let pieces = rv.normalized_pieces();
    let mut exact = NeumaierSum::new();
    let mut smooth: Vec<Piece> = Vec::new();
    for p in pieces.iter() {
        match (p.expr, g) {
            (Expr::Constant { value }, _) => exact.add(g.eval(value) * p.len()),
            (_, Integrand::IndicatorLe(t)) => exact.add(p.expr.measure_le(t, p.start, p.end)),
            (Expr::AffineInOmega { slope, intercept }, Integrand::Identity) => {
                exact.add(0.5 * slope * (p.end - p.start) * (p.end + p.start) + intercept * p.len())
            }
            (Expr::QuantileOfDensity { density, scale, shift }, Integrand::Identity) => {
                exact.add(scale * density.quantile_integral(p.start, p.end) + shift * p.len())
            }
            _ => smooth.push(*p),
        }
    }
    if smooth.is_empty() {
        return Ok(Estimate::exact(exact.value()));
    }
    let intervals = split_cells(smooth.iter().map(|p| (p.start, p.end, p.expr, p.expr)), &g.kinks(), 0.0, cfg);
    let res = integrate(
        |tag, w, out: &mut [f64]| out[0] = g.eval(smooth[tag].expr.eval(w)),
        1,
        &intervals,
        cfg,
    )?;
    exact.add(res.values[0]);
    Ok(Estimate {
        value: exact.value(),
        error: res.error,
    })
}

/// Characteristic function `E[exp(i t X)]` with its absolute error bound.
pub fn char_fn(rv: &RandomVariable, t: f64, cfg: &QuadConfig) -> Result<(Complex64, f64)> {
    let pieces = rv.normalized_pieces();
    let (mut re, mut im) = (NeumaierSum::new(), NeumaierSum::new());
    let mut smooth: Vec<Piece> = Vec::new();
    for p in pieces.iter() {
        match p.expr {
            Expr::Constant { value } => {
                let (s, c) = (t * value).sin_cos();
                re.add(c * p.len());
                im.add(s * p.len());
            }
            _ => smooth.push(*p),
        }
    }
    let mut error = 0.0;
    if !smooth.is_empty() && t != 0.0 {
        let intervals = split_cells(smooth.iter().map(|p| (p.start, p.end, p.expr, p.expr)), &[], t.abs(), cfg);
        let res = integrate(
            |tag, w, out: &mut [f64]| {
                let (s, c) = (t * smooth[tag].expr.eval(w)).sin_cos();
                out[0] = c;
                out[1] = s;
            },
            2,
            &intervals,
            cfg,
        )?;
        re.add(res.values[0]);
        im.add(res.values[1]);
        error = res.error;
    } else {
        for p in &smooth {
            re.add(p.len());
        }
    }
    Ok((Complex64::new(re.value(), im.value()), error))
}

/// Splitting hints for [`coupled_expectation`].
#[derive(Debug, Clone, Copy, Default)]
pub struct Coupling<'a> {
    /// Values at which the integrand has a kink in either argument.
    pub kinks: &'a [f64],
    /// Largest angular frequency of the integrand in its arguments.
    pub frequency: f64,
}

/// `E[h(X, Y, X - Y)]` for a vector-valued `h`, integrating over the common
/// refinement of both partitions. The third argument is the difference
/// evaluated from its own piecewise expression where that is representable,
/// which keeps relative precision when `X` and `Y` nearly agree.
pub fn coupled_expectation<H>(
    x: &RandomVariable,
    y: &RandomVariable,
    dim: usize,
    coupling: Coupling<'_>,
    mut h: H,
    cfg: &QuadConfig,
) -> Result<QuadResult>
where
    H: FnMut(f64, f64, f64, &mut [f64]),
{
    let cells = overlaps(&x.normalized_pieces(), &y.normalized_pieces());
    let mut exact: Vec<NeumaierSum> = vec![NeumaierSum::new(); dim];
    let mut out = vec![0.0; dim];
    let mut smooth = Vec::new();
    for (a, b, ex, ey) in cells {
        if let (Expr::Constant { value: vx }, Expr::Constant { value: vy }) = (ex, ey) {
            h(vx, vy, vx - vy, &mut out);
            for (acc, v) in exact.iter_mut().zip(&out) {
                acc.add(v * (b - a));
            }
        } else {
            let diff = ex.minus(&ey).ok();
            smooth.push((a, b, ex, ey, diff));
        }
    }
    let mut values: Vec<f64> = exact.iter().map(|s| s.value()).collect();
    let mut error = 0.0;
    let mut evaluations = 0;
    if !smooth.is_empty() {
        let intervals = split_cells(
            smooth.iter().map(|&(a, b, ex, ey, _)| (a, b, ex, ey)),
            coupling.kinks,
            coupling.frequency,
            cfg,
        );
        let res = integrate(
            |tag, w, out: &mut [f64]| {
                let (_, _, ex, ey, diff) = smooth[tag];
                let (vx, vy) = eval_pair(&ex, &ey, w);
                let d = match diff {
                    Some(e) => e.eval(w),
                    None => vx - vy,
                };
                h(vx, vy, d, out)
            },
            dim,
            &intervals,
            cfg,
        )?;
        for (i, v) in res.values.iter().enumerate() {
            let mut s = exact[i];
            s.add(*v);
            values[i] = s.value();
        }
        error = res.error;
        evaluations = res.evaluations;
    }
    Ok(QuadResult {
        values,
        error,
        evaluations,
    })
}

// Both expressions at one point, sharing the quantile when the densities agree.
#[inline]
fn eval_pair(ex: &Expr, ey: &Expr, w: f64) -> (f64, f64) {
    match (*ex, *ey) {
        (
            Expr::QuantileOfDensity { density: dx, scale: sx, shift: tx },
            Expr::QuantileOfDensity { density: dy, scale: sy, shift: ty },
        ) if dx == dy => {
            let q = dx.quantile(w);
            (sx * q + tx, sy * q + ty)
        }
        _ => (ex.eval(w), ey.eval(w)),
    }
}

// Builds quadrature intervals from cells, splitting where either expression
// crosses a kink and, for oscillatory integrands above the threshold, into
// pieces proportional to frequency times range width. The tag is the cell
// index.
fn split_cells(
    cells: impl Iterator<Item = (f64, f64, Expr, Expr)>,
    kinks: &[f64],
    frequency: f64,
    cfg: &QuadConfig,
) -> Vec<Interval> {
    let mut out = Vec::new();
    for (tag, (a, b, ex, ey)) in cells.enumerate() {
        let mut cuts = vec![a, b];
        for &k in kinks {
            cuts.extend(ex.preimage_in(k, a, b));
            cuts.extend(ey.preimage_in(k, a, b));
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        for w in cuts.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let mut parts = 1usize;
            if frequency > cfg.oscillation_threshold {
                let width = |e: Expr| {
                    let (l, h) = e.range_on(lo, hi);
                    h - l
                };
                let span = width(ex).max(width(ey));
                parts = ((frequency * span).ceil() as usize).max(1);
            }
            let step = (hi - lo) / parts as f64;
            for i in 0..parts {
                let s = lo + step * i as f64;
                let e = if i + 1 == parts { hi } else { lo + step * (i + 1) as f64 };
                out.push(Interval { a: s, b: e, tag });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::density::DensitySpec;
    use crate::quadrature::integrate_scalar;
    use std::f64::consts::PI;

    fn cfg() -> QuadConfig {
        QuadConfig::default()
    }

    #[test]
    fn two_atom_sine_expectation() {
        let n = 20.0f64;
        let x = RandomVariable::indicator_split(1.0 / (n * n), 1.0, n.powf(-0.5)).unwrap();
        let e = expectation(&x, Integrand::Test(TestFunction::Sine), &cfg()).unwrap();
        let expected = (1.0 / (n * n)) * 1f64.sin() + (1.0 - 1.0 / (n * n)) * n.powf(-0.5).sin();
        assert!((e.value - expected).abs() < 1e-15);
        assert_eq!(e.error, 0.0);
    }

    #[test]
    fn quantile_mean_closed_form_matches_independent_quadrature() {
        let d = DensitySpec::power_at_one(0.5).unwrap();
        let x = RandomVariable::from_density(d).unwrap();
        let e = expectation(&x, Integrand::Identity, &cfg()).unwrap();
        // Oracle: u (1-a)(1-u)^(-a) du after u = 1 - v^2.
        let (oracle, _) = integrate_scalar(|v: f64| (1.0 - v * v) * 0.5 / v * 2.0 * v, 0.0, 1.0, &cfg()).unwrap();
        assert!((e.value - 2.0 / 3.0).abs() < 1e-14);
        assert!((oracle - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn quadrature_path_agrees_with_closed_form() {
        let d = DensitySpec::power_at_one(0.4).unwrap();
        let x = RandomVariable::from_density(d).unwrap();
        let id = |v: f64| v;
        let quad = expectation(&x, Integrand::Custom(&id), &cfg()).unwrap();
        let closed = expectation(&x, Integrand::Identity, &cfg()).unwrap();
        assert!((quad.value - closed.value).abs() < 1e-10);
    }

    #[test]
    fn indicator_expectation_is_cdf() {
        let d = DensitySpec::power_at_one(0.5).unwrap();
        let x = RandomVariable::from_density(d).unwrap();
        for t in [0.1, 0.75, 0.99] {
            let e = expectation(&x, Integrand::IndicatorLe(t), &cfg()).unwrap();
            assert!((e.value - x.cdf().eval(t)).abs() < 1e-15);
        }
        assert!((x.cdf().eval(0.75) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn uniform_char_fn_at_pi() {
        let (phi, err) = char_fn(&RandomVariable::uniform(), PI, &cfg()).unwrap();
        assert!((phi.norm() - 2.0 / PI).abs() < 1e-12);
        assert!(err <= 1e-10);
        let (zero, _) = char_fn(&RandomVariable::uniform(), 0.0, &cfg()).unwrap();
        assert_eq!(zero, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn high_frequency_char_fn() {
        let t = 400.0;
        let (phi, _) = char_fn(&RandomVariable::uniform(), t, &cfg()).unwrap();
        let exact = Complex64::new(t.sin() / t, (1.0 - t.cos()) / t);
        assert!((phi - exact).norm() < 1e-10);
    }

    #[test]
    fn truncated_abs_splits_at_threshold() {
        let e = expectation(&RandomVariable::uniform(), Integrand::TruncatedAbs(0.5), &cfg()).unwrap();
        assert!((e.value - 0.125).abs() < 1e-14);
    }

    #[test]
    fn coupled_difference_of_shift_is_exact_to_relative_precision() {
        let d = DensitySpec::power_at_one(0.5).unwrap();
        let x = RandomVariable::from_density(d).unwrap();
        let h = 1e-12;
        let xn = x.clone().shifted(h).unwrap();
        let f = TestFunction::clamped_identity(1.0, 1.0).unwrap();
        let r = coupled_expectation(
            &xn,
            &x,
            1,
            Coupling { kinks: &f.kinks(), frequency: 0.0 },
            |a, b, dd, out| out[0] = f.diff(a, b, dd),
            &cfg(),
        )
        .unwrap();
        assert!((r.values[0] / h - 1.0).abs() < 1e-12, "{}", r.values[0]);
    }
}
