//! Worked examples with closed-form answers.

use convlab::family::SequenceFamily;
use convlab::measure::{char_fn, expectation, Integrand, OmegaPoint, RandomVariable};
use convlab::modes::{
    check_mode, term_cc, term_s1d, term_s1star, term_s2d, term_s3d, term_sa_as, term_slinf, term_slp, limit_terms,
    LimitProbe, ModeParams, ModeTag, TestFunction, Verdict,
};
use convlab::quadrature::QuadConfig;
use convlab::registry::{build_family, FamilySpec};
use convlab::series::{analyze_series, fit_exponent, null_sequence_test, EnginePolicy, FitOutcome, NullClass, TermSource};
use num_complex::Complex64;

fn cfg() -> QuadConfig {
    QuadConfig::default()
}

fn ex31() -> convlab::registry::RegistryFamily {
    build_family(&FamilySpec::Ex31 { alpha: 2.0 }).unwrap()
}

fn ex32() -> convlab::registry::RegistryFamily {
    build_family(&FamilySpec::Ex32 { alpha: 0.5, beta: 2.0 }).unwrap()
}

fn ex33() -> convlab::registry::RegistryFamily {
    build_family(&FamilySpec::Ex33).unwrap()
}

fn close(a: f64, b: f64, tol: f64) {
    assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
}

#[test]
fn ex33_member_values() {
    let x4 = ex33().member(4).unwrap();
    assert_eq!(x4.eval(OmegaPoint::new(0.1).unwrap()), 1.0);
    assert_eq!(x4.eval(OmegaPoint::new(0.5).unwrap()), 0.0);
    assert_eq!(RandomVariable::constant(2.0).eval(OmegaPoint::new(0.37).unwrap()), 2.0);
}

#[test]
fn cdf_examples() {
    let x3 = ex31().member(3).unwrap();
    close(x3.cdf().eval(0.9), 8.0 / 9.0, 1e-15);
    let z = RandomVariable::constant(0.0).cdf();
    assert_eq!(z.eval(-1.0), 0.0);
    assert_eq!(z.eval(0.0), 1.0);
    close(ex32().limit().cdf().eval(0.75), 0.5, 1e-12);
}

#[test]
fn ex31_sine_expectation() {
    let n = 7.0f64;
    let e = expectation(&ex31().member(7).unwrap(), Integrand::Test(TestFunction::Sine), &cfg()).unwrap();
    let want = 1f64.sin() / (n * n) + (1.0 - 1.0 / (n * n)) * (n.powf(-0.5)).sin();
    close(e.value, want, 1e-14);
}

#[test]
fn ex31_char_fn_two_atoms() {
    let n = 5.0f64;
    let t = 1.3;
    let (z, _) = char_fn(&ex31().member(5).unwrap(), t, &cfg()).unwrap();
    let want = Complex64::new(0.0, t).exp() / (n * n)
        + (1.0 - 1.0 / (n * n)) * Complex64::new(0.0, t * n.powf(-0.5)).exp();
    assert!((z - want).norm() < 1e-14);
    let (one, _) = char_fn(&ex32().limit().clone(), 0.0, &cfg()).unwrap();
    assert_eq!(one, Complex64::new(1.0, 0.0));
}

#[test]
fn sup_norm_and_differences() {
    let fam = ex32();
    let d = fam.member(10).unwrap().difference(fam.limit()).unwrap();
    let (lo, hi) = d.essential_range();
    close(lo, 0.01, 1e-17);
    close(hi, 0.01, 1e-17);
    assert_eq!(ex33().member(9).unwrap().sup_norm(), 1.0);
    let a = ex33().member(6).unwrap();
    let abs = a.diff_abs(&RandomVariable::constant(0.0)).unwrap();
    for i in 1..1000 {
        let w = i as f64 / 1000.0;
        assert_eq!(abs.eval_at(w), a.eval_at(w));
    }
}

#[test]
fn complete_convergence_terms() {
    close(term_cc(&ex31(), 200, 0.1, &cfg()).unwrap(), 2.5e-5, 1e-18);
    assert_eq!(term_cc(&ex31(), 50, 0.1, &cfg()).unwrap(), 1.0);
    close(limit_terms(&ex33(), LimitProbe::Probability { eps: 0.5 }, 10, &cfg()).unwrap(), 0.1, 1e-16);
}

#[test]
fn moment_terms() {
    for n in [1u64, 10, 1000] {
        let want = (n as f64).powi(-2);
        close(term_slp(&ex32(), n, 1.0, &cfg()).unwrap(), want, 1e-15 * want.max(1e-300) + 1e-18);
    }
    let n = 200.0f64;
    let want = 1.0 / (n * n) + (1.0 - 1.0 / (n * n)) * n.powf(-0.5);
    close(term_slp(&ex31(), 200, 1.0, &cfg()).unwrap(), want, 1e-15);
    close(term_slinf(&ex32(), 10, &cfg()).unwrap(), 0.01, 1e-17);
    assert_eq!(term_slinf(&ex33(), 7, &cfg()).unwrap(), 1.0);
}

#[test]
fn test_function_terms() {
    close(term_s1d(&ex33(), 5, TestFunction::Sine, &cfg()).unwrap(), 1f64.sin() / 5.0, 1e-16);
    close(term_s1star(&ex33(), 5, TestFunction::Sine, &cfg()).unwrap(), 1f64.sin() / 5.0, 1e-16);
    let n = 30.0f64;
    let want = 1f64.sin() / (n * n) + (1.0 - 1.0 / (n * n)) * n.powf(-0.5).sin();
    close(term_s1d(&ex31(), 30, TestFunction::Sine, &cfg()).unwrap(), want, 1e-15);
    let f = TestFunction::clamped_identity(1.0, 1.0).unwrap();
    close(term_s1star(&ex32(), 10, f, &cfg()).unwrap(), 0.01, 1e-12);
}

#[test]
fn cdf_gap_terms() {
    for n in [1u64, 3, 10, 1000, 123_456] {
        let t = term_s2d(&ex32(), n, 1.0, &cfg()).unwrap();
        close(t * n as f64, 1.0, 1e-12);
    }
    close(term_s2d(&ex31(), 100, 0.5, &cfg()).unwrap(), 1e-4, 1e-19);
}

#[test]
fn char_gap_terms() {
    assert_eq!(term_s3d(&ex32(), 17, 0.0, &cfg()).unwrap(), 0.0);
    let n = 40.0f64;
    let want = (Complex64::new(0.0, 1.0).exp() / (n * n)
        + (1.0 - 1.0 / (n * n)) * Complex64::new(0.0, n.powf(-0.5)).exp()
        - 1.0)
        .norm();
    close(term_s3d(&ex31(), 40, 1.0, &cfg()).unwrap(), want, 1e-14);
    let c = build_family(&FamilySpec::Constant { c: 3.0 }).unwrap();
    assert_eq!(term_s3d(&c, 9, 2.0, &cfg()).unwrap(), 0.0);
}

#[test]
fn pointwise_power_terms() {
    let w = OmegaPoint::new(0.3).unwrap();
    assert_eq!(term_sa_as(&ex33(), 4, 0.7, w, &cfg()).unwrap(), 0.0);
    assert_eq!(term_sa_as(&ex33(), 2, 1.0, w, &cfg()).unwrap(), 1.0);
}

#[test]
fn mode_examples() {
    let pol = EnginePolicy::default().with_n_max(1 << 16);
    let fam = ex33();
    let mut params = ModeParams::defaults_for(&fam);
    params.test_functions = vec![TestFunction::Sine];
    let r = check_mode(&fam, ModeTag::S1d, &params, &pol).unwrap();
    assert_eq!(r.verdict, Verdict::Fails { witness: "f=sin".into() });
    let fam = ex32();
    let r = check_mode(&fam, ModeTag::SLInf, &ModeParams::defaults_for(&fam), &pol).unwrap();
    assert!(r.verdict.is_holds());
    let c = build_family(&FamilySpec::Constant { c: 0.0 }).unwrap();
    let params = ModeParams::defaults_for(&c);
    for m in ModeTag::ALL {
        assert!(check_mode(&c, m, &params, &pol).unwrap().verdict.is_holds(), "{m:?}");
    }
}

#[test]
fn series_examples() {
    let pol = EnginePolicy::default();
    let v = analyze_series(&mut TermSource::new(|n| Ok(1.0 / n as f64)), &pol).unwrap();
    assert!(v.diverges());
    let v = analyze_series(&mut TermSource::new(|n| Ok((n as f64).powf(-0.5).sin())), &pol).unwrap();
    assert!(v.diverges());
    let FitOutcome::Fitted(fit) = fit_exponent(&mut TermSource::new(|n| Ok((n as f64).powf(-1.5))), &pol).unwrap() else {
        panic!("no fit")
    };
    close(fit.p_hat, 1.5, 0.01);
    let split = |n: u64| {
        let n = n as f64;
        Ok(1f64.sin() / (n * n) + (1.0 - 1.0 / (n * n)) * n.powf(-0.5).sin())
    };
    let FitOutcome::Fitted(fit) = fit_exponent(&mut TermSource::new(split), &pol).unwrap() else {
        panic!("no fit")
    };
    close(fit.p_hat, 0.5, 0.02);
}

#[test]
fn null_examples() {
    let pol = EnginePolicy::default().with_n_max(1 << 16);
    let v = null_sequence_test(&mut TermSource::new(|n| Ok(1.0 / n as f64)), &pol).unwrap();
    assert!(v.tends_to_zero());
    let v = null_sequence_test(&mut TermSource::new(|_| Ok(1.0)), &pol).unwrap();
    assert!(matches!(v.class, NullClass::StaysAbove { level } if level == 1.0));
    let fam = ex32();
    let cfg = cfg();
    let v = null_sequence_test(&mut TermSource::new(|n| term_s2d(&fam, n, 1.0, &cfg)), &pol).unwrap();
    assert!(v.tends_to_zero());
}
