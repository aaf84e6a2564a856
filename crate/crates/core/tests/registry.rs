//! Registry harness on reduced horizons.

use convlab::error::Error;
use convlab::family::SequenceFamily;
use convlab::modes::{ModeParams, ModeTag, TermEvaluator, TermKind, TestFunction};
use convlab::registry::{
    build_family, catalog_json, expected_verdicts, soundness_sweep, verify_lipschitz_s2d, verify_truncation_s1star,
    Expected, FamilySpec, ImplicationDiagram, LipschitzWitness,
};
use convlab::series::EnginePolicy;

fn short() -> EnginePolicy {
    EnginePolicy::default().with_n_max(1 << 16)
}

#[test]
fn ex32_at_one_violates_the_lipschitz_hypothesis() {
    let fam = build_family(&FamilySpec::Ex32 { alpha: 0.5, beta: 2.0 }).unwrap();
    // The left density blows up at 1, so no finite constant works there.
    let w = LipschitzWitness::new(10.0, 0.05, 1.0).unwrap();
    let r = verify_lipschitz_s2d(&fam, &[w], &short()).unwrap();
    let c = &r.witnesses[0];
    assert!(!c.hypothesis_holds);
    assert!(c.s2d.diverges());
    assert!(c.sandwich_holds);
    assert!(r.passed, "a failed hypothesis is not a counterexample");
}

#[test]
fn zero_shifts_give_zero_terms() {
    let fam = build_family(&FamilySpec::shift_uniform(0.0, 2.0)).unwrap();
    let w = LipschitzWitness::new(1.0, 0.1, 0.5).unwrap();
    let r = verify_lipschitz_s2d(&fam, &[w], &short()).unwrap();
    assert!(r.passed);
    assert_eq!(r.witnesses[0].proof_bound.observed, 0.0);
    assert!(r.slinf.verdict.is_holds());
}

#[test]
fn lipschitz_route_needs_a_shift_family() {
    let fam = build_family(&FamilySpec::Ex33).unwrap();
    let w = LipschitzWitness::new(1.0, 0.1, 0.5).unwrap();
    let err = verify_lipschitz_s2d(&fam, &[w], &short()).unwrap_err();
    assert!(err.is_parameter(), "{err}");
}

#[test]
fn witness_at_a_jump_is_rejected() {
    let base = convlab::measure::RandomVariable::indicator_split(0.5, 1.0, 0.0).unwrap();
    let spec = FamilySpec::Shift {
        base,
        constant: 1.0,
        exponent: 2.0,
    };
    let fam = build_family(&spec).unwrap();
    let w = LipschitzWitness::new(1.0, 0.1, 1.0).unwrap();
    assert!(matches!(verify_lipschitz_s2d(&fam, &[w], &short()), Err(Error::Witness(_))));
}

#[test]
fn ex31_fails_the_truncation_hypothesis() {
    let fam = build_family(&FamilySpec::Ex31 { alpha: 2.0 }).unwrap();
    let r = verify_truncation_s1star(&fam, 0.5, &[TestFunction::Sine], &short()).unwrap();
    assert!(r.truncated.diverges());
    assert!(!r.hypothesis_holds);
    assert!(r.s1d.verdict.is_fails());
    assert!(r.passed);
    let ev = TermEvaluator::new(&fam, short().quadrature);
    let n = 400u64;
    let t = ev.term(n, &TermKind::Truncated { eps: 0.5 }).unwrap();
    let want = (n as f64).powf(-0.5) * (1.0 - 1.0 / (n * n) as f64);
    assert!((t - want).abs() < 1e-15);
}

#[test]
fn constant_family_truncation_is_trivial() {
    let fam = build_family(&FamilySpec::Constant { c: 0.0 }).unwrap();
    let fs = ModeParams::defaults_for(&fam).test_functions;
    let r = verify_truncation_s1star(&fam, 0.5, &fs, &short()).unwrap();
    assert_eq!(r.truncated.partial_sum, 0.0);
    assert!(r.s1star.verdict.is_holds());
    assert!(r.passed);
}

#[test]
fn ex32_truncated_terms_are_the_shift() {
    let fam = build_family(&FamilySpec::Ex32 { alpha: 0.5, beta: 2.0 }).unwrap();
    let ev = TermEvaluator::new(&fam, short().quadrature);
    for n in [1u64, 2, 10, 1000] {
        let t = ev.term(n, &TermKind::Truncated { eps: 0.5 }).unwrap();
        let want = if n == 1 { 0.0 } else { (n as f64).powi(-2) };
        assert!((t - want).abs() < 1e-16, "n={n}: {t}");
    }
}

#[test]
fn constant_family_sweep_is_clean() {
    let r = soundness_sweep(
        &ImplicationDiagram::standard(),
        &[FamilySpec::Constant { c: 0.0 }],
        &short(),
    )
    .unwrap();
    assert!(r.violations.is_empty());
    assert!(r.coverage_gaps.is_empty());
    assert!(r.golden_mismatches.is_empty());
    assert_eq!(r.families[0].reports.len(), ModeTag::ALL.len());
}

#[test]
fn parameter_ranges_are_enforced() {
    for spec in [
        FamilySpec::Ex32 { alpha: 1.0, beta: 2.0 },
        FamilySpec::Ex32 { alpha: 0.5, beta: 1.0 },
        FamilySpec::Ex31 { alpha: 0.0 },
        FamilySpec::shift_uniform(1.0, 1.0),
    ] {
        assert!(build_family(&spec).unwrap_err().is_parameter(), "{spec}");
    }
}

#[test]
fn expected_tables_follow_the_regimes() {
    let t = expected_verdicts(&FamilySpec::Ex31 { alpha: 2.0 });
    assert_eq!(t.get(ModeTag::CompleteConvergence), Some(Expected::Holds));
    assert_eq!(t.get(ModeTag::S3d), Some(Expected::Fails));
    let t = expected_verdicts(&FamilySpec::shift_uniform(1.0, 2.0));
    assert_eq!(t.get(ModeTag::S2d), Some(Expected::Holds));
    let t = expected_verdicts(&FamilySpec::Shift {
        base: convlab::measure::RandomVariable::indicator_split(0.5, 1.0, 0.0).unwrap(),
        constant: 1.0,
        exponent: 2.0,
    });
    assert_eq!(t.get(ModeTag::S2d), None);
}

#[test]
fn members_share_the_limit_space() {
    let fam = build_family(&FamilySpec::Ex31 { alpha: 2.0 }).unwrap();
    let m3 = fam.member(3).unwrap();
    let atoms = m3.cdf();
    let atoms = atoms.atoms();
    assert_eq!(atoms.len(), 2);
    assert!((atoms[0].x - 3f64.powf(-0.5)).abs() < 1e-15 && (atoms[0].mass - 8.0 / 9.0).abs() < 1e-15);
    assert!(atoms[1].x == 1.0 && (atoms[1].mass - 1.0 / 9.0).abs() < 1e-15);
}

#[test]
fn catalog_round_trips_family_specs() {
    let json = catalog_json(&FamilySpec::standard_set(), &ImplicationDiagram::standard());
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    for (entry, spec) in v["families"].as_array().unwrap().iter().zip(FamilySpec::standard_set()) {
        let back: FamilySpec = serde_json::from_value(entry["spec"].clone()).unwrap();
        assert_eq!(back, spec);
    }
}
