use std::fmt::Write as _;

use convlab::modes::{ModeReport, ModeTag, ProbeOutcome, Verdict};
use convlab::registry::{Catalog, NonEdgeStatus, SweepReport};
use convlab::series::{DivergenceEvidence, NullClass, NullVerdict, SeriesClass, SeriesVerdict};

use crate::error::CliResult;

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

fn verdict_cell(v: &Verdict) -> String {
    match v {
        Verdict::Fails { witness } => format!("Fails[{witness}]"),
        other => other.name().to_string(),
    }
}

/// Flat evidence for one probe: class, fitted exponent, half-width,
/// sum estimate, tail bound, partial sum, terms used.
pub struct Evidence {
    pub class: String,
    pub p_hat: Option<f64>,
    pub ci: Option<f64>,
    pub sum_estimate: Option<f64>,
    pub tail_bound: Option<f64>,
    pub partial_sum: Option<f64>,
    pub n_used: u64,
    pub hinted: bool,
}

pub fn series_evidence(v: &SeriesVerdict) -> Evidence {
    let (class, sum, tail) = match &v.class {
        SeriesClass::Converges { sum_estimate, tail_bound } => ("converges".to_string(), Some(*sum_estimate), Some(*tail_bound)),
        SeriesClass::Diverges {
            evidence: DivergenceEvidence::PartialSumBlowup { crossed_at, .. },
        } => (format!("diverges(blowup@{crossed_at})"), None, None),
        SeriesClass::Diverges {
            evidence: DivergenceEvidence::ExponentFit { .. },
        } if v.hint.is_some() => ("diverges(hint)".to_string(), None, None),
        SeriesClass::Diverges {
            evidence: DivergenceEvidence::ExponentFit { .. },
        } => ("diverges(fit)".to_string(), None, None),
        SeriesClass::Inconclusive { .. } => ("inconclusive".to_string(), None, None),
    };
    Evidence {
        class,
        p_hat: v.fit.as_ref().map(|f| f.p_hat),
        ci: v.fit.as_ref().map(|f| f.ci),
        sum_estimate: sum,
        tail_bound: tail,
        partial_sum: Some(v.partial_sum),
        n_used: v.n_used,
        hinted: v.hint.is_some(),
    }
}

pub fn null_evidence(v: &NullVerdict) -> Evidence {
    let class = match v.class {
        NullClass::TendsToZero => "tends_to_zero".to_string(),
        NullClass::StaysAbove { level } => format!("stays_above({level})"),
        NullClass::Inconclusive => "inconclusive".to_string(),
    };
    Evidence {
        class,
        p_hat: v.fit.as_ref().map(|f| f.p_hat),
        ci: v.fit.as_ref().map(|f| f.ci),
        sum_estimate: None,
        tail_bound: None,
        partial_sum: None,
        n_used: v.n_used,
        hinted: v.hint.is_some(),
    }
}

fn evidence(o: &ProbeOutcome) -> Evidence {
    match o {
        ProbeOutcome::Series(v) => series_evidence(v),
        ProbeOutcome::Null(v) => null_evidence(v),
    }
}

pub fn diagnose_table(family: &str, reports: &[ModeReport]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "family {family}");
    for r in reports {
        let cert = match &r.certificate {
            Some(c) => format!("  certificate {c:?}"),
            None => String::new(),
        };
        let _ = writeln!(s, "\n{:<8} {}{cert}", r.mode.symbol(), verdict_cell(&r.verdict));
        let _ = writeln!(
            s,
            "  {:<40} {:<24} {:>10} {:>8} {:>16} {:>10} {:>5}",
            "probe", "class", "p_hat", "ci", "sum_estimate", "tail", "hint"
        );
        for p in &r.probes {
            let e = evidence(&p.outcome);
            let _ = writeln!(
                s,
                "  {:<40} {:<24} {:>10} {:>8} {:>16} {:>10} {:>5}",
                p.probe,
                e.class,
                e.p_hat.map(|v| format!("{v:.4}")).unwrap_or_else(|| "-".into()),
                e.ci.map(|v| format!("{v:.3}")).unwrap_or_else(|| "-".into()),
                e.sum_estimate.map(|v| format!("{v:.10}")).unwrap_or_else(|| "-".into()),
                e.tail_bound.map(|v| format!("{v:.2e}")).unwrap_or_else(|| "-".into()),
                if e.hinted { "yes" } else { "no" }
            );
        }
    }
    s
}

const PROBE_HEADER: [&str; 12] = [
    "family", "mode", "verdict", "witness", "probe", "class", "p_hat", "ci", "sum_estimate", "tail_bound",
    "partial_sum", "n_used",
];

fn probe_rows(w: &mut csv::Writer<Vec<u8>>, family: &str, reports: &[ModeReport]) -> CliResult<()> {
    for r in reports {
        let witness = match &r.verdict {
            Verdict::Fails { witness } => witness.as_str(),
            _ => "",
        };
        for p in &r.probes {
            let e = evidence(&p.outcome);
            w.write_record([
                family,
                r.mode.tag(),
                r.verdict.name(),
                witness,
                &p.probe,
                &e.class,
                &opt(e.p_hat),
                &opt(e.ci),
                &opt(e.sum_estimate),
                &opt(e.tail_bound),
                &opt(e.partial_sum),
                &e.n_used.to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    Ok(())
}

fn csv_err(e: csv::Error) -> crate::error::CliError {
    crate::error::CliError::Usage(format!("csv encoding failed: {e}"))
}

fn finish(w: csv::Writer<Vec<u8>>) -> CliResult<String> {
    let bytes = w.into_inner().map_err(|e| crate::error::CliError::Usage(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn diagnose_csv(family: &str, reports: &[ModeReport]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(PROBE_HEADER).map_err(csv_err)?;
    probe_rows(&mut w, family, reports)?;
    finish(w)
}

pub fn matrix_table(sweep: &SweepReport) -> String {
    let mut s = String::new();
    let width = sweep.families.iter().map(|f| f.label.len()).max().unwrap_or(6).max(6);
    let _ = write!(s, "{:<w$}", "family", w = width);
    for m in ModeTag::ALL {
        let _ = write!(s, " {:>9}", m.tag());
    }
    s.push('\n');
    for f in &sweep.families {
        let _ = write!(s, "{:<w$}", f.label, w = width);
        for m in ModeTag::ALL {
            let cell = f.report(m).map(|r| match r.verdict {
                Verdict::Holds => "holds",
                Verdict::Fails { .. } => "FAILS",
                Verdict::NotFalsified => "not-fals",
                Verdict::Inconclusive => "?",
            });
            let _ = write!(s, " {:>9}", cell.unwrap_or("-"));
        }
        s.push('\n');
    }
    let _ = writeln!(s, "\nviolations: {}", sweep.violations.len());
    for v in &sweep.violations {
        let failing: Vec<&str> = v.failing.iter().map(|m| m.symbol()).collect();
        let _ = writeln!(
            s,
            "  {}: {} {} but {} fail",
            v.family,
            v.antecedent.symbol(),
            v.antecedent_verdict,
            failing.join(", ")
        );
    }
    let reproduced = sweep.non_edges.iter().filter(|n| n.status == NonEdgeStatus::Reproduced).count();
    let _ = writeln!(s, "non-edges reproduced: {reproduced}/{}", sweep.non_edges.len());
    for n in sweep.non_edges.iter().filter(|n| n.status != NonEdgeStatus::Reproduced) {
        let _ = writeln!(
            s,
            "  {} =/=> {}: {:?}{}",
            n.from.symbol(),
            n.to.symbol(),
            n.status,
            n.witness.as_ref().map(|w| format!(" ({w})")).unwrap_or_default()
        );
    }
    let _ = writeln!(s, "contradicted non-edges: {}", sweep.contradictions.len());
    for c in &sweep.contradictions {
        let _ = writeln!(s, "  {} =/=> {} is implied by the arrows", c.from.symbol(), c.to.symbol());
    }
    let _ = writeln!(s, "golden mismatches: {}", sweep.golden_mismatches.len());
    for g in &sweep.golden_mismatches {
        let _ = writeln!(s, "  {} {}: expected {:?}, got {}", g.family, g.mode.symbol(), g.expected, g.actual);
    }
    let _ = writeln!(s, "coverage gaps: {}", sweep.coverage_gaps.len());
    for g in &sweep.coverage_gaps {
        let _ = writeln!(s, "  {} {}", g.family, g.mode.symbol());
    }
    s
}

pub fn matrix_csv(sweep: &SweepReport) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(PROBE_HEADER).map_err(csv_err)?;
    for f in &sweep.families {
        probe_rows(&mut w, &f.label, &f.reports)?;
    }
    finish(w)
}

pub fn series_table(input: &str, e: &Evidence) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "input        {input}");
    let _ = writeln!(s, "terms used   {}", e.n_used);
    let _ = writeln!(s, "class        {}", e.class);
    if let Some(p) = e.p_hat {
        let _ = writeln!(s, "p_hat        {p:.6} +/- {}", e.ci.map(|c| format!("{c:.4}")).unwrap_or_default());
    }
    if let Some(v) = e.partial_sum {
        let _ = writeln!(s, "partial sum  {v}");
    }
    if let (Some(v), Some(t)) = (e.sum_estimate, e.tail_bound) {
        let _ = writeln!(s, "sum          in [{v}, {}]", v + t);
    }
    s
}

pub fn series_csv(input: &str, e: &Evidence) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["input", "class", "p_hat", "ci", "sum_estimate", "tail_bound", "partial_sum", "n_used"])
        .map_err(csv_err)?;
    w.write_record([
        input,
        &e.class,
        &opt(e.p_hat),
        &opt(e.ci),
        &opt(e.sum_estimate),
        &opt(e.tail_bound),
        &opt(e.partial_sum),
        &e.n_used.to_string(),
    ])
    .map_err(csv_err)?;
    finish(w)
}

pub fn catalog_table(c: &Catalog) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "families");
    for f in &c.families {
        let _ = writeln!(s, "  {}", f.label);
        for e in &f.expected.entries {
            let _ = writeln!(s, "    {:<8} {:?}", e.mode.symbol(), e.expected);
        }
        for a in &f.expected.absent {
            let _ = writeln!(s, "    {:<8} (no golden verdict: {})", a.mode.symbol(), a.reason);
        }
    }
    let _ = writeln!(s, "\nmodes");
    for m in ModeTag::ALL {
        let _ = writeln!(s, "  {:<9} {}", m.tag(), m.symbol());
    }
    let _ = writeln!(s, "\narrows");
    for (a, b) in &c.diagram.edges {
        let _ = writeln!(s, "  {} => {}", a.symbol(), b.symbol());
    }
    let _ = writeln!(s, "\nnon-implications");
    for n in &c.diagram.non_edges {
        let w = n.witness.as_ref().map(|w| w.to_string()).unwrap_or_else(|| "no witness".into());
        let _ = writeln!(s, "  {} =/=> {}  ({w})", n.from.symbol(), n.to.symbol());
    }
    s
}

pub fn catalog_csv(c: &Catalog) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["family", "mode", "expected", "note"]).map_err(csv_err)?;
    for f in &c.families {
        for e in &f.expected.entries {
            w.write_record([f.label.as_str(), e.mode.tag(), &format!("{:?}", e.expected), ""])
                .map_err(csv_err)?;
        }
        for a in &f.expected.absent {
            w.write_record([f.label.as_str(), a.mode.tag(), "", &a.reason]).map_err(csv_err)?;
        }
    }
    finish(w)
}
