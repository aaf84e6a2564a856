mod error;
mod family;
mod render;

use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use convlab::family::SequenceFamily;
use convlab::modes::{check_modes, probes_for, scan_columns, ModeParams, ModeReport, ModeTag};
use convlab::registry::{
    build_family, catalog, evaluate, run_families, FamilySpec, ImplicationDiagram, SCHEMA_VERSION,
};
use convlab::series::{analyze_series, csv::read_terms, null_sequence_test, EnginePolicy, TermSource};
use serde::Serialize;

use error::{CliError, CliResult, EXIT_VIOLATION};
use family::{read_family_file, FamilyArgs};

/// Summability-based convergence modes for sequences of random variables:
/// per-family diagnostics, the mode-by-family verdict matrix checked against
/// the implication diagram, and classification of external term series.
#[derive(Debug, Parser)]
#[command(name = "convlab", version)]
struct Cli {
    /// Print the effective engine policy as JSON (to stderr when a command
    /// follows, otherwise to stdout).
    #[arg(long, global = true)]
    show_policy: bool,

    #[command(flatten)]
    policy: PolicyArgs,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,

    /// Write the main output here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct PolicyArgs {
    /// Number of terms scanned per series.
    #[arg(long, global = true, env = "CONVLAB_N_MAX")]
    n_max: Option<u64>,
    /// Absolute quadrature tolerance.
    #[arg(long, global = true)]
    abs_tol: Option<f64>,
    /// Trailing dyadic blocks used by the exponent fit.
    #[arg(long, global = true)]
    dyadic_window: Option<u32>,
    /// Distance from the critical exponent required before the fit decides.
    #[arg(long, global = true)]
    exponent_margin: Option<f64>,
    /// Largest accepted tail bracket for a convergent series.
    #[arg(long, global = true)]
    tail_tolerance: Option<f64>,
}

impl PolicyArgs {
    fn policy(&self) -> CliResult<EnginePolicy> {
        let mut p = EnginePolicy::default();
        if let Some(v) = self.n_max {
            p.n_max = v;
        }
        if let Some(v) = self.abs_tol {
            p.quadrature.abs_tol = v;
        }
        if let Some(v) = self.dyadic_window {
            p.dyadic_window = v;
        }
        if let Some(v) = self.exponent_margin {
            p.exponent_margin = v;
        }
        if let Some(v) = self.tail_tolerance {
            p.tail_tolerance = v;
        }
        p.validate()?;
        Ok(p)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the family catalog, golden verdicts and the implication diagram.
    List,
    /// Check selected modes on one family.
    Diagnose(DiagnoseArgs),
    /// Check every mode on the standard families against the diagram.
    Matrix(MatrixArgs),
    /// Classify a series read from a file of nonnegative terms.
    Series(SeriesArgs),
}

#[derive(Debug, Args)]
struct DiagnoseArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// Comma-separated mode tags, or `all`.
    #[arg(long, default_value = "all")]
    modes: String,
    /// Write every probe's terms in long format (mode,probe,n,term).
    #[arg(long)]
    terms_csv: Option<PathBuf>,
    /// Largest index written to the terms file.
    #[arg(long, default_value_t = 1000)]
    terms_n: u64,
}

#[derive(Debug, Args)]
struct MatrixArgs {
    /// Extra arrow `FROM,TO` added to the diagram before checking (repeatable).
    #[arg(long, value_name = "FROM,TO")]
    add_edge: Vec<String>,
    /// Additional family description files (repeatable).
    #[arg(long)]
    family_file: Vec<PathBuf>,
}

#[derive(Debug, Args)]
struct SeriesArgs {
    /// Term file, one value per line with an optional header; `-` reads stdin.
    #[arg(long)]
    input: PathBuf,
    /// Test whether the terms tend to zero instead of summing them.
    #[arg(long)]
    null: bool,
}

#[derive(Serialize)]
struct DiagnoseOutput<'a> {
    schema_version: u32,
    family: String,
    spec: &'a FamilySpec,
    policy: EnginePolicy,
    reports: &'a [ModeReport],
}

#[derive(Serialize)]
struct SeriesOutput<'a, V: Serialize> {
    schema_version: u32,
    input: &'a str,
    verdict: &'a V,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: &Cli) -> CliResult<i32> {
    let policy = cli.policy.policy()?;
    if cli.show_policy {
        let json = serde_json::to_string_pretty(&policy).expect("policy serializes");
        if cli.command.is_none() {
            emit(cli, &json)?;
            return Ok(0);
        }
        eprintln!("{json}");
    }
    let Some(command) = &cli.command else {
        return Err(CliError::Usage("no command given; see --help".into()));
    };
    match command {
        Command::List => list(cli),
        Command::Diagnose(args) => diagnose(cli, args, &policy),
        Command::Matrix(args) => matrix(cli, args, &policy),
        Command::Series(args) => series(cli, args, &policy),
    }
}

fn emit(cli: &Cli, text: &str) -> CliResult<()> {
    match &cli.output {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Write {
            path: path.clone(),
            source,
        }),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| if text.ends_with('\n') { Ok(()) } else { out.write_all(b"\n") })
                .map_err(|source| CliError::Write {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("output serializes")
}

fn list(cli: &Cli) -> CliResult<i32> {
    let c = catalog(&FamilySpec::standard_set(), &ImplicationDiagram::standard());
    let text = match cli.format {
        Format::Table => render::catalog_table(&c),
        Format::Json => json(&c),
        Format::Csv => render::catalog_csv(&c)?,
    };
    emit(cli, &text)?;
    Ok(0)
}

fn diagnose(cli: &Cli, args: &DiagnoseArgs, policy: &EnginePolicy) -> CliResult<i32> {
    let spec = args.family.spec()?;
    let modes = ModeTag::parse_list(&args.modes)?;
    let fam = build_family(&spec)?;
    let params = ModeParams::defaults_for(&fam);
    let reports = match &args.terms_csv {
        None => check_modes(&fam, &modes, &params, policy, None)?,
        Some(path) => diagnose_with_terms(&fam, &modes, &params, policy, path, args.terms_n)?,
    };
    let label = fam.label();
    let text = match cli.format {
        Format::Table => render::diagnose_table(&label, &reports),
        Format::Json => json(&DiagnoseOutput {
            schema_version: SCHEMA_VERSION,
            family: label.clone(),
            spec: &spec,
            policy: *policy,
            reports: &reports,
        }),
        Format::Csv => render::diagnose_csv(&label, &reports)?,
    };
    emit(cli, &text)?;
    Ok(0)
}

// Runs the joint scan while streaming rows `mode,probe,n,term` for n <= limit.
fn diagnose_with_terms(
    fam: &dyn SequenceFamily,
    modes: &[ModeTag],
    params: &ModeParams,
    policy: &EnginePolicy,
    path: &PathBuf,
    limit: u64,
) -> CliResult<Vec<ModeReport>> {
    let columns = scan_columns(modes, params)?;
    let mut layout: Vec<(&'static str, String, usize)> = Vec::new();
    for &m in modes {
        for k in probes_for(m, params)? {
            let col = columns.iter().position(|c| *c == k).expect("joint scan covers every probe");
            layout.push((m.tag(), k.label(), col));
        }
    }
    let write_err = |source| CliError::Write {
        path: path.clone(),
        source,
    };
    let file = File::create(path).map_err(write_err)?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    let mut failure: Option<csv::Error> = w.write_record(["mode", "probe", "n", "term"]).err();
    let mut observer = |n: u64, row: &[f64]| {
        if n > limit || failure.is_some() {
            return;
        }
        let idx = n.to_string();
        for (tag, probe, col) in &layout {
            if let Err(e) = w.write_record([tag, probe.as_str(), idx.as_str(), row[*col].to_string().as_str()]) {
                failure = Some(e);
                return;
            }
        }
    };
    let reports = check_modes(fam, modes, params, policy, Some((&mut Vec::new(), &mut observer)))?;
    if let Some(e) = failure {
        return Err(write_err(io::Error::other(e)));
    }
    w.flush().map_err(write_err)?;
    Ok(reports)
}

fn parse_edge(s: &str) -> CliResult<(ModeTag, ModeTag)> {
    let tags = ModeTag::parse_list(s)?;
    match tags.as_slice() {
        [a, b] if !s.contains("all") => Ok((*a, *b)),
        _ => Err(CliError::Usage(format!("--add-edge expects FROM,TO with two distinct mode tags, got {s:?}"))),
    }
}

fn matrix(cli: &Cli, args: &MatrixArgs, policy: &EnginePolicy) -> CliResult<i32> {
    let mut diagram = ImplicationDiagram::standard();
    for e in &args.add_edge {
        let (a, b) = parse_edge(e)?;
        diagram = diagram.with_edge(a, b);
    }
    let mut specs = FamilySpec::standard_set();
    for path in &args.family_file {
        specs.push(read_family_file(path)?);
    }
    let families = run_families(&specs, policy)?;
    let report = evaluate(&diagram, families, policy);
    let text = match cli.format {
        Format::Table => render::matrix_table(&report),
        Format::Json => json(&report),
        Format::Csv => render::matrix_csv(&report)?,
    };
    emit(cli, &text)?;
    if report.is_clean() {
        Ok(0)
    } else {
        eprintln!(
            "diagram check failed: {} violation(s), {} contradicted non-edge(s), {} golden mismatch(es)",
            report.violations.len(),
            report.contradictions.len(),
            report.golden_mismatches.len()
        );
        Ok(EXIT_VIOLATION)
    }
}

fn series(cli: &Cli, args: &SeriesArgs, policy: &EnginePolicy) -> CliResult<i32> {
    let name = args.input.display().to_string();
    let terms = if name == "-" {
        read_terms(io::stdin().lock())?
    } else {
        let file = File::open(&args.input).map_err(|source| CliError::Read {
            path: args.input.clone(),
            source,
        })?;
        read_terms(BufReader::new(file))?
    };
    let mut src = TermSource::from_slice(&terms);
    let text = if args.null {
        let v = null_sequence_test(&mut src, policy)?;
        let e = render::null_evidence(&v);
        match cli.format {
            Format::Table => render::series_table(&name, &e),
            Format::Json => json(&SeriesOutput {
                schema_version: SCHEMA_VERSION,
                input: &name,
                verdict: &v,
            }),
            Format::Csv => render::series_csv(&name, &e)?,
        }
    } else {
        let v = analyze_series(&mut src, policy)?;
        let e = render::series_evidence(&v);
        match cli.format {
            Format::Table => render::series_table(&name, &e),
            Format::Json => json(&SeriesOutput {
                schema_version: SCHEMA_VERSION,
                input: &name,
                verdict: &v,
            }),
            Format::Csv => render::series_csv(&name, &e)?,
        }
    };
    emit(cli, &text)?;
    Ok(0)
}
