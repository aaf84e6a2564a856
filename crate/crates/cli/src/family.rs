use std::fs;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use convlab::registry::FamilySpec;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyId {
    /// Indicator spike of height 1 on (0, 1/n^2), n^(-1/alpha) elsewhere; limit 0.
    Ex31,
    /// X + n^(-beta) with X of density (1-alpha)(1-u)^(-alpha).
    Ex32,
    /// Indicator of (0, 1/n); limit 0.
    Ex33,
    /// X_n = X = c.
    Const,
    /// Uniform(0,1) + c n^(-q).
    Shift,
}

#[derive(Debug, Clone, Args)]
pub struct FamilyArgs {
    /// Catalog family.
    #[arg(long, value_enum, required_unless_present = "family_file")]
    pub family: Option<FamilyId>,
    /// Exponent alpha (ex31: default 2; ex32: default 0.5).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Exponent beta (ex32 only; default 2).
    #[arg(long)]
    pub beta: Option<f64>,
    /// Constant (const: the value, default 0; shift: the shift scale, default 1).
    #[arg(long)]
    pub c: Option<f64>,
    /// Shift decay exponent (shift only; default 2).
    #[arg(long)]
    pub q: Option<f64>,
    /// JSON file holding a family description, e.g. a shift family with a
    /// custom base variable.
    #[arg(long, conflicts_with = "family")]
    pub family_file: Option<PathBuf>,
}

impl FamilyArgs {
    pub fn spec(&self) -> CliResult<FamilySpec> {
        if let Some(path) = &self.family_file {
            if self.alpha.is_some() || self.beta.is_some() || self.c.is_some() || self.q.is_some() {
                return Err(CliError::Usage("parameters cannot be combined with --family-file".into()));
            }
            return read_family_file(path);
        }
        let id = self.family.ok_or_else(|| CliError::Usage("--family is required".into()))?;
        let allowed: &[&str] = match id {
            FamilyId::Ex31 => &["alpha"],
            FamilyId::Ex32 => &["alpha", "beta"],
            FamilyId::Ex33 => &[],
            FamilyId::Const => &["c"],
            FamilyId::Shift => &["c", "q"],
        };
        let given = [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("c", self.c),
            ("q", self.q),
        ];
        for (name, v) in given {
            if v.is_some() && !allowed.contains(&name) {
                return Err(CliError::Usage(format!("--{name} does not apply to this family")));
            }
        }
        let spec = match id {
            FamilyId::Ex31 => FamilySpec::Ex31 {
                alpha: self.alpha.unwrap_or(2.0),
            },
            FamilyId::Ex32 => FamilySpec::Ex32 {
                alpha: self.alpha.unwrap_or(0.5),
                beta: self.beta.unwrap_or(2.0),
            },
            FamilyId::Ex33 => FamilySpec::Ex33,
            FamilyId::Const => FamilySpec::Constant { c: self.c.unwrap_or(0.0) },
            FamilyId::Shift => FamilySpec::shift_uniform(self.c.unwrap_or(1.0), self.q.unwrap_or(2.0)),
        };
        spec.validate()?;
        Ok(spec)
    }
}

pub fn read_family_file(path: &PathBuf) -> CliResult<FamilySpec> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.clone(),
        source,
    })?;
    let spec: FamilySpec = serde_json::from_str(&text).map_err(|source| CliError::FamilyFile {
        path: path.clone(),
        source,
    })?;
    spec.validate()?;
    Ok(spec)
}
