use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// The thirteen convergence modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "&'static str", try_from = "String")]
pub enum ModeTag {
    AlmostSure,
    Probability,
    Lp,
    LInf,
    Distribution,
    CompleteConvergence,
    SLp,
    SAlphaAs,
    SLInf,
    S1d,
    S1StarD,
    S2d,
    S3d,
}

impl ModeTag {
    pub const ALL: [ModeTag; 13] = [
        ModeTag::AlmostSure,
        ModeTag::Probability,
        ModeTag::Lp,
        ModeTag::LInf,
        ModeTag::Distribution,
        ModeTag::CompleteConvergence,
        ModeTag::SLp,
        ModeTag::SAlphaAs,
        ModeTag::SLInf,
        ModeTag::S1d,
        ModeTag::S1StarD,
        ModeTag::S2d,
        ModeTag::S3d,
    ];

    /// Short machine tag used on the command line and in JSON.
    pub fn tag(self) -> &'static str {
        match self {
            ModeTag::AlmostSure => "as",
            ModeTag::Probability => "p",
            ModeTag::Lp => "lp",
            ModeTag::LInf => "linf",
            ModeTag::Distribution => "d",
            ModeTag::CompleteConvergence => "cc",
            ModeTag::SLp => "s-lp",
            ModeTag::SAlphaAs => "s-as",
            ModeTag::SLInf => "s-linf",
            ModeTag::S1d => "s1d",
            ModeTag::S1StarD => "s1star-d",
            ModeTag::S2d => "s2d",
            ModeTag::S3d => "s3d",
        }
    }

    /// Conventional notation.
    pub fn symbol(self) -> &'static str {
        match self {
            ModeTag::AlmostSure => "a.s.",
            ModeTag::Probability => "P",
            ModeTag::Lp => "L^p",
            ModeTag::LInf => "L^inf",
            ModeTag::Distribution => "d",
            ModeTag::CompleteConvergence => "c.c.",
            ModeTag::SLp => "S-L^p",
            ModeTag::SAlphaAs => "S_a-a.s.",
            ModeTag::SLInf => "S-L^inf",
            ModeTag::S1d => "S1-d",
            ModeTag::S1StarD => "S1*-d",
            ModeTag::S2d => "S2-d",
            ModeTag::S3d => "S3-d",
        }
    }

    /// Summability modes; the rest ask whether terms tend to zero.
    pub fn is_series(self) -> bool {
        !matches!(
            self,
            ModeTag::AlmostSure | ModeTag::Probability | ModeTag::Lp | ModeTag::LInf | ModeTag::Distribution
        )
    }

    /// Modes fully decided by their single probe.
    pub fn is_probe_complete(self) -> bool {
        matches!(self, ModeTag::Lp | ModeTag::LInf | ModeTag::SLp | ModeTag::SLInf)
    }

    /// Parses a comma-separated list; `all` expands to every mode.
    pub fn parse_list(s: &str) -> Result<Vec<ModeTag>, Error> {
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            if part == "all" {
                out.extend(ModeTag::ALL);
            } else {
                out.push(part.parse()?);
            }
        }
        if out.is_empty() {
            return Err(Error::Parameter("no modes selected".into()));
        }
        let mut seen = Vec::new();
        out.retain(|m| {
            let fresh = !seen.contains(m);
            seen.push(*m);
            fresh
        });
        Ok(out)
    }

    pub fn valid_tags() -> String {
        let mut tags: Vec<&str> = ModeTag::ALL.iter().map(|m| m.tag()).collect();
        tags.push("all");
        tags.join(", ")
    }
}

impl fmt::Display for ModeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for ModeTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        ModeTag::ALL
            .into_iter()
            .find(|m| m.tag() == s)
            .ok_or_else(|| Error::Parameter(format!("unknown mode {s:?}; valid tags: {}", ModeTag::valid_tags())))
    }
}

impl From<ModeTag> for &'static str {
    fn from(m: ModeTag) -> Self {
        m.tag()
    }
}

impl TryFrom<String> for ModeTag {
    type Error = Error;

    fn try_from(s: String) -> Result<Self, Error> {
        s.parse()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tags_round_trip() {
        for m in ModeTag::ALL {
            assert_eq!(m.tag().parse::<ModeTag>().unwrap(), m);
        }
    }

    #[test]
    fn unknown_tag_lists_valid_ones() {
        let e = "s4d".parse::<ModeTag>().unwrap_err();
        assert!(e.to_string().contains("s1star-d"));
    }

    #[test]
    fn list_parsing() {
        assert_eq!(
            ModeTag::parse_list("s-linf, s2d").unwrap(),
            vec![ModeTag::SLInf, ModeTag::S2d]
        );
        assert_eq!(ModeTag::parse_list("all,cc").unwrap().len(), 13);
        assert!(ModeTag::parse_list("").is_err());
    }

    #[test]
    fn series_split() {
        assert_eq!(ModeTag::ALL.iter().filter(|m| m.is_series()).count(), 8);
    }
}
