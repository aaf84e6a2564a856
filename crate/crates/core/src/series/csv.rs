use std::io::BufRead;

use crate::error::{Error, Result};

/// Reads one nonnegative decimal per line. A non-numeric first line is
/// taken as a header; blank lines are skipped.
pub fn read_terms(reader: impl BufRead) -> Result<Vec<f64>> {
    let mut terms = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::Input {
            line: lineno,
            message: e.to_string(),
        })?;
        let field = line.trim();
        if field.is_empty() {
            continue;
        }
        match field.parse::<f64>() {
            Ok(v) if v.is_finite() && v >= 0.0 => terms.push(v),
            Ok(v) => {
                return Err(Error::Input {
                    line: lineno,
                    message: format!("term {v} is not a nonnegative finite number"),
                })
            }
            Err(_) if lineno == 1 => {}
            Err(_) => {
                return Err(Error::Input {
                    line: lineno,
                    message: format!("cannot parse {field:?} as a number"),
                })
            }
        }
    }
    if terms.is_empty() {
        return Err(Error::Input {
            line: 0,
            message: "no terms found".into(),
        });
    }
    Ok(terms)
}
