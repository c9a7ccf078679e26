//! Small helpers shared by the TSV readers and writers.

use std::io::{BufRead, Write};

use crate::{Error, Result, FORMAT_VERSION};

const HEADER_PREFIX: &str = "# format-version: ";

pub(crate) fn write_header(w: &mut impl Write, kind: &str) -> Result<()> {
    writeln!(w, "{HEADER_PREFIX}{FORMAT_VERSION} {kind}")?;
    Ok(())
}

/// Iterate over data rows, yielding `(1-based line number, fields)`.
///
/// A leading version header is checked when present; other `#` lines and
/// blank lines are skipped.
pub(crate) fn rows<R: BufRead>(reader: R) -> impl Iterator<Item = Result<(usize, Vec<String>)>> {
    reader.lines().enumerate().filter_map(|(i, line)| {
        let lineno = i + 1;
        let line = match line {
            Ok(l) => l,
            Err(e) => return Some(Err(e.into())),
        };
        let line = line.trim_end_matches(['\r', '\n']);
        if let Some(rest) = line.strip_prefix(HEADER_PREFIX) {
            let found = rest.split_whitespace().next().and_then(|v| v.parse::<u32>().ok());
            return match found {
                Some(FORMAT_VERSION) => None,
                Some(found) => Some(Err(Error::FormatVersion { found, expected: FORMAT_VERSION })),
                None => Some(Err(Error::parse(lineno, "bad format-version header"))),
            };
        }
        if line.trim().is_empty() || line.starts_with('#') {
            return None;
        }
        Some(Ok((lineno, line.split('\t').map(str::to_owned).collect())))
    })
}
