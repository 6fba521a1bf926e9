use std::fmt;
use std::str::FromStr;

use super::Poset;
use crate::error::{Error, Result};

impl fmt::Display for Poset {
    /// `poset <n>` followed by one `<u> <v>` line per cover pair.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "poset {}", self.len())?;
        for (u, v) in self.covers() {
            writeln!(f, "{u} {v}")?;
        }
        Ok(())
    }
}

impl FromStr for Poset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (p, rest) = parse_prefix(s)?;
        if let Some((line, _)) = rest.first() {
            return Err(parse_err(*line, "unexpected content after cover pairs"));
        }
        Ok(p)
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Significant lines of `s` with comments and blanks removed, numbered from 1.
pub(crate) fn significant_lines(s: &str) -> Vec<(usize, &str)> {
    s.lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let line = raw.split('#').next().unwrap_or("").trim();
            (!line.is_empty()).then_some((i + 1, line))
        })
        .collect()
}

/// Parses the poset header and cover pairs, stopping at the first line that
/// does not look like a pair. Returns the remaining significant lines.
pub(crate) fn parse_prefix(s: &str) -> Result<(Poset, Vec<(usize, &str)>)> {
    let lines = significant_lines(s);
    let mut iter = lines.into_iter().peekable();
    let (line_no, header) = iter.next().ok_or_else(|| parse_err(0, "missing header"))?;
    let n = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["poset", n] => n
            .parse::<usize>()
            .map_err(|e| parse_err(line_no, format!("bad element count: {e}")))?,
        _ => return Err(parse_err(line_no, "expected `poset <n>`")),
    };
    let mut covers = Vec::new();
    while let Some(&(line_no, line)) = iter.peek() {
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [u, v] = fields.as_slice() else { break };
        let Ok(u) = u.parse::<usize>() else { break };
        let v = v
            .parse::<usize>()
            .map_err(|_| parse_err(line_no, "expected two element ids"))?;
        covers.push((u, v));
        iter.next();
    }
    Ok((Poset::new(n, &covers)?, iter.collect()))
}
