//! Line-oriented text format for grid specifications:
//!
//! ```text
//! v1
//! dims <nx> <ny> [<nz>]
//! edges <K>
//! <p> <q> <w>        (K lines)
//! unary <N>
//! <value>            (N lines)
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. Numbers are written
//! in shortest round-trip form, so reading back a written file gives the
//! same values bit for bit.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::{GridEdge, GridSpec};

pub fn write_grid_spec<T: Scalar>(spec: &GridSpec<T>) -> String {
    let mut out = String::new();
    out.push_str("v1\n");
    out.push_str("dims");
    for d in spec.dims() {
        let _ = write!(out, " {d}");
    }
    out.push('\n');
    let _ = writeln!(out, "edges {}", spec.edges().len());
    for e in spec.edges() {
        let _ = writeln!(out, "{} {} {}", e.p, e.q, e.weight);
    }
    let _ = writeln!(out, "unary {}", spec.unary().len());
    for u in spec.unary() {
        let _ = writeln!(out, "{u}");
    }
    out
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self, what: &str) -> Result<(usize, &'a str)> {
        for (i, line) in self.inner.by_ref() {
            let line = line.trim();
            self.last = i + 1;
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            return Ok((i + 1, line));
        }
        Err(Error::Parse { line: self.last + 1, msg: format!("unexpected end of input, expected {what}") })
    }
}

fn field<T: std::str::FromStr>(line: usize, tok: Option<&str>, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| Error::Parse { line, msg: format!("missing {what}") })?;
    tok.parse().map_err(|_| Error::Parse { line, msg: format!("invalid {what} '{tok}'") })
}

fn keyword<'a>(line: usize, text: &'a str, key: &str) -> Result<std::str::SplitWhitespace<'a>> {
    let mut toks = text.split_whitespace();
    match toks.next() {
        Some(k) if k == key => Ok(toks),
        other => Err(Error::Parse { line, msg: format!("expected '{key}', found '{}'", other.unwrap_or("")) }),
    }
}

fn no_trailing(line: usize, mut toks: std::str::SplitWhitespace<'_>) -> Result<()> {
    match toks.next() {
        Some(t) => Err(Error::Parse { line, msg: format!("unexpected trailing token '{t}'") }),
        None => Ok(()),
    }
}

pub fn parse_grid_spec<T: Scalar>(text: &str) -> Result<GridSpec<T>> {
    let mut lines = Lines { inner: text.lines().enumerate(), last: 0 };
    let (ln, version) = lines.next("version line")?;
    if version != "v1" {
        return Err(Error::Parse { line: ln, msg: format!("unsupported format version '{version}'") });
    }

    let (ln, text) = lines.next("dims line")?;
    let dims: Vec<usize> = keyword(ln, text, "dims")?
        .map(|t| t.parse().map_err(|_| Error::Parse { line: ln, msg: format!("invalid dimension '{t}'") }))
        .collect::<Result<_>>()?;
    if dims.len() != 2 && dims.len() != 3 {
        return Err(Error::Parse { line: ln, msg: format!("expected 2 or 3 dimensions, got {}", dims.len()) });
    }

    let (ln, text) = lines.next("edges line")?;
    let mut toks = keyword(ln, text, "edges")?;
    let k: usize = field(ln, toks.next(), "edge count")?;
    no_trailing(ln, toks)?;
    let mut edges = Vec::with_capacity(k);
    for _ in 0..k {
        let (ln, text) = lines.next("edge line")?;
        let mut toks = text.split_whitespace();
        let p = field(ln, toks.next(), "edge endpoint")?;
        let q = field(ln, toks.next(), "edge endpoint")?;
        let weight: T = field(ln, toks.next(), "edge weight")?;
        no_trailing(ln, toks)?;
        edges.push(GridEdge { p, q, weight });
    }

    let (ln, text) = lines.next("unary line")?;
    let mut toks = keyword(ln, text, "unary")?;
    let n: usize = field(ln, toks.next(), "unary count")?;
    no_trailing(ln, toks)?;
    let mut unary = Vec::with_capacity(n);
    for _ in 0..n {
        let (ln, text) = lines.next("unary value")?;
        let mut toks = text.split_whitespace();
        unary.push(field::<T>(ln, toks.next(), "unary value")?);
        no_trailing(ln, toks)?;
    }
    if let Ok((ln, extra)) = lines.next("") {
        return Err(Error::Parse { line: ln, msg: format!("unexpected content after unary block: '{extra}'") });
    }
    GridSpec::new(dims, edges, unary)
}

pub fn read_grid_spec<T: Scalar>(path: &Path) -> Result<GridSpec<T>> {
    let text = std::fs::read_to_string(path)?;
    parse_grid_spec(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::synth_random_grid;

    #[test]
    fn round_trip_is_exact() {
        for dims in [vec![4, 3], vec![2, 3, 2]] {
            let spec: GridSpec<f64> = synth_random_grid(&dims, (0.0, 1.0), (-1.0, 1.0), 9).unwrap();
            let text = write_grid_spec(&spec);
            let back: GridSpec<f64> = parse_grid_spec(&text).unwrap();
            assert_eq!(back, spec);
            assert_eq!(write_grid_spec(&back), text);
        }
    }

    #[test]
    fn awkward_values_round_trip() {
        let spec = GridSpec::new(
            vec![2, 1],
            vec![GridEdge { p: 0, q: 1, weight: 0.1 + 0.2 }],
            vec![1e-300, -std::f64::consts::PI],
        )
        .unwrap();
        let back: GridSpec<f64> = parse_grid_spec(&write_grid_spec(&spec)).unwrap();
        assert_eq!(back, spec);
    }

    #[test]
    fn parse_errors_name_the_line() {
        let text = "v1\ndims 2 2\nedges 1\n0 1 abc\nunary 4\n0\n0\n0\n0\n";
        match parse_grid_spec::<f64>(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_grid_spec::<f64>("v2\n").is_err());
        assert!(parse_grid_spec::<f64>("v1\ndims 2 2\nedges 0\nunary 3\n0\n0\n0\n").is_err());
        assert!(parse_grid_spec::<f64>("v1\ndims 2 2\nedges 0\nunary 4\n0\n0\n0\n").is_err());
        assert!(parse_grid_spec::<f64>("v1\ndims 2 2\nedges 0\nunary 4\n0\n0\n0\n0\n0\n").is_err());
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# grid\nv1\n\ndims 2 1\nedges 1\n0 1 0.5\n# data\nunary 2\n-1\n1\n";
        let spec: GridSpec<f64> = parse_grid_spec(text).unwrap();
        assert_eq!(spec.unary(), &[-1.0, 1.0]);
    }
}
