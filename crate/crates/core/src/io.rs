//! Text formats for point sets and colorings.
//!
//! Point file: `#` comments, then `x y [multiplicity]` per line. Vertex ids
//! are 0-based in file order, a site of multiplicity `m` taking `m`
//! consecutive ids. Coordinates are written in shortest round-trip form, so
//! reading a written file gives back the identical values.
//!
//! Coloring file: optional `# palette K`, then `id color` per line.
//! Fractional file: `# fractional`, a `p q` line, then `id c1,c2,...`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::coloring::{Coloring, FractionalColoring};
use crate::geometry::Point;
use crate::udg::{GraphError, WeightedPoint, WeightedPointSet};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn parse_err(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Parse {
        line,
        msg: msg.into(),
    }
}

/// Non-empty, non-comment lines with their 1-based line numbers.
fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub fn parse_points(text: &str) -> Result<WeightedPointSet, FormatError> {
    let mut sites = Vec::new();
    for (ln, line) in data_lines(text) {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if !(2..=3).contains(&fields.len()) {
            return Err(parse_err(ln, format!("expected `x y [multiplicity]`, got {line:?}")));
        }
        let num = |s: &str| -> Result<f64, FormatError> {
            s.parse::<f64>()
                .map_err(|e| parse_err(ln, format!("{s:?}: {e}")))
        };
        let (x, y) = (num(fields[0])?, num(fields[1])?);
        let multiplicity = match fields.get(2) {
            None => 1,
            Some(s) => s
                .parse::<u32>()
                .map_err(|e| parse_err(ln, format!("multiplicity {s:?}: {e}")))?,
        };
        let position =
            Point::checked(x, y).map_err(|e| parse_err(ln, e.to_string()))?;
        if multiplicity == 0 {
            return Err(parse_err(ln, "multiplicity must be positive"));
        }
        sites.push(WeightedPoint {
            position,
            multiplicity,
        });
    }
    Ok(WeightedPointSet::new(sites)?)
}

pub fn format_points(ps: &WeightedPointSet) -> String {
    let mut s = String::new();
    for site in ps.sites() {
        let p = site.position;
        if site.multiplicity == 1 {
            writeln!(s, "{:?} {:?}", p.x, p.y).unwrap();
        } else {
            writeln!(s, "{:?} {:?} {}", p.x, p.y, site.multiplicity).unwrap();
        }
    }
    s
}

pub fn read_points(path: &Path) -> Result<WeightedPointSet, FormatError> {
    parse_points(&fs::read_to_string(path)?)
}

pub fn write_points(path: &Path, ps: &WeightedPointSet, comment: Option<&str>) -> Result<(), FormatError> {
    let mut text = String::new();
    if let Some(c) = comment {
        for line in c.lines() {
            writeln!(text, "# {line}").unwrap();
        }
    }
    text.push_str(&format_points(ps));
    fs::write(path, text)?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColoringFile {
    Plain(Coloring),
    Fractional(FractionalColoring),
}

pub fn format_coloring(c: &Coloring) -> String {
    let mut s = format!("# palette {}\n", c.palette_size);
    for (v, color) in c.colors.iter().enumerate() {
        writeln!(s, "{v} {color}").unwrap();
    }
    s
}

pub fn format_fractional(c: &FractionalColoring) -> String {
    let mut s = format!("# fractional\n{} {}\n", c.p, c.q);
    for (v, set) in c.sets.iter().enumerate() {
        let cs: Vec<String> = set.iter().map(u32::to_string).collect();
        writeln!(s, "{v} {}", cs.join(",")).unwrap();
    }
    s
}

/// Collects `id value` rows into a dense vector indexed by id.
fn dense_rows<T: Clone>(rows: Vec<(usize, usize, T)>) -> Result<Vec<T>, FormatError> {
    let mut out: Vec<Option<T>> = vec![None; rows.len()];
    for (ln, id, value) in rows {
        match out.get_mut(id) {
            None => return Err(parse_err(ln, format!("id {id} out of range"))),
            Some(Some(_)) => return Err(parse_err(ln, format!("id {id} repeated"))),
            Some(slot) => *slot = Some(value),
        }
    }
    Ok(out.into_iter().map(|v| v.expect("ids form a permutation")).collect())
}

pub fn parse_coloring(text: &str) -> Result<ColoringFile, FormatError> {
    let fractional = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty())
        .is_some_and(|l| l == "# fractional");
    let mut palette = None;
    for line in text.lines() {
        if let Some(rest) = line.trim().strip_prefix("# palette") {
            palette = Some(
                rest.trim()
                    .parse::<u32>()
                    .map_err(|e| parse_err(0, format!("palette: {e}")))?,
            );
        }
    }
    let mut lines = data_lines(text);
    let id_of = |ln: usize, s: &str| -> Result<usize, FormatError> {
        s.parse().map_err(|e| parse_err(ln, format!("id {s:?}: {e}")))
    };
    let color_of = |ln: usize, s: &str| -> Result<u32, FormatError> {
        s.parse().map_err(|e| parse_err(ln, format!("color {s:?}: {e}")))
    };
    if fractional {
        let (ln, header) = lines.next().ok_or_else(|| parse_err(1, "missing `p q` header"))?;
        let pq: Vec<&str> = header.split_whitespace().collect();
        if pq.len() != 2 {
            return Err(parse_err(ln, "expected `p q`"));
        }
        let (p, q) = (color_of(ln, pq[0])?, color_of(ln, pq[1])?);
        let mut rows = Vec::new();
        for (ln, line) in lines {
            let (id, set) = line
                .split_once(char::is_whitespace)
                .ok_or_else(|| parse_err(ln, "expected `id c1,c2,...`"))?;
            let set = set
                .trim()
                .split(',')
                .filter(|s| !s.is_empty())
                .map(|s| color_of(ln, s.trim()))
                .collect::<Result<Vec<u32>, _>>()?;
            rows.push((ln, id_of(ln, id)?, set));
        }
        return Ok(ColoringFile::Fractional(FractionalColoring {
            p,
            q,
            sets: dense_rows(rows)?,
        }));
    }
    let mut rows = Vec::new();
    for (ln, line) in lines {
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 2 {
            return Err(parse_err(ln, "expected `id color`"));
        }
        rows.push((ln, id_of(ln, f[0])?, color_of(ln, f[1])?));
    }
    let colors = dense_rows(rows)?;
    let palette_size = palette.unwrap_or_else(|| colors.iter().max().map_or(0, |c| c + 1));
    Ok(ColoringFile::Plain(Coloring {
        colors,
        palette_size,
    }))
}

pub fn read_coloring(path: &Path) -> Result<ColoringFile, FormatError> {
    parse_coloring(&fs::read_to_string(path)?)
}
