//! Graph file formats: tab-separated edge lists and MatrixMarket coordinate
//! files, plus CSV emission of dense matrices.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::{Graph, Measure};

/// Formats a float with 17 significant digits, enough to round-trip.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Reads a graph, choosing the format by extension (`.mtx` is MatrixMarket,
/// anything else an edge list).
pub fn read_graph(path: impl AsRef<Path>) -> Result<Graph> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("mtx")) {
        parse_matrix_market_str(&text)
    } else {
        parse_edge_list_str(&text)
    }
}

pub fn parse_edge_list(path: impl AsRef<Path>) -> Result<Graph> {
    parse_edge_list_str(&fs::read_to_string(path)?)
}

/// Parses `i<TAB>j<TAB>weight` lines (any whitespace separates fields; a
/// missing weight means 1). `#` starts a comment and an optional `n=<count>`
/// line fixes the node count.
pub fn parse_edge_list_str(text: &str) -> Result<Graph> {
    let mut declared_n: Option<usize> = None;
    let mut edges: Vec<(usize, usize, f64, usize)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("n=") {
            let n = rest.trim().parse().map_err(|_| parse_err(line_no, format!("bad node count {rest:?}")))?;
            declared_n = Some(n);
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if !(2..=3).contains(&fields.len()) {
            return Err(parse_err(line_no, format!("expected `i j [weight]`, got {line:?}")));
        }
        let i: usize = fields[0].parse().map_err(|_| parse_err(line_no, format!("bad node index {:?}", fields[0])))?;
        let j: usize = fields[1].parse().map_err(|_| parse_err(line_no, format!("bad node index {:?}", fields[1])))?;
        let w: f64 = match fields.get(2) {
            Some(s) => s.parse().map_err(|_| parse_err(line_no, format!("bad weight {s:?}")))?,
            None => 1.0,
        };
        if !w.is_finite() || w == 0.0 {
            return Err(parse_err(line_no, format!("edge weight must be finite and nonzero, got {w}")));
        }
        if i == j {
            return Err(Error::SelfLoop { node: i, line: Some(line_no) });
        }
        edges.push((i, j, w, line_no));
    }
    let max_index = edges.iter().map(|e| e.0.max(e.1)).max();
    let n = match (declared_n, max_index) {
        (Some(n), Some(m)) if m >= n => {
            let line = edges.iter().find(|e| e.0.max(e.1) >= n).map(|e| e.3).unwrap_or(0);
            return Err(parse_err(line, format!("node index {m} out of range for n={n}")));
        }
        (Some(n), _) => n,
        (None, Some(m)) => m + 1,
        (None, None) => 0,
    };
    let mut weights = DMatrix::zeros(n, n);
    for (i, j, w, line) in edges {
        if weights[(i, j)] != 0.0 {
            return Err(Error::DuplicateEdge { i: i.min(j), j: i.max(j), line });
        }
        weights[(i, j)] = w;
        weights[(j, i)] = w;
    }
    Graph::new(weights, Measure::Counting)
}

/// Emits the edge list of `graph`, each edge once with `i < j`.
pub fn write_edge_list(graph: &Graph) -> String {
    let mut out = format!("n={}\n", graph.n());
    for (i, j) in graph.edges() {
        let _ = writeln!(out, "{i}\t{j}\t{}", fmt_f64(graph.weight(i, j)));
    }
    out
}

pub fn parse_matrix_market(path: impl AsRef<Path>) -> Result<Graph> {
    parse_matrix_market_str(&fs::read_to_string(path)?)
}

/// Parses a square MatrixMarket `coordinate` file with `real`, `integer` or
/// `pattern` entries (pattern entries get unit weight), stored either
/// `symmetric` (one triangle) or `general` (both triangles). Indices are
/// converted from 1-based.
pub fn parse_matrix_market_str(text: &str) -> Result<Graph> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| Error::UnsupportedFormat("empty file".into()))?;
    let tokens: Vec<String> = header.split_whitespace().map(|t| t.to_ascii_lowercase()).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(Error::UnsupportedFormat(format!("bad MatrixMarket header {header:?}")));
    }
    if tokens[2] != "coordinate" {
        return Err(Error::UnsupportedFormat(format!("{} storage", tokens[2])));
    }
    let pattern = match tokens[3].as_str() {
        "real" | "integer" => false,
        "pattern" => true,
        other => return Err(Error::UnsupportedFormat(format!("{other} field"))),
    };
    let symmetric = match tokens[4].as_str() {
        "symmetric" => true,
        "general" => false,
        other => return Err(Error::UnsupportedFormat(format!("{other} symmetry"))),
    };

    let mut size: Option<(usize, usize)> = None;
    let mut weights = DMatrix::zeros(0, 0);
    let mut seen = 0usize;
    for (idx, raw) in lines {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let Some((n, _)) = size else {
            if fields.len() != 3 {
                return Err(parse_err(line_no, "expected `rows cols entries`"));
            }
            let nums: Vec<usize> = fields
                .iter()
                .map(|f| f.parse().map_err(|_| parse_err(line_no, format!("bad size field {f:?}"))))
                .collect::<Result<_>>()?;
            if nums[0] != nums[1] {
                return Err(Error::UnsupportedFormat(format!("non-square {}x{} matrix", nums[0], nums[1])));
            }
            size = Some((nums[0], nums[2]));
            weights = DMatrix::zeros(nums[0], nums[0]);
            continue;
        };
        let expected_fields = if pattern { 2 } else { 3 };
        if fields.len() != expected_fields {
            return Err(parse_err(line_no, format!("expected {expected_fields} fields, got {}", fields.len())));
        }
        let index = |s: &str| -> Result<usize> {
            let k: usize = s.parse().map_err(|_| parse_err(line_no, format!("bad index {s:?}")))?;
            if k == 0 || k > n {
                return Err(parse_err(line_no, format!("index {k} out of range 1..={n}")));
            }
            Ok(k - 1)
        };
        let i = index(fields[0])?;
        let j = index(fields[1])?;
        let v: f64 = if pattern {
            1.0
        } else {
            fields[2].parse().map_err(|_| parse_err(line_no, format!("bad value {:?}", fields[2])))?
        };
        seen += 1;
        if v == 0.0 {
            continue;
        }
        if i == j {
            return Err(Error::SelfLoop { node: i, line: Some(line_no) });
        }
        let existing = weights[(i, j)];
        if existing != 0.0 && (!symmetric || existing != v) {
            return Err(Error::DuplicateEdge { i: i.min(j), j: i.max(j), line: line_no });
        }
        weights[(i, j)] = v;
        if symmetric {
            weights[(j, i)] = v;
        }
    }
    let (_, nnz) = size.ok_or_else(|| Error::UnsupportedFormat("missing size line".into()))?;
    if seen != nnz {
        return Err(parse_err(0, format!("size line declares {nnz} entries, found {seen}")));
    }
    Graph::new(weights, Measure::Counting)
}

/// Emits a `real symmetric` MatrixMarket file (lower triangle, 1-based).
pub fn write_matrix_market(graph: &Graph) -> String {
    let edges = graph.edges();
    let mut out = String::from("%%MatrixMarket matrix coordinate real symmetric\n");
    let _ = writeln!(out, "{} {} {}", graph.n(), graph.n(), edges.len());
    let mut lower: Vec<(usize, usize)> = edges.into_iter().map(|(i, j)| (j, i)).collect();
    lower.sort_by_key(|&(r, c)| (c, r));
    for (r, c) in lower {
        let _ = writeln!(out, "{} {} {}", r + 1, c + 1, fmt_f64(graph.weight(r, c)));
    }
    out
}

/// Dense matrix as CSV, one row per line.
pub fn matrix_csv(m: &DMatrix<f64>) -> String {
    let mut out = String::new();
    for r in m.row_iter() {
        let row: Vec<String> = r.iter().map(|&x| fmt_f64(x)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
