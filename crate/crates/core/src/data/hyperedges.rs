//! `hyperedges.tsv`: one hyperedge per line,
//! `edge_id<TAB>weight<TAB>v1,v2,...` with ascending vertex ids.
//!
//! An optional leading comment `# n_vertices<TAB>N` pins the vertex count so
//! that trailing isolated vertices survive a round trip. Without it the count
//! is one past the largest vertex id. Other `#` lines are ignored.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{HgnnError, Result};
use crate::hypergraph::Hypergraph;

/// Vertex counts above this are rejected as malformed.
pub const MAX_VERTICES: usize = 1 << 31;

pub fn hypergraph_to_string(g: &Hypergraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# n_vertices\t{}", g.n_vertices());
    for (e, members) in g.hyperedges().enumerate() {
        let _ = write!(out, "{e}\t{}\t", g.weights()[e]);
        for (k, v) in members.iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            let _ = write!(out, "{v}");
        }
        out.push('\n');
    }
    out
}

pub fn save_hypergraph(g: &Hypergraph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, hypergraph_to_string(g)).map_err(|e| HgnnError::io(path, e))
}

pub fn load_hypergraph(path: impl AsRef<Path>) -> Result<Hypergraph> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| HgnnError::io(path, e))?;
    parse_hypergraph(&bytes, &path.display().to_string(), None)
}

/// Load and require exactly `n_vertices` vertices.
pub fn load_hypergraph_with_n(path: impl AsRef<Path>, n_vertices: usize) -> Result<Hypergraph> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| HgnnError::io(path, e))?;
    parse_hypergraph(&bytes, &path.display().to_string(), Some(n_vertices))
}

/// Iterate `(line_number, text)` over non-empty lines, failing on bad UTF-8.
pub(crate) fn lines<'a>(
    bytes: &'a [u8],
    source: &'a str,
) -> impl Iterator<Item = Result<(usize, &'a str)>> + 'a {
    bytes
        .split(|&b| b == b'\n')
        .enumerate()
        .filter_map(move |(i, raw)| {
            let raw = raw.strip_suffix(b"\r").unwrap_or(raw);
            match std::str::from_utf8(raw) {
                Err(_) => Some(Err(HgnnError::parse(source, i + 1, "invalid UTF-8"))),
                Ok(s) if s.trim().is_empty() => None,
                Ok(s) => Some(Ok((i + 1, s))),
            }
        })
}

pub fn parse_hypergraph(bytes: &[u8], source: &str, expected_n: Option<usize>) -> Result<Hypergraph> {
    let mut declared_n: Option<usize> = None;
    let mut edges: Vec<Vec<usize>> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    let mut max_vertex: Option<usize> = None;

    for item in lines(bytes, source) {
        let (line_no, line) = item?;
        let err = |m: String| HgnnError::parse(source, line_no, m);
        if let Some(comment) = line.strip_prefix('#') {
            let mut parts = comment.trim().split('\t');
            if parts.next().map(str::trim) == Some("n_vertices") {
                if declared_n.is_some() || !edges.is_empty() {
                    return Err(err("n_vertices header must come first and only once".into()));
                }
                let n: usize = parts
                    .next()
                    .and_then(|t| t.trim().parse().ok())
                    .ok_or_else(|| err("malformed n_vertices header".into()))?;
                if n > MAX_VERTICES {
                    return Err(err(format!("vertex count {n} exceeds {MAX_VERTICES}")));
                }
                declared_n = Some(n);
            }
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(err(format!("expected 3 tab-separated fields, found {}", fields.len())));
        }
        let id: usize = fields[0]
            .trim()
            .parse()
            .map_err(|_| err(format!("bad edge id {:?}", fields[0])))?;
        if id != edges.len() {
            return Err(err(format!("edge id {id} out of sequence (expected {})", edges.len())));
        }
        let w: f64 = fields[1]
            .trim()
            .parse()
            .map_err(|_| err(format!("bad weight {:?}", fields[1])))?;
        if !(w > 0.0 && w.is_finite()) {
            return Err(HgnnError::NonPositiveWeight { edge: id, weight: w });
        }
        let list = fields[2].trim();
        let mut members = Vec::new();
        if !list.is_empty() {
            for tok in list.split(',') {
                let v: usize = tok
                    .trim()
                    .parse()
                    .map_err(|_| err(format!("bad vertex id {tok:?}")))?;
                if v >= MAX_VERTICES {
                    return Err(err(format!("vertex id {v} exceeds {MAX_VERTICES}")));
                }
                if members.last().is_some_and(|&prev| prev >= v) {
                    return Err(err("vertex ids must be strictly ascending".into()));
                }
                max_vertex = Some(max_vertex.map_or(v, |m: usize| m.max(v)));
                members.push(v);
            }
        }
        if members.is_empty() {
            return Err(HgnnError::EmptyHyperedge { edge: id });
        }
        edges.push(members);
        weights.push(w);
    }

    let implied = max_vertex.map_or(0, |m| m + 1);
    let n = match (declared_n, expected_n) {
        (Some(d), Some(e)) if d != e => {
            return Err(HgnnError::InconsistentNodeCount(format!(
                "{source} declares {d} vertices, dataset has {e}"
            )))
        }
        (Some(d), _) => d,
        (None, Some(e)) => e,
        (None, None) => implied,
    };
    if implied > n {
        return Err(HgnnError::IndexOutOfRange {
            index: implied - 1,
            n_vertices: n,
        });
    }
    Hypergraph::new(&edges, n, Some(&weights))
}
