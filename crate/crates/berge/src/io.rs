//! File formats: the line-oriented hypergraph text format and the JSON
//! certificate format, with atomic writes.
//!
//! A hypergraph file is a header line `r n m` followed by `m` edge lines of
//! `r` ascending 0-based vertex ids; `#` starts a comment line. Edge ids are
//! the edge-line positions, and the serializer writes edges in id order, so
//! serializing a parse reproduces the file up to comment stripping.
//! Generated corpora additionally keep edges sorted lexicographically by
//! vertex set, which makes them byte-stable.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cert::{BergeCycle, BergePath};
use crate::extract::{Outcome, ProofTrace};
use crate::hypergraph::{EdgeId, Hypergraph, HypergraphError, VertexId};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Structure(#[from] HypergraphError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("certificate: {0}")]
    Certificate(String),
}

fn parse_err(line: usize, msg: impl Into<String>) -> IoError {
    IoError::Parse {
        line,
        msg: msg.into(),
    }
}

/// Parses the hypergraph text format. Comment and blank lines are skipped;
/// everything else is strict: exactly `m` edge lines, each with exactly `r`
/// strictly ascending vertex ids below `n`, and no duplicate edges.
pub fn parse_hypergraph(text: &str) -> Result<Hypergraph, IoError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (header_no, header) = lines.next().ok_or_else(|| parse_err(0, "empty input"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 {
        return Err(parse_err(header_no, "header must be `r n m`"));
    }
    let parse_u32 = |s: &str, what: &str, line: usize| -> Result<u32, IoError> {
        s.parse::<u32>()
            .map_err(|_| parse_err(line, format!("bad {what} `{s}`")))
    };
    let r = parse_u32(fields[0], "r", header_no)?;
    let n = parse_u32(fields[1], "n", header_no)?;
    let m = parse_u32(fields[2], "m", header_no)?;
    if r < 2 {
        return Err(parse_err(header_no, "uniformity r must be at least 2"));
    }
    let mut edges: Vec<BTreeSet<u32>> = Vec::with_capacity(m as usize);
    for _ in 0..m {
        let (line_no, line) = lines
            .next()
            .ok_or_else(|| parse_err(header_no, format!("expected {m} edge lines")))?;
        let mut edge = BTreeSet::new();
        let mut last: Option<u32> = None;
        for field in line.split_whitespace() {
            let v = parse_u32(field, "vertex id", line_no)?;
            if v >= n {
                return Err(parse_err(line_no, format!("vertex {v} out of range (n = {n})")));
            }
            if last.is_some_and(|p| p >= v) {
                return Err(parse_err(line_no, "vertex ids must be strictly ascending"));
            }
            last = Some(v);
            edge.insert(v);
        }
        if edge.len() != r as usize {
            return Err(parse_err(
                line_no,
                format!("expected {r} vertices, got {}", edge.len()),
            ));
        }
        edges.push(edge);
    }
    if let Some((line_no, _)) = lines.next() {
        return Err(parse_err(line_no, "trailing data after the last edge"));
    }
    Ok(Hypergraph::new(n, edges)?)
}

/// Serializes in the canonical layout: header, then edges in id order with
/// ascending vertex ids.
pub fn serialize_hypergraph(h: &Hypergraph) -> String {
    let r = h.r().unwrap_or_else(|| {
        h.edge_sets()
            .map(|(_, s)| s.len() as u32)
            .next()
            .unwrap_or(2)
    });
    let mut out = format!("{} {} {}\n", r, h.n(), h.m());
    for (_, set) in h.edge_sets() {
        let fields: Vec<String> = set.iter().map(|v| v.to_string()).collect();
        out.push_str(&fields.join(" "));
        out.push('\n');
    }
    out
}

/// The JSON certificate layout: kind, claimed uniformity and length, the
/// vertex/edge id sequences, the resolved edge sets for human readers, and
/// the proof trace.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct CertificateFile {
    pub kind: String,
    pub r: u32,
    pub length: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub start_vertex: Option<u32>,
    pub vertices: Vec<u32>,
    pub edge_ids: Vec<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<Vec<u32>>>,
    #[serde(default)]
    pub trace: ProofTrace,
}

impl CertificateFile {
    pub fn from_outcome(h: &Hypergraph, outcome: &Outcome, trace: &ProofTrace) -> Self {
        let (kind, vertices, edge_ids, start_vertex) = match outcome {
            Outcome::Path(p) => (
                "path",
                p.vertices().to_vec(),
                p.edges().to_vec(),
                Some(p.start().0),
            ),
            Outcome::Cycle(c) => ("cycle", c.vertices().to_vec(), c.edges().to_vec(), None),
        };
        let edges = edge_ids
            .iter()
            .map(|&e| {
                h.edge(e)
                    .map(|s| s.iter().copied().collect::<Vec<u32>>())
                    .unwrap_or_default()
            })
            .collect();
        CertificateFile {
            kind: kind.to_string(),
            r: h.r().unwrap_or(0),
            length: edge_ids.len() as u32,
            start_vertex,
            vertices: vertices.into_iter().map(|v| v.0).collect(),
            edge_ids: edge_ids.into_iter().map(|e| e.0).collect(),
            edges: Some(edges),
            trace: trace.clone(),
        }
    }

    /// Reconstructs the certificate object, checking the file's own
    /// consistency claims (kind, length, start vertex, resolved edge sets)
    /// against the hypergraph before any Berge verification happens.
    pub fn to_outcome(&self, h: &Hypergraph) -> Result<Outcome, IoError> {
        let bad = |msg: &str| IoError::Certificate(msg.to_string());
        if self.length as usize != self.edge_ids.len() {
            return Err(bad("length field does not match the edge count"));
        }
        if h.r() != Some(self.r) {
            return Err(bad("uniformity field does not match the hypergraph"));
        }
        if let Some(listed) = &self.edges {
            if listed.len() != self.edge_ids.len() {
                return Err(bad("resolved edge list has the wrong length"));
            }
            for (&id, resolved) in self.edge_ids.iter().zip(listed) {
                let actual = h
                    .edge(EdgeId(id))
                    .ok_or_else(|| bad("edge id does not exist in the hypergraph"))?;
                let resolved: BTreeSet<u32> = resolved.iter().copied().collect();
                if &resolved != actual {
                    return Err(bad("resolved edge set does not match the hypergraph"));
                }
            }
        }
        let vertices: Vec<VertexId> = self.vertices.iter().map(|&v| VertexId(v)).collect();
        let edges: Vec<EdgeId> = self.edge_ids.iter().map(|&e| EdgeId(e)).collect();
        match self.kind.as_str() {
            "path" => {
                if self.start_vertex != Some(self.vertices[0]) {
                    return Err(bad("start_vertex does not match the first vertex"));
                }
                let p = BergePath::new(vertices, edges)
                    .map_err(|e| bad(&format!("malformed path: {e}")))?;
                Ok(Outcome::Path(p))
            }
            "cycle" => {
                let c = BergeCycle::new(vertices, edges)
                    .map_err(|e| bad(&format!("malformed cycle: {e}")))?;
                Ok(Outcome::Cycle(c))
            }
            other => Err(bad(&format!("unknown certificate kind `{other}`"))),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, IoError> {
        serde_json::from_str(text).map_err(|e| IoError::Certificate(e.to_string()))
    }
}

/// Writes via a temporary file in the target directory plus a rename, so
/// readers never observe a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), IoError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = match dir {
        Some(dir) => tempfile::NamedTempFile::new_in(dir)?,
        None => tempfile::NamedTempFile::new_in(".")?,
    };
    tmp.write_all(contents.as_bytes())?;
    tmp.persist(path).map_err(|e| IoError::Io(e.error))?;
    Ok(())
}
