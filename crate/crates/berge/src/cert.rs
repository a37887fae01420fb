//! Berge path and cycle certificates and a strict verifier.
//!
//! A Berge path of length `k` is `k` distinct edges `e_1..e_k` and `k+1`
//! distinct vertices `v_1..v_{k+1}` with `v_i, v_{i+1} ∈ e_i`; a Berge cycle
//! additionally wraps around with `v_k, v_1 ∈ e_k`. Certificates carry edge
//! ids, not edge sets, so the same object can be checked against any
//! hypergraph that knows those ids.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::hypergraph::{EdgeId, Hypergraph, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CertError {
    #[error("a path of length k needs k+1 vertices and k edges (got {vertices} and {edges})")]
    PathShape { vertices: usize, edges: usize },
    #[error("a cycle of length k needs k vertices and k edges with k >= 2 (got {vertices} and {edges})")]
    CycleShape { vertices: usize, edges: usize },
    #[error("cannot trim a path of length {len} to length {want}")]
    TrimTooLong { len: usize, want: usize },
    #[error("vertex {0} is not on the cycle")]
    NotACycleVertex(VertexId),
}

/// First violated clause when a certificate fails verification.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Violation {
    #[error("vertex at position {index} repeats vertex {vertex}")]
    DuplicateVertex { index: usize, vertex: VertexId },
    #[error("edge at position {index} repeats edge {edge}")]
    DuplicateEdge { index: usize, edge: EdgeId },
    #[error("edge {edge} at position {index} does not exist in the hypergraph")]
    UnknownEdge { index: usize, edge: EdgeId },
    #[error("vertex {vertex} is not in edge {edge} (position {index})")]
    MissingIncidence {
        index: usize,
        vertex: VertexId,
        edge: EdgeId,
    },
    #[error("certificate claims length {claimed} but carries {actual} edges")]
    LengthMismatch { claimed: usize, actual: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BergePath {
    vertices: Vec<VertexId>,
    edges: Vec<EdgeId>,
}

impl BergePath {
    pub fn new(vertices: Vec<VertexId>, edges: Vec<EdgeId>) -> Result<Self, CertError> {
        if edges.is_empty() || vertices.len() != edges.len() + 1 {
            return Err(CertError::PathShape {
                vertices: vertices.len(),
                edges: edges.len(),
            });
        }
        Ok(BergePath { vertices, edges })
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn start(&self) -> VertexId {
        self.vertices[0]
    }

    pub fn end(&self) -> VertexId {
        *self.vertices.last().expect("paths are nonempty")
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn spanned(&self, h: &Hypergraph) -> Result<SpannedSet, Violation> {
        verify_path(h, self)?;
        Ok(span_of(h, &self.edges))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BergeCycle {
    vertices: Vec<VertexId>,
    edges: Vec<EdgeId>,
}

impl BergeCycle {
    pub fn new(vertices: Vec<VertexId>, edges: Vec<EdgeId>) -> Result<Self, CertError> {
        if vertices.len() < 2 || vertices.len() != edges.len() {
            return Err(CertError::CycleShape {
                vertices: vertices.len(),
                edges: edges.len(),
            });
        }
        Ok(BergeCycle { vertices, edges })
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.vertices.contains(&v)
    }

    /// The same cycle, re-indexed so that `v` comes first.
    pub fn rotated_to(&self, v: VertexId) -> Result<BergeCycle, CertError> {
        let pos = self
            .vertices
            .iter()
            .position(|&x| x == v)
            .ok_or(CertError::NotACycleVertex(v))?;
        let mut vertices = self.vertices.clone();
        let mut edges = self.edges.clone();
        vertices.rotate_left(pos);
        edges.rotate_left(pos);
        Ok(BergeCycle { vertices, edges })
    }

    /// The same cycle walked in the opposite direction, keeping the first
    /// vertex first. The old closing edge becomes the first edge.
    pub fn reversed(&self) -> BergeCycle {
        let k = self.len();
        let mut vertices = Vec::with_capacity(k);
        vertices.push(self.vertices[0]);
        vertices.extend(self.vertices[1..].iter().rev().copied());
        let mut edges = Vec::with_capacity(k);
        edges.push(self.edges[k - 1]);
        edges.extend(self.edges[..k - 1].iter().rev().copied());
        BergeCycle { vertices, edges }
    }

    pub fn spanned(&self, h: &Hypergraph) -> Result<SpannedSet, Violation> {
        verify_cycle(h, self)?;
        Ok(span_of(h, &self.edges))
    }
}

/// Union of the vertex sets of a certificate's edges in a reference
/// hypergraph. May strictly contain the certificate's vertex sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpannedSet(pub BTreeSet<VertexId>);

impl SpannedSet {
    pub fn contains(&self, v: VertexId) -> bool {
        self.0.contains(&v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn span_of(h: &Hypergraph, edges: &[EdgeId]) -> SpannedSet {
    let mut out = BTreeSet::new();
    for &e in edges {
        if let Some(set) = h.edge(e) {
            out.extend(set.iter().map(|&v| VertexId(v)));
        }
    }
    SpannedSet(out)
}

fn check_distinct_vertices(vertices: &[VertexId]) -> Result<(), Violation> {
    let mut seen = BTreeSet::new();
    for (index, &v) in vertices.iter().enumerate() {
        if !seen.insert(v) {
            return Err(Violation::DuplicateVertex { index, vertex: v });
        }
    }
    Ok(())
}

fn check_distinct_edges(edges: &[EdgeId]) -> Result<(), Violation> {
    let mut seen = BTreeSet::new();
    for (index, &e) in edges.iter().enumerate() {
        if !seen.insert(e) {
            return Err(Violation::DuplicateEdge { index, edge: e });
        }
    }
    Ok(())
}

fn check_incidence(
    h: &Hypergraph,
    index: usize,
    edge: EdgeId,
    pair: [VertexId; 2],
) -> Result<(), Violation> {
    let set = h.edge(edge).ok_or(Violation::UnknownEdge { index, edge })?;
    for vertex in pair {
        if !set.contains(&vertex.0) {
            return Err(Violation::MissingIncidence {
                index,
                vertex,
                edge,
            });
        }
    }
    Ok(())
}

/// Decides whether `p` is a Berge path in `h`; on failure reports the first
/// violated clause.
pub fn verify_path(h: &Hypergraph, p: &BergePath) -> Result<(), Violation> {
    check_distinct_vertices(&p.vertices)?;
    check_distinct_edges(&p.edges)?;
    for (i, &e) in p.edges.iter().enumerate() {
        check_incidence(h, i, e, [p.vertices[i], p.vertices[i + 1]])?;
    }
    Ok(())
}

/// Decides whether `c` is a Berge cycle in `h`, including the wrap-around
/// incidence `v_k, v_1 ∈ e_k`.
pub fn verify_cycle(h: &Hypergraph, c: &BergeCycle) -> Result<(), Violation> {
    check_distinct_vertices(&c.vertices)?;
    check_distinct_edges(&c.edges)?;
    let k = c.len();
    for (i, &e) in c.edges.iter().enumerate() {
        check_incidence(h, i, e, [c.vertices[i], c.vertices[(i + 1) % k]])?;
    }
    Ok(())
}

/// The prefix of `p` with exactly `k` edges; the start vertex is preserved.
pub fn trim_path(p: &BergePath, k: usize) -> Result<BergePath, CertError> {
    if k > p.len() || k == 0 {
        return Err(CertError::TrimTooLong { len: p.len(), want: k });
    }
    Ok(BergePath {
        vertices: p.vertices[..=k].to_vec(),
        edges: p.edges[..k].to_vec(),
    })
}

/// Rotates `c` so that `v` comes first and drops the closing edge, yielding
/// a path of length `k - 1` starting at `v`.
pub fn cycle_to_rooted_path(c: &BergeCycle, v: VertexId) -> Result<BergePath, CertError> {
    let rotated = c.rotated_to(v)?;
    let k = rotated.len();
    BergePath::new(rotated.vertices, rotated.edges[..k - 1].to_vec())
}

/// Joins two paths sharing exactly the junction vertex `a.end() == b.start()`.
/// The caller is responsible for overall vertex/edge distinctness; the
/// verifier is the final arbiter.
pub fn concat_paths(a: &BergePath, b: &BergePath) -> Result<BergePath, CertError> {
    if a.end() != b.start() {
        return Err(CertError::PathShape {
            vertices: a.vertices.len() + b.vertices.len(),
            edges: a.edges.len() + b.edges.len(),
        });
    }
    let mut vertices = a.vertices.clone();
    vertices.extend_from_slice(&b.vertices[1..]);
    let mut edges = a.edges.clone();
    edges.extend_from_slice(&b.edges);
    BergePath::new(vertices, edges)
}

#[cfg(test)]
pub(crate) fn vids(vs: &[u32]) -> Vec<VertexId> {
    vs.iter().map(|&v| VertexId(v)).collect()
}

#[cfg(test)]
pub(crate) fn eids(es: &[u32]) -> Vec<EdgeId> {
    es.iter().map(|&e| EdgeId(e)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::Hypergraph;

    fn triangle() -> Hypergraph {
        Hypergraph::from_edges(3, &[&[0, 1], &[1, 2], &[0, 2]]).unwrap()
    }

    fn k4_3() -> Hypergraph {
        Hypergraph::from_edges(4, &[&[0, 1, 2], &[0, 1, 3], &[0, 2, 3], &[1, 2, 3]]).unwrap()
    }

    fn path(vs: &[u32], es: &[u32]) -> BergePath {
        BergePath::new(vids(vs), eids(es)).unwrap()
    }

    fn cycle(vs: &[u32], es: &[u32]) -> BergeCycle {
        BergeCycle::new(vids(vs), eids(es)).unwrap()
    }

    #[test]
    fn accepts_triangle_path() {
        let p = path(&[0, 1, 2], &[0, 1]);
        assert_eq!(verify_path(&triangle(), &p), Ok(()));
        assert_eq!(p.len(), 2);
    }

    #[test]
    fn rejects_duplicate_edge() {
        let p = path(&[0, 1, 2], &[0, 0]);
        assert_eq!(
            verify_path(&triangle(), &p),
            Err(Violation::DuplicateEdge {
                index: 1,
                edge: EdgeId(0)
            })
        );
    }

    #[test]
    fn accepts_k4_3_path() {
        // 0,{0,1,2},1,{0,1,3},3,{1,2,3},2
        let p = path(&[0, 1, 3, 2], &[0, 1, 3]);
        assert_eq!(verify_path(&k4_3(), &p), Ok(()));
        assert_eq!(p.len(), 3);
    }

    #[test]
    fn rejects_missing_incidence() {
        let p = path(&[0, 3, 1], &[0, 1]);
        assert_eq!(
            verify_path(&triangle(), &p),
            Err(Violation::UnknownEdge {
                index: 0,
                edge: EdgeId(0)
            })
            .or(Err(Violation::MissingIncidence {
                index: 0,
                vertex: VertexId(3),
                edge: EdgeId(0)
            }))
        );
    }

    #[test]
    fn accepts_triangle_cycle() {
        let c = cycle(&[0, 1, 2], &[0, 1, 2]);
        assert_eq!(verify_cycle(&triangle(), &c), Ok(()));
        assert_eq!(c.len(), 3);
    }

    #[test]
    fn accepts_k4_3_cycle() {
        // (0,1)∈{0,1,2}, (1,2)∈{1,2,3}, (2,3)∈{0,2,3}, (3,0)∈{0,1,3}
        let c = cycle(&[0, 1, 2, 3], &[0, 3, 2, 1]);
        assert_eq!(verify_cycle(&k4_3(), &c), Ok(()));
        assert_eq!(c.len(), 4);
    }

    #[test]
    fn rejects_single_vertex_cycle() {
        assert!(BergeCycle::new(vec![VertexId(0)], vec![EdgeId(0)]).is_err());
    }

    #[test]
    fn spanned_of_triangle_cycle() {
        let c = cycle(&[0, 1, 2], &[0, 1, 2]);
        let span = c.spanned(&triangle()).unwrap();
        assert_eq!(span.0, vids(&[0, 1, 2]).into_iter().collect());
    }

    #[test]
    fn spanned_is_edge_union() {
        let h = Hypergraph::from_edges(7, &[&[1, 2, 4], &[2, 3, 5], &[1, 3, 6]]).unwrap();
        let c = cycle(&[1, 2, 3], &[0, 1, 2]);
        let span = c.spanned(&h).unwrap();
        assert_eq!(span.0, vids(&[1, 2, 3, 4, 5, 6]).into_iter().collect());
    }

    #[test]
    fn spanned_rejects_unverified() {
        let c = cycle(&[0, 1, 2], &[0, 0, 2]);
        assert!(c.spanned(&triangle()).is_err());
    }

    #[test]
    fn trim_keeps_prefix() {
        let p = path(&[0, 1, 2, 3, 4, 5], &[0, 1, 2, 3, 4]);
        let t = trim_path(&p, 3).unwrap();
        assert_eq!(t.vertices(), &vids(&[0, 1, 2, 3])[..]);
        assert_eq!(t.edges(), &eids(&[0, 1, 2])[..]);
        assert_eq!(trim_path(&p, 5).unwrap(), p);
        assert!(trim_path(&p, 6).is_err());
    }

    #[test]
    fn rooted_path_from_triangle_cycle() {
        let c = cycle(&[0, 1, 2], &[0, 1, 2]);
        let p = cycle_to_rooted_path(&c, VertexId(2)).unwrap();
        assert_eq!(p.start(), VertexId(2));
        assert_eq!(p.len(), 2);
        assert_eq!(verify_path(&triangle(), &p), Ok(()));
        // Rotation: 2,{0,2},0,{0,1},1
        assert_eq!(p.vertices(), &vids(&[2, 0, 1])[..]);
        assert_eq!(p.edges(), &eids(&[2, 0])[..]);
    }

    #[test]
    fn rooted_path_from_k4_3_cycle() {
        let c = cycle(&[0, 1, 2, 3], &[0, 3, 2, 1]);
        let p = cycle_to_rooted_path(&c, VertexId(0)).unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p.start(), VertexId(0));
        assert_eq!(verify_path(&k4_3(), &p), Ok(()));
    }

    #[test]
    fn rooted_path_length_decrements() {
        let c = cycle(&[0, 1, 2], &[0, 1, 2]);
        for v in 0..3 {
            let p = cycle_to_rooted_path(&c, VertexId(v)).unwrap();
            assert_eq!(p.len(), c.len() - 1);
        }
    }

    #[test]
    fn reversed_cycle_still_verifies() {
        let c = cycle(&[0, 1, 2, 3], &[0, 3, 2, 1]);
        let r = c.reversed();
        assert_eq!(verify_cycle(&k4_3(), &r), Ok(()));
        assert_eq!(r.vertices()[0], c.vertices()[0]);
    }
}
