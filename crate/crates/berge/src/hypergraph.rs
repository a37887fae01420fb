//! Hypergraph model: the immutable root hypergraph plus the mutable,
//! provenance-tracked working structure that the extraction algorithm
//! transforms, together with the structural queries (components, cut
//! vertices, connecting paths) its case analysis needs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cert::BergePath;

/// Index of a vertex, dense in `[0, n)`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u32);

/// Index of an edge, dense in `[0, m)` in the root hypergraph.
///
/// Edge ids are stable across working transformations: shrinking or vertex
/// deletion never changes an edge's id, so certificates found in transformed
/// hypergraphs stay meaningful in the root.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub u32);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HypergraphError {
    #[error("edge {index} references vertex {vertex}, but n = {n}")]
    VertexOutOfRange { index: usize, vertex: u32, n: u32 },
    #[error("edge {index} has {size} vertices; edges need at least two")]
    EdgeTooSmall { index: usize, size: usize },
    #[error("edges {first} and {second} have the same vertex set")]
    DuplicateEdge { first: usize, second: usize },
}

/// An immutable simple hypergraph over vertices `0..n`.
///
/// The uniformity witness `r` is present exactly when every edge has the
/// same size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypergraph {
    n: u32,
    edges: Vec<BTreeSet<u32>>,
    uniform: Option<u32>,
}

impl Hypergraph {
    pub fn new(n: u32, edges: Vec<BTreeSet<u32>>) -> Result<Self, HypergraphError> {
        let mut seen: BTreeMap<&BTreeSet<u32>, usize> = BTreeMap::new();
        for (index, set) in edges.iter().enumerate() {
            if set.len() < 2 {
                return Err(HypergraphError::EdgeTooSmall {
                    index,
                    size: set.len(),
                });
            }
            if let Some(&vertex) = set.iter().find(|&&v| v >= n) {
                return Err(HypergraphError::VertexOutOfRange { index, vertex, n });
            }
            if let Some(&first) = seen.get(set) {
                return Err(HypergraphError::DuplicateEdge {
                    first,
                    second: index,
                });
            }
            seen.insert(set, index);
        }
        let uniform = match edges.first() {
            Some(first) if edges.iter().all(|e| e.len() == first.len()) => {
                Some(first.len() as u32)
            }
            _ => None,
        };
        Ok(Hypergraph { n, edges, uniform })
    }

    /// Convenience constructor from unsorted vertex lists.
    pub fn from_edges(n: u32, edges: &[&[u32]]) -> Result<Self, HypergraphError> {
        Self::new(n, edges.iter().map(|e| e.iter().copied().collect()).collect())
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> u32 {
        self.edges.len() as u32
    }

    /// Uniformity witness: `Some(r)` iff every edge has exactly `r` vertices.
    pub fn r(&self) -> Option<u32> {
        self.uniform
    }

    pub fn edge(&self, id: EdgeId) -> Option<&BTreeSet<u32>> {
        self.edges.get(id.0 as usize)
    }

    pub fn edge_sets(&self) -> impl Iterator<Item = (EdgeId, &BTreeSet<u32>)> {
        self.edges
            .iter()
            .enumerate()
            .map(|(i, s)| (EdgeId(i as u32), s))
    }

    /// Edge ids incident to each vertex, ascending.
    pub fn incidence(&self) -> Vec<Vec<EdgeId>> {
        let mut inc = vec![Vec::new(); self.n as usize];
        for (i, set) in self.edges.iter().enumerate() {
            for &v in set {
                inc[v as usize].push(EdgeId(i as u32));
            }
        }
        inc
    }

    pub fn is_connected(&self) -> bool {
        let w = WorkingHypergraph::full(self);
        w.components().len() == 1
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WorkingError {
    #[error("vertex {0} is not in the working hypergraph")]
    MissingVertex(VertexId),
    #[error("edge {0} is not in the working hypergraph")]
    MissingEdge(EdgeId),
    #[error("vertex {vertex} is not in edge {edge}'s current set")]
    VertexNotInEdge { vertex: VertexId, edge: EdgeId },
    #[error("deleting vertex {vertex} would leave edge {edge} with fewer than two vertices")]
    EdgeWouldVanish { vertex: VertexId, edge: EdgeId },
    #[error("deleting vertex {vertex} would make edges {first} and {second} identical")]
    SimplicityBroken {
        vertex: VertexId,
        first: EdgeId,
        second: EdgeId,
    },
    #[error("operation requires a connected hypergraph")]
    Disconnected,
    #[error("vertex {0} is not a cut vertex")]
    NotACutVertex(VertexId),
    #[error("path endpoints must differ")]
    EqualEndpoints,
    #[error("working invariant violated: {0}")]
    InvariantViolated(String),
}

/// View of one working edge: its stable id, the original edge it descends
/// from, and the current (possibly shrunk) vertex set.
#[derive(Debug, Clone, Copy)]
pub struct WorkingEdge<'w> {
    pub id: EdgeId,
    pub origin: EdgeId,
    pub current: &'w BTreeSet<u32>,
}

/// A mid-recursion hypergraph: a subset of the root's vertices and a current
/// vertex set per surviving edge. Each working edge descends from exactly one
/// root edge (here the key itself), and its current set is always a subset
/// of that root edge's set.
#[derive(Clone, Debug)]
pub struct WorkingHypergraph<'a> {
    root: &'a Hypergraph,
    vertices: BTreeSet<u32>,
    current: BTreeMap<u32, BTreeSet<u32>>,
    deleted_vertex: Option<VertexId>,
}

impl<'a> WorkingHypergraph<'a> {
    /// The whole root hypergraph as a working structure.
    pub fn full(root: &'a Hypergraph) -> Self {
        WorkingHypergraph {
            root,
            vertices: (0..root.n()).collect(),
            current: root
                .edge_sets()
                .map(|(id, set)| (id.0, set.clone()))
                .collect(),
            deleted_vertex: None,
        }
    }

    pub fn root(&self) -> &'a Hypergraph {
        self.root
    }

    pub fn n(&self) -> u32 {
        self.vertices.len() as u32
    }

    pub fn m(&self) -> u32 {
        self.current.len() as u32
    }

    pub fn vertices(&self) -> &BTreeSet<u32> {
        &self.vertices
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.vertices.contains(&v.0)
    }

    pub fn deleted_vertex(&self) -> Option<VertexId> {
        self.deleted_vertex
    }

    pub fn current(&self, e: EdgeId) -> Option<&BTreeSet<u32>> {
        self.current.get(&e.0)
    }

    pub fn edges(&self) -> impl Iterator<Item = WorkingEdge<'_>> {
        self.current.iter().map(|(&id, set)| WorkingEdge {
            id: EdgeId(id),
            origin: EdgeId(id),
            current: set,
        })
    }

    /// Least vertex id, used as the deterministic identity of components.
    pub fn min_vertex(&self) -> Option<VertexId> {
        self.vertices.iter().next().map(|&v| VertexId(v))
    }

    /// `Some(k)` iff every current set has exactly `k` vertices.
    pub fn uniform_size(&self) -> Option<u32> {
        let mut sizes = self.current.values().map(|s| s.len() as u32);
        let first = sizes.next()?;
        sizes.all(|s| s == first).then_some(first)
    }

    /// Edge ids whose current set contains `v`, ascending.
    pub fn edges_at(&self, v: VertexId) -> Vec<EdgeId> {
        self.current
            .iter()
            .filter(|(_, set)| set.contains(&v.0))
            .map(|(&id, _)| EdgeId(id))
            .collect()
    }

    /// Checks the working invariants: current sets are nonempty subsets of
    /// their origin sets and of the vertex set, have at least two vertices,
    /// and are pairwise distinct.
    pub fn validate(&self) -> Result<(), WorkingError> {
        let mut seen: BTreeMap<&BTreeSet<u32>, u32> = BTreeMap::new();
        for (&id, set) in &self.current {
            let origin = self
                .root
                .edge(EdgeId(id))
                .ok_or(WorkingError::MissingEdge(EdgeId(id)))?;
            if set.len() < 2 {
                return Err(WorkingError::InvariantViolated(format!(
                    "edge {id} has current size {}",
                    set.len()
                )));
            }
            if !set.is_subset(origin) {
                return Err(WorkingError::InvariantViolated(format!(
                    "edge {id} current set is not a subset of its origin"
                )));
            }
            if !set.is_subset(&self.vertices) {
                return Err(WorkingError::InvariantViolated(format!(
                    "edge {id} current set leaves the vertex set"
                )));
            }
            if let Some(&first) = seen.get(set) {
                return Err(WorkingError::SimplicityBroken {
                    vertex: self.deleted_vertex.unwrap_or(VertexId(u32::MAX)),
                    first: EdgeId(first),
                    second: EdgeId(id),
                });
            }
            seen.insert(set, id);
        }
        Ok(())
    }

    fn restrict(&self, vertices: BTreeSet<u32>, edge_ids: &[u32]) -> Self {
        WorkingHypergraph {
            root: self.root,
            current: edge_ids
                .iter()
                .map(|id| (*id, self.current[id].clone()))
                .collect(),
            vertices,
            deleted_vertex: self.deleted_vertex,
        }
    }

    /// Maximal connected pieces, ordered by least vertex id. A vertex in no
    /// edge forms a component of its own.
    pub fn components(&self) -> Vec<WorkingHypergraph<'a>> {
        let verts: Vec<u32> = self.vertices.iter().copied().collect();
        let index: BTreeMap<u32, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut uf = UnionFind::new(verts.len());
        for set in self.current.values() {
            let mut it = set.iter();
            if let Some(&first) = it.next() {
                let fi = index[&first];
                for &v in it {
                    uf.union(fi, index[&v]);
                }
            }
        }
        let mut groups: BTreeMap<usize, BTreeSet<u32>> = BTreeMap::new();
        for (i, &v) in verts.iter().enumerate() {
            groups.entry(uf.find(i)).or_default().insert(v);
        }
        let mut edges_of: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
        for (&id, set) in &self.current {
            let rep = uf.find(index[set.iter().next().expect("edges are nonempty")]);
            edges_of.entry(rep).or_default().push(id);
        }
        let mut parts: Vec<(BTreeSet<u32>, Vec<u32>)> = groups
            .into_iter()
            .map(|(rep, vs)| (vs, edges_of.remove(&rep).unwrap_or_default()))
            .collect();
        parts.sort_by_key(|(vs, _)| *vs.iter().next().expect("components are nonempty"));
        parts
            .into_iter()
            .map(|(vs, es)| self.restrict(vs, &es))
            .collect()
    }

    /// Removes `removed_edge` and deletes `v` from the vertex set and from
    /// every remaining current set. Provenance is unchanged.
    pub fn delete_vertex(
        &self,
        v: VertexId,
        removed_edge: EdgeId,
    ) -> Result<WorkingHypergraph<'a>, WorkingError> {
        if !self.vertices.contains(&v.0) {
            return Err(WorkingError::MissingVertex(v));
        }
        let removed = self
            .current
            .get(&removed_edge.0)
            .ok_or(WorkingError::MissingEdge(removed_edge))?;
        if !removed.contains(&v.0) {
            return Err(WorkingError::VertexNotInEdge {
                vertex: v,
                edge: removed_edge,
            });
        }
        let mut current: BTreeMap<u32, BTreeSet<u32>> = BTreeMap::new();
        let mut seen: BTreeMap<BTreeSet<u32>, u32> = BTreeMap::new();
        for (&id, set) in &self.current {
            if id == removed_edge.0 {
                continue;
            }
            let mut set = set.clone();
            set.remove(&v.0);
            if set.len() < 2 {
                return Err(WorkingError::EdgeWouldVanish {
                    vertex: v,
                    edge: EdgeId(id),
                });
            }
            if let Some(&first) = seen.get(&set) {
                return Err(WorkingError::SimplicityBroken {
                    vertex: v,
                    first: EdgeId(first),
                    second: EdgeId(id),
                });
            }
            seen.insert(set.clone(), id);
            current.insert(id, set);
        }
        let mut vertices = self.vertices.clone();
        vertices.remove(&v.0);
        Ok(WorkingHypergraph {
            root: self.root,
            vertices,
            current,
            deleted_vertex: Some(v),
        })
    }

    /// Exactly the vertices whose deletion (from the vertex set and from
    /// every current set) leaves more than one component among the remaining
    /// vertices. Requires a connected input.
    ///
    /// Computed as the vertex-side articulation points of the bipartite
    /// vertex-edge incidence graph, which coincide with hypergraph cut
    /// vertices because every post-deletion component keeps at least one
    /// vertex node.
    pub fn cut_vertices(&self) -> Result<BTreeSet<VertexId>, WorkingError> {
        let verts: Vec<u32> = self.vertices.iter().copied().collect();
        let nv = verts.len();
        if nv == 0 {
            return Ok(BTreeSet::new());
        }
        let index: BTreeMap<u32, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let ne = self.current.len();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nv + ne];
        for (ei, set) in self.current.values().enumerate() {
            let enode = nv + ei;
            for &v in set {
                let vi = index[&v];
                adj[vi].push(enode);
                adj[enode].push(vi);
            }
        }

        let total = nv + ne;
        let mut disc = vec![u32::MAX; total];
        let mut low = vec![0u32; total];
        let mut art = vec![false; total];
        let mut timer = 0u32;
        // Iterative DFS; frames are (node, parent, next adjacency index).
        let mut stack: Vec<(usize, usize, usize)> = vec![(0, usize::MAX, 0)];
        let mut root_children = 0usize;
        disc[0] = timer;
        low[0] = timer;
        timer += 1;
        while let Some(&mut (u, parent, ref mut next)) = stack.last_mut() {
            if *next < adj[u].len() {
                let w = adj[u][*next];
                *next += 1;
                if disc[w] == u32::MAX {
                    if u == 0 {
                        root_children += 1;
                    }
                    disc[w] = timer;
                    low[w] = timer;
                    timer += 1;
                    stack.push((w, u, 0));
                } else if w != parent {
                    low[u] = low[u].min(disc[w]);
                }
            } else {
                stack.pop();
                if let Some(&mut (p, _, _)) = stack.last_mut() {
                    low[p] = low[p].min(low[u]);
                    if p != 0 && low[u] >= disc[p] {
                        art[p] = true;
                    }
                }
            }
        }
        if disc.iter().any(|&d| d == u32::MAX) {
            return Err(WorkingError::Disconnected);
        }
        art[0] = root_children >= 2;
        Ok(verts
            .iter()
            .enumerate()
            .filter(|&(i, _)| art[i])
            .map(|(_, &v)| VertexId(v))
            .collect())
    }

    /// Splits at a cut vertex: the components after deleting `v0`, each with
    /// `v0` restored into every edge it was removed from (and into the
    /// component's vertex set when it has such an edge). Every edge lands in
    /// exactly one part with its current set unchanged.
    pub fn split_at_cut_vertex(
        &self,
        v0: VertexId,
    ) -> Result<Vec<WorkingHypergraph<'a>>, WorkingError> {
        if !self.vertices.contains(&v0.0) {
            return Err(WorkingError::MissingVertex(v0));
        }
        let verts: Vec<u32> = self.vertices.iter().copied().filter(|&v| v != v0.0).collect();
        let index: BTreeMap<u32, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut uf = UnionFind::new(verts.len());
        for set in self.current.values() {
            let mut it = set.iter().filter(|&&v| v != v0.0);
            if let Some(&first) = it.next() {
                let fi = index[&first];
                for &v in it {
                    uf.union(fi, index[&v]);
                }
            }
        }
        let mut groups: BTreeMap<usize, BTreeSet<u32>> = BTreeMap::new();
        for (i, &v) in verts.iter().enumerate() {
            groups.entry(uf.find(i)).or_default().insert(v);
        }
        if groups.len() < 2 {
            return Err(WorkingError::NotACutVertex(v0));
        }
        let mut edges_of: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
        let mut touches_v0: BTreeMap<usize, bool> = BTreeMap::new();
        for (&id, set) in &self.current {
            let anchor = set
                .iter()
                .find(|&&v| v != v0.0)
                .expect("current sets have at least two vertices");
            let rep = uf.find(index[anchor]);
            edges_of.entry(rep).or_default().push(id);
            if set.contains(&v0.0) {
                touches_v0.insert(rep, true);
            }
        }
        let mut parts: Vec<(BTreeSet<u32>, Vec<u32>)> = Vec::new();
        for (rep, mut vs) in groups {
            let es = edges_of.remove(&rep).unwrap_or_default();
            if touches_v0.get(&rep).copied().unwrap_or(false) {
                vs.insert(v0.0);
            }
            parts.push((vs, es));
        }
        parts.sort_by_key(|(vs, _)| {
            *vs.iter()
                .find(|&&v| v != v0.0)
                .expect("split parts contain a vertex besides the cut vertex")
        });
        Ok(parts
            .into_iter()
            .map(|(vs, es)| self.restrict(vs, &es))
            .collect())
    }

    /// Shortest Berge path from `a` to `b` by breadth-first search over the
    /// vertex-edge incidence structure. Shortestness makes the vertices and
    /// edges automatically distinct.
    pub fn connecting_berge_path(
        &self,
        a: VertexId,
        b: VertexId,
    ) -> Result<BergePath, WorkingError> {
        if a == b {
            return Err(WorkingError::EqualEndpoints);
        }
        for v in [a, b] {
            if !self.vertices.contains(&v.0) {
                return Err(WorkingError::MissingVertex(v));
            }
        }
        let mut prev: BTreeMap<u32, (u32, u32)> = BTreeMap::new(); // vertex -> (prev vertex, edge)
        let mut queue = std::collections::VecDeque::new();
        let mut seen = BTreeSet::new();
        seen.insert(a.0);
        queue.push_back(a.0);
        'bfs: while let Some(x) = queue.pop_front() {
            for e in self.edges_at(VertexId(x)) {
                for &y in &self.current[&e.0] {
                    if seen.insert(y) {
                        prev.insert(y, (x, e.0));
                        if y == b.0 {
                            break 'bfs;
                        }
                        queue.push_back(y);
                    }
                }
            }
        }
        if !prev.contains_key(&b.0) {
            return Err(WorkingError::Disconnected);
        }
        let mut vertices = vec![b];
        let mut edges = Vec::new();
        let mut cur = b.0;
        while cur != a.0 {
            let (p, e) = prev[&cur];
            edges.push(EdgeId(e));
            vertices.push(VertexId(p));
            cur = p;
        }
        vertices.reverse();
        edges.reverse();
        Ok(BergePath::new(vertices, edges).expect("BFS paths are well formed"))
    }

    /// Incidence check against the current sets, used before lifting a
    /// certificate to the root hypergraph.
    pub fn path_holds_here(&self, p: &BergePath) -> bool {
        p.edges().iter().enumerate().all(|(i, e)| {
            self.current(*e).is_some_and(|set| {
                set.contains(&p.vertices()[i].0) && set.contains(&p.vertices()[i + 1].0)
            })
        })
    }

    /// Cycle counterpart of [`Self::path_holds_here`].
    pub fn cycle_holds_here(&self, c: &crate::cert::BergeCycle) -> bool {
        let k = c.len();
        c.edges().iter().enumerate().all(|(i, e)| {
            self.current(*e).is_some_and(|set| {
                set.contains(&c.vertices()[i].0) && set.contains(&c.vertices()[(i + 1) % k].0)
            })
        })
    }

    pub(crate) fn shrink_edge(&mut self, e: EdgeId, u: u32) {
        if let Some(set) = self.current.get_mut(&e.0) {
            set.remove(&u);
        }
    }

    /// Component representatives when `skip` is ignored. Returns the sorted
    /// vertex list and, aligned with it, each vertex's group representative
    /// index. Avoids materializing the parts. The dense lookup keyed by root
    /// vertex id keeps this cheap enough to run once per shrink candidate.
    pub(crate) fn component_roots_excluding(&self, skip: Option<EdgeId>) -> (Vec<u32>, Vec<usize>) {
        let verts: Vec<u32> = self.vertices.iter().copied().collect();
        let mut index = vec![usize::MAX; self.root.n() as usize];
        for (i, &v) in verts.iter().enumerate() {
            index[v as usize] = i;
        }
        let mut uf = UnionFind::new(verts.len());
        for (&id, set) in &self.current {
            if skip.is_some_and(|s| s.0 == id) {
                continue;
            }
            let mut it = set.iter();
            if let Some(&first) = it.next() {
                let fi = index[first as usize];
                for &v in it {
                    uf.union(fi, index[v as usize]);
                }
            }
        }
        let roots: Vec<usize> = (0..verts.len()).map(|i| uf.find(i)).collect();
        (verts, roots)
    }

    /// The components of this hypergraph with edge `skip` deleted, ordered by
    /// least vertex id.
    pub(crate) fn components_excluding_edge(&self, skip: EdgeId) -> Vec<WorkingHypergraph<'a>> {
        let (verts, roots) = self.component_roots_excluding(Some(skip));
        let index: BTreeMap<u32, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut groups: BTreeMap<usize, BTreeSet<u32>> = BTreeMap::new();
        for (i, &v) in verts.iter().enumerate() {
            groups.entry(roots[i]).or_default().insert(v);
        }
        let mut edges_of: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
        for (&id, set) in &self.current {
            if id == skip.0 {
                continue;
            }
            let rep = roots[index[set.iter().next().expect("edges are nonempty")]];
            edges_of.entry(rep).or_default().push(id);
        }
        let mut parts: Vec<(BTreeSet<u32>, Vec<u32>)> = groups
            .into_iter()
            .map(|(rep, vs)| (vs, edges_of.remove(&rep).unwrap_or_default()))
            .collect();
        parts.sort_by_key(|(vs, _)| *vs.iter().next().expect("components are nonempty"));
        parts
            .into_iter()
            .map(|(vs, es)| self.restrict(vs, &es))
            .collect()
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Lower root wins so representatives are stable.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}
