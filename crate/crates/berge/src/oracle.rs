//! Exponential-time ground truth at desk scale: exact longest Berge path,
//! fixed-start path existence, fixed-vertex cycle existence, and the
//! edge-count bound experiments.
//!
//! The search is deterministic backtracking over alternating vertex/edge
//! sequences with used-vertex and used-edge sets, expanding in ascending id
//! order. The budget is counted in search-tree nodes, not wall time, so runs
//! are reproducible. Both prunings are proved-safe (a path of length k needs
//! k+1 distinct vertices; a path cannot leave the connected component of its
//! tip), so exactness is preserved.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::cert::{BergeCycle, BergePath};
use crate::gen::{generate, GenError, GeneratorSpec};
use crate::hypergraph::{EdgeId, Hypergraph, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("search budget exhausted after {nodes} nodes")]
    BudgetExceeded { nodes: u64 },
    #[error(transparent)]
    Generation(#[from] GenError),
}

/// Default node budget when none is supplied (also the CLI fallback).
pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PerVertexReport {
    /// Exact maximum Berge path length over paths starting at this vertex.
    pub max_path_from: u32,
    /// Whether a Berge cycle of the queried length passes through this
    /// vertex; `None` when no cycle length was queried.
    pub cycle_through: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleReport {
    pub longest_path_length: u32,
    pub witness: Option<BergePath>,
    pub per_vertex: BTreeMap<VertexId, PerVertexReport>,
}

struct Search<'a> {
    h: &'a Hypergraph,
    incidence: Vec<Vec<EdgeId>>,
    used_v: Vec<bool>,
    used_e: Vec<bool>,
    nodes: u64,
    budget: u64,
}

impl<'a> Search<'a> {
    fn new(h: &'a Hypergraph, budget: u64) -> Self {
        Search {
            h,
            incidence: h.incidence(),
            used_v: vec![false; h.n() as usize],
            used_e: vec![false; h.m() as usize],
            nodes: 0,
            budget,
        }
    }

    fn tick(&mut self) -> Result<(), OracleError> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(OracleError::BudgetExceeded { nodes: self.nodes });
        }
        Ok(())
    }

    /// Vertices and edges reachable from `cur` through unused edges, not
    /// counting already-used vertices. Bounds how far the path can still go.
    fn reachable_slack(&self, cur: u32) -> usize {
        let mut stack = vec![cur];
        let mut seen_v = vec![false; self.h.n() as usize];
        let mut seen_e = vec![false; self.h.m() as usize];
        seen_v[cur as usize] = true;
        let mut fresh_vertices = 0usize;
        let mut fresh_edges = 0usize;
        while let Some(x) = stack.pop() {
            for &e in &self.incidence[x as usize] {
                let ei = e.0 as usize;
                if self.used_e[ei] || seen_e[ei] {
                    continue;
                }
                seen_e[ei] = true;
                fresh_edges += 1;
                for &y in self.h.edge(e).expect("incidence edges exist") {
                    if !seen_v[y as usize] {
                        seen_v[y as usize] = true;
                        if !self.used_v[y as usize] {
                            fresh_vertices += 1;
                        }
                        stack.push(y);
                    }
                }
            }
        }
        fresh_vertices.min(fresh_edges)
    }

    /// Longest extension search. `best` holds (length, witness) and is only
    /// improved, never re-read for equal lengths, so the first witness of
    /// the final maximum is kept.
    fn longest_from(
        &mut self,
        cur: u32,
        stack_v: &mut Vec<u32>,
        stack_e: &mut Vec<u32>,
        best: &mut (u32, Vec<u32>, Vec<u32>),
    ) -> Result<(), OracleError> {
        self.tick()?;
        let len = stack_e.len() as u32;
        if len > best.0 {
            *best = (len, stack_v.clone(), stack_e.clone());
        }
        if len + (self.reachable_slack(cur) as u32) <= best.0 {
            return Ok(());
        }
        for ei in 0..self.incidence[cur as usize].len() {
            let e = self.incidence[cur as usize][ei];
            if self.used_e[e.0 as usize] {
                continue;
            }
            self.used_e[e.0 as usize] = true;
            stack_e.push(e.0);
            let edge: Vec<u32> = self.h.edge(e).unwrap().iter().copied().collect();
            for y in edge {
                if self.used_v[y as usize] {
                    continue;
                }
                self.used_v[y as usize] = true;
                stack_v.push(y);
                self.longest_from(y, stack_v, stack_e, best)?;
                stack_v.pop();
                self.used_v[y as usize] = false;
            }
            stack_e.pop();
            self.used_e[e.0 as usize] = false;
        }
        Ok(())
    }

    /// Finds a path of length exactly `k` from the tip, or proves none.
    fn exact_from(
        &mut self,
        cur: u32,
        k: u32,
        stack_v: &mut Vec<u32>,
        stack_e: &mut Vec<u32>,
    ) -> Result<Option<(Vec<u32>, Vec<u32>)>, OracleError> {
        self.tick()?;
        let len = stack_e.len() as u32;
        if len == k {
            return Ok(Some((stack_v.clone(), stack_e.clone())));
        }
        if len + (self.reachable_slack(cur) as u32) < k {
            return Ok(None);
        }
        for ei in 0..self.incidence[cur as usize].len() {
            let e = self.incidence[cur as usize][ei];
            if self.used_e[e.0 as usize] {
                continue;
            }
            self.used_e[e.0 as usize] = true;
            stack_e.push(e.0);
            let edge: Vec<u32> = self.h.edge(e).unwrap().iter().copied().collect();
            for y in edge {
                if self.used_v[y as usize] {
                    continue;
                }
                self.used_v[y as usize] = true;
                stack_v.push(y);
                let found = self.exact_from(y, k, stack_v, stack_e)?;
                stack_v.pop();
                self.used_v[y as usize] = false;
                if found.is_some() {
                    stack_e.pop();
                    self.used_e[e.0 as usize] = false;
                    return Ok(found);
                }
            }
            stack_e.pop();
            self.used_e[e.0 as usize] = false;
        }
        Ok(None)
    }

    /// Searches for a cycle of length exactly `k` through `start`: a path of
    /// `k - 1` edges from `start` plus an unused closing edge containing both
    /// the tip and `start`.
    fn cycle_from(
        &mut self,
        start: u32,
        cur: u32,
        k: u32,
        stack_v: &mut Vec<u32>,
        stack_e: &mut Vec<u32>,
    ) -> Result<Option<(Vec<u32>, Vec<u32>)>, OracleError> {
        self.tick()?;
        let len = stack_e.len() as u32;
        if len == k - 1 {
            for &e in &self.incidence[cur as usize] {
                if self.used_e[e.0 as usize] {
                    continue;
                }
                if self.h.edge(e).unwrap().contains(&start) {
                    let mut es = stack_e.clone();
                    es.push(e.0);
                    return Ok(Some((stack_v.clone(), es)));
                }
            }
            return Ok(None);
        }
        if len + (self.reachable_slack(cur) as u32) < k - 1 {
            return Ok(None);
        }
        for ei in 0..self.incidence[cur as usize].len() {
            let e = self.incidence[cur as usize][ei];
            if self.used_e[e.0 as usize] {
                continue;
            }
            self.used_e[e.0 as usize] = true;
            stack_e.push(e.0);
            let edge: Vec<u32> = self.h.edge(e).unwrap().iter().copied().collect();
            for y in edge {
                if self.used_v[y as usize] {
                    continue;
                }
                self.used_v[y as usize] = true;
                stack_v.push(y);
                let found = self.cycle_from(start, y, k, stack_v, stack_e)?;
                stack_v.pop();
                self.used_v[y as usize] = false;
                if found.is_some() {
                    stack_e.pop();
                    self.used_e[e.0 as usize] = false;
                    return Ok(found);
                }
            }
            stack_e.pop();
            self.used_e[e.0 as usize] = false;
        }
        Ok(None)
    }
}

/// Exact longest Berge path length with a witness, plus per-start maxima.
pub fn longest_berge_path(h: &Hypergraph, budget: u64) -> Result<OracleReport, OracleError> {
    let mut search = Search::new(h, budget);
    let mut best = (0u32, Vec::new(), Vec::new());
    let mut per_vertex = BTreeMap::new();
    for start in 0..h.n() {
        let before = best.0;
        let mut local_best = (0u32, Vec::new(), Vec::new());
        search.used_v[start as usize] = true;
        let mut sv = vec![start];
        let mut se = Vec::new();
        search.longest_from(start, &mut sv, &mut se, &mut local_best)?;
        search.used_v[start as usize] = false;
        per_vertex.insert(
            VertexId(start),
            PerVertexReport {
                max_path_from: local_best.0,
                cycle_through: None,
            },
        );
        if local_best.0 > before {
            best = local_best;
        }
    }
    let witness = if best.0 > 0 {
        Some(
            BergePath::new(
                best.1.iter().map(|&v| VertexId(v)).collect(),
                best.2.iter().map(|&e| EdgeId(e)).collect(),
            )
            .expect("search paths are well formed"),
        )
    } else {
        None
    };
    Ok(OracleReport {
        longest_path_length: best.0,
        witness,
        per_vertex,
    })
}

/// Full report including, per vertex, whether a cycle of length `cycle_k`
/// passes through it.
pub fn oracle_report(
    h: &Hypergraph,
    cycle_k: Option<u32>,
    budget: u64,
) -> Result<OracleReport, OracleError> {
    let mut report = longest_berge_path(h, budget)?;
    if let Some(k) = cycle_k {
        for v in 0..h.n() {
            let found = exists_cycle_through(h, VertexId(v), k, budget)?;
            report
                .per_vertex
                .get_mut(&VertexId(v))
                .expect("per-vertex entries cover all vertices")
                .cycle_through = Some(found.is_some());
        }
    }
    Ok(report)
}

/// Some(witness) iff a Berge path of length exactly `k` starts at `v`.
pub fn exists_path_from(
    h: &Hypergraph,
    v: VertexId,
    k: u32,
    budget: u64,
) -> Result<Option<BergePath>, OracleError> {
    if v.0 >= h.n() || k == 0 {
        return Ok(None);
    }
    let mut search = Search::new(h, budget);
    search.used_v[v.0 as usize] = true;
    let mut sv = vec![v.0];
    let mut se = Vec::new();
    let found = search.exact_from(v.0, k, &mut sv, &mut se)?;
    Ok(found.map(|(vs, es)| {
        BergePath::new(
            vs.iter().map(|&x| VertexId(x)).collect(),
            es.iter().map(|&e| EdgeId(e)).collect(),
        )
        .expect("search paths are well formed")
    }))
}

/// Some(witness) iff a Berge cycle of length exactly `k` contains `v`.
pub fn exists_cycle_through(
    h: &Hypergraph,
    v: VertexId,
    k: u32,
    budget: u64,
) -> Result<Option<BergeCycle>, OracleError> {
    if v.0 >= h.n() || k < 2 {
        return Ok(None);
    }
    let mut search = Search::new(h, budget);
    search.used_v[v.0 as usize] = true;
    let mut sv = vec![v.0];
    let mut se = Vec::new();
    let found = search.cycle_from(v.0, v.0, k, &mut sv, &mut se)?;
    Ok(found.map(|(vs, es)| {
        BergeCycle::new(
            vs.iter().map(|&x| VertexId(x)).collect(),
            es.iter().map(|&e| EdgeId(e)).collect(),
        )
        .expect("search cycles are well formed")
    }))
}

/// Which edge-count bound applies to an instance with no Berge path of
/// length `k` in an `r`-uniform hypergraph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundRegime {
    /// `k > r + 1 > 3`: `e <= (n / k) * C(k, r)`.
    LongPaths,
    /// `k = r + 1 > 2`: `e <= n`.
    Threshold,
    /// `r >= k > 2`: `e <= n (k - 1) / (r + 1)`.
    ShortPaths,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Theorem1Report {
    pub r: u32,
    pub k: u32,
    pub n: u32,
    pub e: u32,
    pub longest: u32,
    pub regime: BoundRegime,
    /// The hypothesis "no Berge path of length k" holds for this instance.
    pub hypothesis_holds: bool,
    /// The applicable bound holds (vacuously true when the hypothesis
    /// fails).
    pub bound_holds: bool,
    /// The bound is met with equality.
    pub tight: bool,
}

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut out: u128 = 1;
    for i in 0..k {
        out = out * (n - i) as u128 / (i + 1) as u128;
    }
    out
}

fn regime_for(k: u32, r: u32) -> Option<BoundRegime> {
    if k > r + 1 && r + 1 > 3 {
        Some(BoundRegime::LongPaths)
    } else if k == r + 1 && k > 2 {
        Some(BoundRegime::Threshold)
    } else if r >= k && k > 2 {
        Some(BoundRegime::ShortPaths)
    } else {
        None
    }
}

/// Generates the family instance, measures its exact longest Berge path, and
/// if it has no path of length `k`, checks the applicable edge-count bound
/// using exact integer arithmetic.
pub fn check_theorem1_bounds(
    spec: &GeneratorSpec,
    k: u32,
    budget: u64,
) -> Result<Theorem1Report, OracleError> {
    let h = generate(spec)?;
    check_bounds_on(&h, spec.r, k, budget)
}

pub fn check_bounds_on(
    h: &Hypergraph,
    r: u32,
    k: u32,
    budget: u64,
) -> Result<Theorem1Report, OracleError> {
    let regime = regime_for(k, r).unwrap_or(BoundRegime::Threshold);
    let report = longest_berge_path(h, budget)?;
    let (n, e) = (h.n() as u128, h.m() as u128);
    let hypothesis_holds = report.longest_path_length < k;
    // Cross-multiplied forms keep everything in integers.
    let (lhs, rhs) = match regime {
        BoundRegime::LongPaths => (e * k as u128, n * binomial(k as u64, r as u64)),
        BoundRegime::Threshold => (e, n),
        BoundRegime::ShortPaths => (e * (r as u128 + 1), n * (k as u128 - 1)),
    };
    Ok(Theorem1Report {
        r,
        k,
        n: h.n(),
        e: h.m(),
        longest: report.longest_path_length,
        regime,
        hypothesis_holds,
        bound_holds: !hypothesis_holds || lhs <= rhs,
        tight: hypothesis_holds && lhs == rhs,
    })
}
