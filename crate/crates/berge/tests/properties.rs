//! Property tests and double-entry checks: the structural queries against
//! naive recomputations, the verifier against a direct transcription of the
//! definitions, and the search oracle against an independently coded
//! edge-sequence-first enumerator.

use std::collections::BTreeSet;

use proptest::prelude::*;

use berge::extract::{extract_with_inspector, Outcome};
use berge::gen::{complete_blocks, glued_blocks, random_connected};
use berge::hypergraph::{EdgeId, Hypergraph, VertexId, WorkingHypergraph};
use berge::oracle::{exists_cycle_through, exists_path_from, longest_berge_path, DEFAULT_BUDGET};
use berge::{
    cycle_to_rooted_path, extract, trim_path, verify_cycle, verify_path, BergeCycle, BergePath,
};

// ---------------------------------------------------------------------------
// Independent re-implementations used as oracles
// ---------------------------------------------------------------------------

/// Direct transcription of the Berge path definition.
fn naive_verify_path(h: &Hypergraph, vertices: &[u32], edges: &[u32]) -> bool {
    if vertices.len() != edges.len() + 1 || edges.is_empty() {
        return false;
    }
    let vs: BTreeSet<u32> = vertices.iter().copied().collect();
    let es: BTreeSet<u32> = edges.iter().copied().collect();
    if vs.len() != vertices.len() || es.len() != edges.len() {
        return false;
    }
    edges.iter().enumerate().all(|(i, &e)| {
        h.edge(EdgeId(e)).is_some_and(|set| {
            set.contains(&vertices[i]) && set.contains(&vertices[i + 1])
        })
    })
}

/// Direct transcription of the Berge cycle definition (k >= 2).
fn naive_verify_cycle(h: &Hypergraph, vertices: &[u32], edges: &[u32]) -> bool {
    let k = vertices.len();
    if k < 2 || edges.len() != k {
        return false;
    }
    let vs: BTreeSet<u32> = vertices.iter().copied().collect();
    let es: BTreeSet<u32> = edges.iter().copied().collect();
    if vs.len() != k || es.len() != k {
        return false;
    }
    edges.iter().enumerate().all(|(i, &e)| {
        h.edge(EdgeId(e)).is_some_and(|set| {
            set.contains(&vertices[i]) && set.contains(&vertices[(i + 1) % k])
        })
    })
}

/// Edge-sequence-first longest-path enumerator: for every k-permutation of
/// edge ids, decide whether a compatible distinct vertex assignment exists.
/// Structurally unlike the production search, which walks vertex by vertex.
fn second_longest(h: &Hypergraph) -> u32 {
    let m = h.m() as usize;
    let max_k = m.min(h.n().saturating_sub(1) as usize);
    for k in (1..=max_k).rev() {
        let mut perm = Vec::new();
        let mut used = vec![false; m];
        if some_permutation_admits(h, k, &mut perm, &mut used) {
            return k as u32;
        }
    }
    0
}

fn some_permutation_admits(
    h: &Hypergraph,
    k: usize,
    perm: &mut Vec<u32>,
    used: &mut Vec<bool>,
) -> bool {
    if perm.len() == k {
        let mut vertices = Vec::new();
        return vertex_assignment_exists(h, perm, 0, &mut vertices);
    }
    for e in 0..h.m() {
        if used[e as usize] {
            continue;
        }
        used[e as usize] = true;
        perm.push(e);
        if some_permutation_admits(h, k, perm, used) {
            return true;
        }
        perm.pop();
        used[e as usize] = false;
    }
    false
}

fn vertex_assignment_exists(
    h: &Hypergraph,
    edges: &[u32],
    pos: usize,
    vertices: &mut Vec<u32>,
) -> bool {
    if pos == edges.len() + 1 {
        return true;
    }
    // v_1 ranges over e_1; v_{i+1} over e_i; consecutive membership in the
    // next edge is enforced when that pair is checked.
    let candidates: Vec<u32> = if pos == 0 {
        h.edge(EdgeId(edges[0])).unwrap().iter().copied().collect()
    } else {
        h.edge(EdgeId(edges[pos - 1]))
            .unwrap()
            .iter()
            .copied()
            .collect()
    };
    // The previous vertex must also lie in this edge; no candidate can fix
    // that, so fail the whole position.
    if pos > 0 && !h.edge(EdgeId(edges[pos - 1])).unwrap().contains(&vertices[pos - 1]) {
        return false;
    }
    for v in candidates {
        if vertices.contains(&v) {
            continue;
        }
        vertices.push(v);
        if vertex_assignment_exists(h, edges, pos + 1, vertices) {
            return true;
        }
        vertices.pop();
    }
    false
}

/// Shortest alternating distance between two vertices, recomputed directly.
fn bfs_distance(w: &WorkingHypergraph, a: u32, b: u32) -> Option<usize> {
    let mut dist = std::collections::BTreeMap::new();
    dist.insert(a, 0usize);
    let mut queue = std::collections::VecDeque::from([a]);
    while let Some(x) = queue.pop_front() {
        for e in w.edges_at(VertexId(x)) {
            for &y in w.current(e).unwrap() {
                if !dist.contains_key(&y) {
                    dist.insert(y, dist[&x] + 1);
                    queue.push_back(y);
                }
            }
        }
    }
    dist.get(&b).copied()
}

fn small_instance(r: u32, n: u32, m: u32, seed: u64) -> Option<Hypergraph> {
    random_connected(r, n, m, seed).ok()
}

// ---------------------------------------------------------------------------
// Structural query properties
// ---------------------------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn components_partition_the_hypergraph(seed in 0u64..500, n in 4u32..9, extra in 0u32..3) {
        // Two disjoint random pieces glued into one vertex set.
        let Some(a) = small_instance(3, n, n + extra, seed) else { return Ok(()) };
        let mut edges: Vec<BTreeSet<u32>> = a.edge_sets().map(|(_, s)| s.clone()).collect();
        edges.push([n, n + 1].into_iter().collect());
        let h = Hypergraph::new(n + 2, edges).unwrap();
        let w = WorkingHypergraph::full(&h);
        let comps = w.components();
        // Vertex sets are disjoint and cover everything.
        let mut seen = BTreeSet::new();
        for c in &comps {
            for &v in c.vertices() {
                prop_assert!(seen.insert(v), "vertex {v} in two components");
            }
            prop_assert_eq!(c.components().len(), 1, "component not connected");
        }
        prop_assert_eq!(seen.len() as u32, h.n());
        // Every edge lands in exactly one part, entirely.
        let total_edges: u32 = comps.iter().map(|c| c.m()).sum();
        prop_assert_eq!(total_edges, h.m());
        for c in &comps {
            for e in c.edges() {
                prop_assert!(e.current.is_subset(c.vertices()));
            }
        }
    }

    #[test]
    fn cut_vertices_match_naive_deletion(seed in 0u64..400, n in 4u32..9, extra in 0u32..3) {
        let Some(h) = small_instance(3, n, n + extra, seed) else { return Ok(()) };
        let w = WorkingHypergraph::full(&h);
        let fast = w.cut_vertices().unwrap();
        let mut naive = BTreeSet::new();
        for &v in w.vertices() {
            let remaining: Vec<u32> = w.vertices().iter().copied().filter(|&x| x != v).collect();
            if remaining.is_empty() { continue; }
            // components among remaining vertices after deleting v everywhere
            let mut reps: std::collections::BTreeMap<u32, u32> =
                remaining.iter().map(|&x| (x, x)).collect();
            fn find(reps: &mut std::collections::BTreeMap<u32, u32>, x: u32) -> u32 {
                let mut x = x;
                while reps[&x] != x { x = reps[&x]; }
                x
            }
            for e in w.edges() {
                let verts: Vec<u32> = e.current.iter().copied().filter(|&x| x != v).collect();
                for pair in verts.windows(2) {
                    let (ra, rb) = (find(&mut reps, pair[0]), find(&mut reps, pair[1]));
                    if ra != rb { let lo = ra.min(rb); let hi = ra.max(rb); reps.insert(hi, lo); }
                }
            }
            let roots: BTreeSet<u32> = remaining.iter().map(|&x| find(&mut reps, x)).collect();
            if roots.len() > 1 { naive.insert(VertexId(v)); }
        }
        prop_assert_eq!(fast, naive);
    }

    #[test]
    fn split_identities_on_glued_instances(blocks in 2u32..5, block_size in 3u32..6, r in 2u32..4) {
        prop_assume!(block_size >= r);
        let h = glued_blocks(r, block_size, blocks).unwrap();
        let w = WorkingHypergraph::full(&h);
        for v0 in w.cut_vertices().unwrap() {
            let parts = w.split_at_cut_vertex(v0).unwrap();
            let edge_sum: u32 = parts.iter().map(|p| p.m()).sum();
            let vertex_sum: u32 = parts.iter().map(|p| p.n() - 1).sum();
            prop_assert_eq!(edge_sum, h.m());
            prop_assert_eq!(vertex_sum, h.n() - 1);
            for p in &parts {
                p.validate().unwrap();
            }
        }
    }

    #[test]
    fn connecting_path_is_shortest_and_valid(seed in 0u64..300, n in 4u32..9) {
        let Some(h) = small_instance(3, n, n + 1, seed) else { return Ok(()) };
        let w = WorkingHypergraph::full(&h);
        let (a, b) = (0, n - 1);
        let p = w.connecting_berge_path(VertexId(a), VertexId(b)).unwrap();
        prop_assert_eq!(verify_path(&h, &p), Ok(()));
        prop_assert_eq!(p.start(), VertexId(a));
        prop_assert_eq!(p.end(), VertexId(b));
        prop_assert_eq!(Some(p.len()), bfs_distance(&w, a, b));
    }
}

/// Deleting a vertex (with an incident edge removed) keeps current sets
/// pairwise distinct, on every uniform instance of an exhaustive sweep of
/// 3-uniform hypergraphs on five vertices.
#[test]
fn delete_vertex_preserves_simplicity_exhaustively() {
    let triples: Vec<BTreeSet<u32>> = {
        let mut out = Vec::new();
        for a in 0..5u32 {
            for b in a + 1..5 {
                for c in b + 1..5 {
                    out.push([a, b, c].into_iter().collect());
                }
            }
        }
        out
    };
    let mut checked = 0u64;
    for mask in 1u32..(1 << 10) {
        let edges: Vec<BTreeSet<u32>> = triples
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, t)| t.clone())
            .collect();
        let h = Hypergraph::new(5, edges).unwrap();
        let w = WorkingHypergraph::full(&h);
        for e in w.edges().map(|e| e.id).collect::<Vec<_>>() {
            for &v in h.edge(e).unwrap() {
                match w.delete_vertex(VertexId(v), e) {
                    Ok(w2) => {
                        w2.validate().unwrap();
                        checked += 1;
                    }
                    Err(err) => panic!("deletion failed on mask {mask}: {err}"),
                }
            }
        }
    }
    assert!(checked > 10_000);
}

// ---------------------------------------------------------------------------
// Verifier double-entry and certificate transforms
// ---------------------------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    /// The verifier agrees with the naive transcription on arbitrary
    /// alternating sequences (mostly invalid ones).
    #[test]
    fn verifier_double_entry(
        seed in 0u64..100,
        verts in prop::collection::vec(0u32..7, 2..6),
        edges in prop::collection::vec(0u32..9, 1..6),
    ) {
        let Some(h) = small_instance(3, 6, 7, seed) else { return Ok(()) };
        if verts.len() == edges.len() + 1 {
            if let Ok(p) = BergePath::new(
                verts.iter().map(|&v| VertexId(v)).collect(),
                edges.iter().map(|&e| EdgeId(e)).collect(),
            ) {
                prop_assert_eq!(
                    verify_path(&h, &p).is_ok(),
                    naive_verify_path(&h, &verts, &edges)
                );
            }
        }
        if verts.len() == edges.len() {
            if let Ok(c) = BergeCycle::new(
                verts.iter().map(|&v| VertexId(v)).collect(),
                edges.iter().map(|&e| EdgeId(e)).collect(),
            ) {
                prop_assert_eq!(
                    verify_cycle(&h, &c).is_ok(),
                    naive_verify_cycle(&h, &verts, &edges)
                );
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Trimming and cycle-rooting preserve verifier acceptance and the
    /// start-vertex contract; spans contain the certificate vertices.
    #[test]
    fn certificate_transforms_preserve_acceptance(seed in 0u64..300, n in 5u32..9) {
        let Some(h) = small_instance(3, n, n + 2, seed) else { return Ok(()) };
        let report = longest_berge_path(&h, DEFAULT_BUDGET).unwrap();
        let Some(witness) = report.witness else { return Ok(()) };
        prop_assert_eq!(verify_path(&h, &witness), Ok(()));
        for k in 1..=witness.len() {
            let t = trim_path(&witness, k).unwrap();
            prop_assert_eq!(verify_path(&h, &t), Ok(()));
            prop_assert_eq!(t.start(), witness.start());
            prop_assert_eq!(t.len(), k);
        }
        let span = witness.spanned(&h).unwrap();
        for v in witness.vertices() {
            prop_assert!(span.contains(*v));
        }
        // Rooted paths from any oracle-found cycle.
        if let Some(cycle) = exists_cycle_through(&h, VertexId(0), 4, DEFAULT_BUDGET).unwrap() {
            prop_assert_eq!(verify_cycle(&h, &cycle), Ok(()));
            for &v in cycle.vertices() {
                let rooted = cycle_to_rooted_path(&cycle, v).unwrap();
                prop_assert_eq!(verify_path(&h, &rooted), Ok(()));
                prop_assert_eq!(rooted.start(), v);
                prop_assert_eq!(rooted.len(), cycle.len() - 1);
            }
            let cspan = cycle.spanned(&h).unwrap();
            for v in cycle.vertices() {
                prop_assert!(cspan.contains(*v));
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Oracle properties
// ---------------------------------------------------------------------------

/// The production search agrees with the edge-sequence-first enumerator on
/// every instance of an exhaustive family with n <= 5.
#[test]
fn oracle_double_entry_small() {
    let mut checked = 0u32;
    for seed in 0..40u64 {
        for (n, m) in [(4u32, 3u32), (4, 4), (5, 4), (5, 5), (5, 6)] {
            let Ok(h) = random_connected(2, n, m, seed) else { continue };
            let fast = longest_berge_path(&h, DEFAULT_BUDGET).unwrap();
            assert_eq!(fast.longest_path_length, second_longest(&h), "graph seed {seed}");
            checked += 1;
        }
        for (n, m) in [(5u32, 3u32), (5, 4), (5, 5)] {
            let Ok(h) = random_connected(3, n, m, seed) else { continue };
            let fast = longest_berge_path(&h, DEFAULT_BUDGET).unwrap();
            assert_eq!(fast.longest_path_length, second_longest(&h), "3-uniform seed {seed}");
            checked += 1;
        }
    }
    assert!(checked > 100);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Adding an edge never decreases the longest Berge path.
    #[test]
    fn oracle_monotone_under_edge_addition(seed in 0u64..300, n in 4u32..7) {
        let Some(h) = small_instance(3, n, n, seed) else { return Ok(()) };
        let before = longest_berge_path(&h, DEFAULT_BUDGET).unwrap().longest_path_length;
        // first absent triple, if any
        let existing: BTreeSet<BTreeSet<u32>> = h.edge_sets().map(|(_, s)| s.clone()).collect();
        let mut added = None;
        'outer: for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    let t: BTreeSet<u32> = [a, b, c].into_iter().collect();
                    if !existing.contains(&t) {
                        added = Some(t);
                        break 'outer;
                    }
                }
            }
        }
        let Some(t) = added else { return Ok(()) };
        let mut edges: Vec<BTreeSet<u32>> = h.edge_sets().map(|(_, s)| s.clone()).collect();
        edges.push(t);
        let bigger = Hypergraph::new(n, edges).unwrap();
        let after = longest_berge_path(&bigger, DEFAULT_BUDGET).unwrap().longest_path_length;
        prop_assert!(after >= before);
    }

    /// A path of length k from v contains one of length k-1 from v.
    #[test]
    fn oracle_prefix_closure(seed in 0u64..300, n in 4u32..8, k in 2u32..4) {
        let Some(h) = small_instance(3, n, n + 1, seed) else { return Ok(()) };
        for v in 0..n {
            if exists_path_from(&h, VertexId(v), k, DEFAULT_BUDGET).unwrap().is_some() {
                prop_assert!(
                    exists_path_from(&h, VertexId(v), k - 1, DEFAULT_BUDGET).unwrap().is_some()
                );
            }
        }
    }

    /// Theorem contract on random instances: the working states seen by the
    /// extraction all satisfy the structural invariants, and the outcome
    /// matches an oracle-confirmed side of the disjunction.
    #[test]
    fn extraction_invariants_and_disjunction(seed in 0u64..200, n in 5u32..8, extra in 0u32..2) {
        let Some(h) = small_instance(3, n, n + extra, seed) else { return Ok(()) };
        let v = VertexId(seed as u32 % n);
        let mut inspector = |w: &WorkingHypergraph| {
            w.validate().unwrap();
        };
        let result = extract_with_inspector(&h, v, &mut inspector).unwrap();
        match &result.outcome {
            Outcome::Path(p) => {
                prop_assert_eq!(p.len(), 4);
                prop_assert_eq!(p.start(), v);
                prop_assert!(exists_path_from(&h, v, 4, DEFAULT_BUDGET).unwrap().is_some());
            }
            Outcome::Cycle(c) => {
                prop_assert_eq!(c.len(), 4);
                prop_assert!(c.contains_vertex(v));
                prop_assert!(exists_cycle_through(&h, v, 4, DEFAULT_BUDGET).unwrap().is_some());
            }
        }
    }

    /// Every extraction outcome re-verifies after a JSON certificate round
    /// trip.
    #[test]
    fn certificate_files_round_trip(seed in 0u64..200, n in 5u32..8) {
        let Some(h) = small_instance(3, n, n, seed) else { return Ok(()) };
        let result = extract(&h, VertexId(0)).unwrap();
        let file = berge::io::CertificateFile::from_outcome(&h, &result.outcome, &result.trace);
        let back = berge::io::CertificateFile::from_json(&file.to_json()).unwrap();
        let outcome = back.to_outcome(&h).unwrap();
        prop_assert_eq!(outcome, result.outcome);
    }
}

/// The tightness family remains tight under the oracle: complete blocks on
/// r+1 vertices never contain a Berge path of length r+1.
#[test]
fn tight_blocks_have_no_long_path() {
    for r in 2..=4u32 {
        let h = complete_blocks(r, r + 1, 2).unwrap();
        for v in 0..h.n() {
            assert!(exists_path_from(&h, VertexId(v), r + 1, DEFAULT_BUDGET)
                .unwrap()
                .is_none());
        }
    }
}
