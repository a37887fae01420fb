//! Instance families: extremal complete blocks, glued block chains, and
//! seeded random connected r-uniform hypergraphs.
//!
//! All randomness flows through ChaCha8 seeded with a caller-supplied u64,
//! so a spec plus a seed pins the emitted hypergraph byte for byte. Seed 0
//! is reserved for documentation examples by convention. Generated edge
//! lists are canonical: sorted lexicographically by vertex set.

use std::collections::BTreeSet;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::hypergraph::Hypergraph;
use crate::oracle::binomial;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("uniformity must be at least 2 (got {0})")]
    UniformityTooSmall(u32),
    #[error("block size {block_size} is smaller than the edge size {r}")]
    BlockTooSmall { block_size: u32, r: u32 },
    #[error("need at least one block")]
    NoBlocks,
    #[error("{m} edges cannot keep {n} vertices connected (need at least {min})")]
    TooFewEdges { n: u32, m: u32, min: u32 },
    #[error("{m} edges exceed the {max} distinct r-subsets of {n} vertices")]
    TooManyEdges { n: u32, m: u32, max: u128 },
    #[error("rejection sampling stalled after {attempts} attempts")]
    RejectionStalled { attempts: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Family {
    CompleteBlocks { block_size: u32, blocks: u32 },
    GluedBlocks { block_size: u32, blocks: u32 },
    RandomConnected { n: u32, m: u32, seed: u64 },
    /// Random connected instance with `m = n + surplus`; the surplus makes
    /// the path-only extraction mode applicable.
    RandomSurplus { n: u32, surplus: u32, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub r: u32,
    pub family: Family,
}

pub fn generate(spec: &GeneratorSpec) -> Result<Hypergraph, GenError> {
    match spec.family {
        Family::CompleteBlocks { block_size, blocks } => {
            complete_blocks(spec.r, block_size, blocks)
        }
        Family::GluedBlocks { block_size, blocks } => glued_blocks(spec.r, block_size, blocks),
        Family::RandomConnected { n, m, seed } => random_connected(spec.r, n, m, seed),
        Family::RandomSurplus { n, surplus, seed } => {
            random_connected(spec.r, n, n + surplus, seed)
        }
    }
}

fn check_block_params(r: u32, block_size: u32, blocks: u32) -> Result<(), GenError> {
    if r < 2 {
        return Err(GenError::UniformityTooSmall(r));
    }
    if block_size < r {
        return Err(GenError::BlockTooSmall { block_size, r });
    }
    if blocks == 0 {
        return Err(GenError::NoBlocks);
    }
    Ok(())
}

fn sorted_edges(mut edges: Vec<BTreeSet<u32>>) -> Vec<BTreeSet<u32>> {
    edges.sort();
    edges
}

/// Disjoint complete r-uniform blocks on `block_size` vertices each. With
/// `block_size = r + 1` the result has exactly as many edges as vertices and
/// its longest Berge path has length r.
pub fn complete_blocks(r: u32, block_size: u32, blocks: u32) -> Result<Hypergraph, GenError> {
    check_block_params(r, block_size, blocks)?;
    let mut edges = Vec::new();
    for b in 0..blocks {
        let offset = b * block_size;
        for combo in (offset..offset + block_size).combinations(r as usize) {
            edges.push(combo.into_iter().collect());
        }
    }
    Ok(Hypergraph::new(blocks * block_size, sorted_edges(edges)).expect("blocks are simple"))
}

/// A chain of complete r-uniform blocks in which consecutive blocks share a
/// single vertex; every shared vertex is a cut vertex.
pub fn glued_blocks(r: u32, block_size: u32, blocks: u32) -> Result<Hypergraph, GenError> {
    check_block_params(r, block_size, blocks)?;
    if block_size < 2 {
        return Err(GenError::BlockTooSmall { block_size, r });
    }
    let mut edges = Vec::new();
    for b in 0..blocks {
        let offset = b * (block_size - 1);
        for combo in (offset..offset + block_size).combinations(r as usize) {
            edges.push(combo.into_iter().collect());
        }
    }
    let n = blocks * block_size - (blocks - 1);
    Ok(Hypergraph::new(n, sorted_edges(edges)).expect("glued blocks are simple"))
}

/// Simple connected r-uniform hypergraph with exactly `m` edges,
/// deterministic for a fixed seed.
///
/// A spanning phase first adds edges that each touch the already-connected
/// part and absorb as many fresh vertices as possible; the remaining edges
/// are sampled uniformly. Dense targets (within a factor of four of the full
/// subset count, or at most a million subsets) switch from rejection
/// sampling to a shuffled enumeration of all r-subsets, so `m = C(n, r)`
/// always yields the complete hypergraph.
pub fn random_connected(r: u32, n: u32, m: u32, seed: u64) -> Result<Hypergraph, GenError> {
    if r < 2 {
        return Err(GenError::UniformityTooSmall(r));
    }
    if n < r {
        return Err(GenError::BlockTooSmall { block_size: n, r });
    }
    let min = (n - 1).div_ceil(r - 1);
    if m < min {
        return Err(GenError::TooFewEdges { n, m, min });
    }
    let max = binomial(n as u64, r as u64);
    if (m as u128) > max {
        return Err(GenError::TooManyEdges { n, m, max });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: BTreeSet<BTreeSet<u32>> = BTreeSet::new();

    // Spanning phase: each edge takes one anchor from the connected part and
    // as many unvisited vertices as fit.
    let mut order: Vec<u32> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut connected: Vec<u32> = vec![order[0]];
    let mut next = 1usize;
    while next < order.len() {
        let anchor = connected[rng.random_range(0..connected.len())];
        let fresh = ((r - 1) as usize).min(order.len() - next);
        let mut edge: BTreeSet<u32> = order[next..next + fresh].iter().copied().collect();
        edge.insert(anchor);
        // Pad with distinct already-connected vertices when the tail of the
        // order is shorter than r - 1.
        let mut attempts = 0u64;
        while edge.len() < r as usize {
            let filler = connected[rng.random_range(0..connected.len())];
            edge.insert(filler);
            attempts += 1;
            if attempts > 10_000 {
                return Err(GenError::RejectionStalled { attempts });
            }
        }
        if edges.insert(edge.clone()) {
            connected.extend(&order[next..next + fresh]);
            next += fresh;
        }
    }

    let dense = max <= 4 * m as u128 || max <= 1_000_000;
    if dense {
        let mut pool: Vec<BTreeSet<u32>> = (0..n)
            .combinations(r as usize)
            .map(|c| c.into_iter().collect())
            .filter(|c| !edges.contains(c))
            .collect();
        pool.shuffle(&mut rng);
        for edge in pool {
            if edges.len() as u32 >= m {
                break;
            }
            edges.insert(edge);
        }
    } else {
        let mut attempts = 0u64;
        let cap = 10_000 * (m as u64 + 10);
        while (edges.len() as u32) < m {
            let mut edge = BTreeSet::new();
            while edge.len() < r as usize {
                edge.insert(rng.random_range(0..n));
            }
            edges.insert(edge);
            attempts += 1;
            if attempts > cap {
                return Err(GenError::RejectionStalled { attempts });
            }
        }
    }
    debug_assert_eq!(edges.len() as u32, m);
    let h = Hypergraph::new(n, edges.into_iter().collect()).expect("generated edges are simple");
    debug_assert!(h.is_connected());
    Ok(h)
}
