//! Brute-force sandwich check on tiny instances.

use serde::{Deserialize, Serialize};

use super::{enumerate_spanning_trees, greedy_exchange, ExactProfile, LowerBoundProfile, Strategy};
use crate::error::Result;
use crate::excess::excess_table;
use crate::generators::{gen_lattice, random_connected, Dist, LatticeSpec};
use crate::graph::{kruskal_mst, Network};
use crate::rng::{derive_seed, stream_rng, Stream};

/// Absolute slack for floating comparisons of summed lengths.
pub const SANDWICH_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub n_vertices: usize,
    pub n_edges: usize,
    pub trees: u64,
    /// Feasible `k` values checked.
    pub ks: usize,
    /// Human-readable descriptions of every failed inequality.
    pub violations: Vec<String>,
}

impl SandwichReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

/// For every feasible `k`: lower bound ≤ exact ≤ each strategy's upper
/// bound. For every spanning tree: its extra length is at least the summed
/// excesses of its non-MST edges.
pub fn sandwich_check(net: &Network) -> Result<SandwichReport> {
    let mst = kruskal_mst(net)?;
    let tbl = excess_table(net, &mst);
    let profile = ExactProfile::new(net, &mst)?;
    let mut violations = Vec::new();

    enumerate_spanning_trees(net, |tree| {
        let extra: f64 = tree.iter().map(|&e| net.len(e)).sum::<f64>() - mst.total_len;
        let exc: f64 = tree.iter().filter(|&&e| !mst.contains(e)).map(|&e| tbl.exc[e]).sum();
        if extra < exc - SANDWICH_TOL {
            violations.push(format!("tree {tree:?}: extra {extra} < excess sum {exc}"));
        }
    })?;

    let lbp = LowerBoundProfile::new(&tbl);
    for k in 1..=profile.max_k() {
        let exact = profile.epsilon(k)?;
        let lb = lbp.at(k)?.value;
        if lb > exact + SANDWICH_TOL {
            violations.push(format!("k={k}: lb {lb} > exact {exact}"));
        }
        for s in Strategy::ALL {
            // a strategy may run out of candidates before k; that is not a violation
            if let Ok((_, row)) = greedy_exchange(net, &mst, &tbl, k, s) {
                if exact > row.ub + SANDWICH_TOL {
                    violations.push(format!("k={k} {s}: exact {exact} > ub {}", row.ub));
                }
            }
        }
    }
    Ok(SandwichReport {
        n_vertices: net.n_vertices(),
        n_edges: net.n_edges(),
        trees: profile.n_trees,
        ks: profile.max_k(),
        violations,
    })
}

/// The `i`-th oracle instance: every fourth is a 2×2 or 3×3 lattice with
/// uniform or exponential lengths, the rest random connected graphs on
/// 3 to 9 vertices.
pub fn oracle_instance(seed: u64, i: usize) -> Network {
    use rand::Rng;
    let sub = derive_seed(seed, Stream::Oracle, i as u64);
    if i % 4 == 0 {
        let m = if (i / 4) % 2 == 0 { 2 } else { 3 };
        let dist = if (i / 8) % 2 == 0 { Dist::Uniform01 } else { Dist::Exp1 };
        gen_lattice(&LatticeSpec { d: 2, m, dist, seed: sub }).expect("small lattice")
    } else {
        let mut rng = stream_rng(sub, Stream::Pairs, 0);
        let n = rng.random_range(3..=9);
        let max_extra = (n * (n - 1) / 2 - (n - 1)).min(20 - (n - 1));
        let extra = rng.random_range(0..=max_extra);
        random_connected(n, n - 1 + extra, sub)
    }
}
