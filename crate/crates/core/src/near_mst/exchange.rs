use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::link_cut::LinkCutTree;
use crate::error::{Error, Result};
use crate::excess::ExcessTable;
use crate::graph::{EdgeId, MstResult, Network};

/// How the greedy exchange resolves overlapping cycles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Each added edge removes its own cycle maximum; candidates whose cycle
    /// maximum was already removed are skipped. Every swap costs exactly the
    /// added edge's excess.
    Disjoint,
    /// Each added edge removes the longest original-MST edge on its path in
    /// the current tree. Never skips unless that path has no original edge.
    Sequential,
}

impl Strategy {
    pub const ALL: [Strategy; 2] = [Strategy::Disjoint, Strategy::Sequential];

    pub fn tag(&self) -> &'static str {
        match self {
            Strategy::Disjoint => "disjoint",
            Strategy::Sequential => "sequential",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "disjoint" => Ok(Strategy::Disjoint),
            "sequential" => Ok(Strategy::Sequential),
            other => Err(Error::Invalid(format!("unknown strategy {other}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Swap {
    pub added: EdgeId,
    pub removed: EdgeId,
    pub cost: f64,
}

/// Ordered exchanges applied to the MST. Every prefix yields a spanning tree
/// differing from the MST in exactly as many edges as the prefix length.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SwapPlan {
    pub swaps: Vec<Swap>,
    pub total_cost: f64,
}

impl SwapPlan {
    pub fn len(&self) -> usize {
        self.swaps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.swaps.is_empty()
    }

    /// Running totals: `out[j]` is the cost of the first `j` swaps.
    pub fn prefix_costs(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.swaps.len() + 1);
        let mut acc = 0.0;
        out.push(0.0);
        for s in &self.swaps {
            acc += s.cost;
            out.push(acc);
        }
        out
    }

    /// Edge set of the tree after the first `j` swaps.
    pub fn tree_after(&self, mst: &MstResult, j: usize) -> Vec<EdgeId> {
        let removed: std::collections::HashSet<EdgeId> = self.swaps[..j].iter().map(|s| s.removed).collect();
        let mut out: Vec<EdgeId> = mst.tree_edges.iter().copied().filter(|e| !removed.contains(e)).collect();
        out.extend(self.swaps[..j].iter().map(|s| s.added));
        out.sort_unstable();
        out
    }
}

/// Runs the greedy exchange until `max_swaps` swaps are accepted or the
/// candidates run out. Candidates are non-tree edges by increasing excess
/// with respect to the original MST.
pub fn greedy_plan(net: &Network, mst: &MstResult, tbl: &ExcessTable, max_swaps: usize, strategy: Strategy) -> SwapPlan {
    let candidates = tbl.candidates_by_excess();
    let mut plan = SwapPlan::default();
    match strategy {
        Strategy::Disjoint => {
            let mut removed = vec![false; net.n_edges()];
            for e in candidates {
                if plan.swaps.len() == max_swaps {
                    break;
                }
                let f = tbl.cycle_max_edge[e];
                if removed[f] {
                    continue;
                }
                removed[f] = true;
                plan.swaps.push(Swap {
                    added: e,
                    removed: f,
                    cost: tbl.exc[e],
                });
            }
        }
        Strategy::Sequential => {
            let n = net.n_vertices();
            let tree = &mst.tree_edges;
            // nodes: vertices, then original tree edges, then added edges
            let cap = n + tree.len() + max_swaps.min(candidates.len());
            let mut values = vec![f64::NEG_INFINITY; cap];
            for (i, &e) in tree.iter().enumerate() {
                values[n + i] = net.len(e);
            }
            let mut lct = LinkCutTree::new(values);
            for (i, &e) in tree.iter().enumerate() {
                let (u, v) = net.edge(e).endpoints();
                lct.link(u, n + i);
                lct.link(n + i, v);
            }
            let mut next_node = n + tree.len();
            for e in candidates {
                if plan.swaps.len() == max_swaps {
                    break;
                }
                let (u, v) = net.edge(e).endpoints();
                let (best, node) = lct.path_max(u, v);
                if best == f64::NEG_INFINITY {
                    continue;
                }
                let f = tree[node - n];
                let (a, b) = net.edge(f).endpoints();
                lct.cut(a, node);
                lct.cut(node, b);
                lct.link(u, next_node);
                lct.link(next_node, v);
                next_node += 1;
                plan.swaps.push(Swap {
                    added: e,
                    removed: f,
                    cost: net.len(e) - net.len(f),
                });
            }
        }
    }
    plan.total_cost = plan.swaps.iter().map(|s| s.cost).sum();
    plan
}

