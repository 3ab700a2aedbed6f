//! Percolation values, excluded-edge values and excesses for every candidate
//! edge, plus the empirical excess measure.
//!
//! `perc` is available by two independent routes: the longest edge on the
//! MST path ([`path_max`]) and the merge history of the threshold graph
//! ([`perc_all_pairs`]). The first is primary because the near-minimal tree
//! construction needs the identity of the cycle's longest edge.

mod merge_tree;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgeId, MstResult, Network, VertexId};

pub use merge_tree::MergeTree;

/// Longest edge on the MST path between `u` and `v`.
pub fn path_max(mst: &MstResult, u: VertexId, v: VertexId) -> Result<(EdgeId, f64)> {
    mst.index.path_max(u, v).ok_or(Error::DegenerateQuery(u))
}

/// Merge-time structure answering `perc(u, v)` in O(1) after O(m log m)
/// preprocessing.
pub fn perc_all_pairs(net: &Network) -> MergeTree {
    MergeTree::build(net)
}

/// Per-edge percolation data, indexed by edge id.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcessTable {
    pub n_vertices: usize,
    pub len: Vec<f64>,
    pub perc: Vec<f64>,
    pub exc: Vec<f64>,
    pub in_mst: Vec<bool>,
    /// Longest MST edge on the path between the endpoints; the edge itself
    /// for tree edges.
    pub cycle_max_edge: Vec<EdgeId>,
    /// Excesses above this are not trusted (pruned candidate sets).
    pub trusted_max: Option<f64>,
}

impl ExcessTable {
    pub fn n_edges(&self) -> usize {
        self.len.len()
    }

    /// Non-tree edge ids sorted by increasing excess (ties by id).
    pub fn candidates_by_excess(&self) -> Vec<EdgeId> {
        let mut ids: Vec<EdgeId> = (0..self.n_edges()).filter(|&e| !self.in_mst[e]).collect();
        ids.sort_unstable_by(|&a, &b| self.exc[a].total_cmp(&self.exc[b]).then(a.cmp(&b)));
        ids
    }

    pub fn positive_excesses_sorted(&self) -> Vec<f64> {
        let mut xs: Vec<f64> = self.exc.iter().copied().filter(|&x| x > 0.0).collect();
        xs.sort_unstable_by(f64::total_cmp);
        xs
    }
}

/// Builds the full excess table. Non-tree edges are handled in parallel;
/// output order is fixed by edge id.
pub fn excess_table(net: &Network, mst: &MstResult) -> ExcessTable {
    let rows: Vec<(f64, EdgeId)> = (0..net.n_edges())
        .into_par_iter()
        .map(|e| {
            if mst.contains(e) {
                (net.len(e), e)
            } else {
                let (u, v) = net.edge(e).endpoints();
                let (f, l) = mst.index.path_max(u, v).expect("edge endpoints differ");
                (l, f)
            }
        })
        .collect();
    let len: Vec<f64> = net.edges().iter().map(|e| e.len).collect();
    let perc: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let exc = len.iter().zip(&perc).map(|(l, p)| l - p).collect();
    let trusted_max = net
        .meta
        .as_ref()
        .filter(|m| m.model == "euclidean" || m.model == "window")
        .and_then(|m| m.cutoff)
        .map(|c| c / 2.0);
    ExcessTable {
        n_vertices: net.n_vertices(),
        len,
        perc,
        exc,
        in_mst: mst.membership().to_vec(),
        cycle_max_edge: rows.iter().map(|r| r.1).collect(),
        trusted_max,
    }
}

/// Connection threshold of `e`'s endpoints in the network with `e` removed.
/// Equal to `perc(e)` for non-tree edges; for tree edges it is the length of
/// the cheapest non-tree edge crossing the cut the edge defines.
pub fn excluded_perc(net: &Network, mst: &MstResult, e: EdgeId) -> Result<f64> {
    let (u, v) = net.edge(e).endpoints();
    if !mst.contains(e) {
        return Ok(path_max(mst, u, v)?.1);
    }
    // side of the cut containing the deeper endpoint: its subtree
    let child = if mst.index.depth(u) > mst.index.depth(v) { u } else { v };
    let n = net.n_vertices();
    let mut tree_adj = vec![Vec::new(); n];
    for &t in &mst.tree_edges {
        if t != e {
            let (a, b) = net.edge(t).endpoints();
            tree_adj[a].push(b);
            tree_adj[b].push(a);
        }
    }
    let mut side = vec![false; n];
    side[child] = true;
    let mut stack = vec![child];
    while let Some(x) = stack.pop() {
        for &y in &tree_adj[x] {
            if !side[y] {
                side[y] = true;
                stack.push(y);
            }
        }
    }
    net.edges()
        .iter()
        .enumerate()
        .filter(|&(id, f)| id != e && side[f.u as usize] != side[f.v as usize])
        .map(|(_, f)| f.len)
        .min_by(f64::total_cmp)
        .ok_or(Error::BridgeEdge(e))
}

/// Replacement length for every tree edge at once (`None` for bridges and
/// non-tree edges). Non-tree edges are scanned by increasing length and
/// claim the still-unclaimed tree edges on their path; a jump pointer per
/// vertex skips claimed edges, so the whole pass is near-linear.
pub fn replacement_lengths(net: &Network, mst: &MstResult) -> Vec<Option<f64>> {
    let n = net.n_vertices();
    let mut out = vec![None; net.n_edges()];
    let mut jump: Vec<u32> = (0..n as u32).collect();
    fn find(jump: &mut [u32], mut x: usize) -> usize {
        while jump[x] as usize != x {
            let g = jump[jump[x] as usize];
            jump[x] = g;
            x = g as usize;
        }
        x
    }
    for id in net.sorted_edge_ids() {
        if mst.contains(id) {
            continue;
        }
        let (u, v) = net.edge(id).endpoints();
        let (mut a, mut b) = (find(&mut jump, u), find(&mut jump, v));
        while a != b {
            if mst.index.depth(a) < mst.index.depth(b) {
                std::mem::swap(&mut a, &mut b);
            }
            let (p, pe) = mst.index.parent(a).expect("non-root has a parent");
            out[pe] = Some(net.len(id));
            jump[a] = p as u32;
            a = find(&mut jump, p);
        }
    }
    out
}

/// Empirical excess measure `μ̂(0, x)` on a grid of thresholds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuEstimate {
    pub x_grid: Vec<f64>,
    pub mu_hat: Vec<f64>,
    /// `μ̂(0, x) / x`.
    pub density_hat: Vec<f64>,
    /// Standard errors of `density_hat` across replicas, when aggregated.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density_stderr: Option<Vec<f64>>,
    /// Normalization: vertices (single network) or roots (Palm estimates).
    pub n: usize,
    #[serde(default)]
    pub trusted_max: Option<f64>,
}

impl MuEstimate {
    pub fn trusted(&self, i: usize) -> bool {
        self.trusted_max.is_none_or(|t| self.x_grid[i] <= t)
    }
}

pub(crate) fn check_grid(x_grid: &[f64]) -> Result<()> {
    if x_grid.is_empty() {
        return Err(Error::Invalid("empty x grid".into()));
    }
    if x_grid[0] <= 0.0 || x_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Invalid("x grid must be positive and strictly increasing".into()));
    }
    Ok(())
}

/// `μ̂(0, x) = #{edges : 0 < exc < x} / n_vertices` for each grid point.
pub fn empirical_mu(tbl: &ExcessTable, x_grid: &[f64]) -> Result<MuEstimate> {
    check_grid(x_grid)?;
    let xs = tbl.positive_excesses_sorted();
    let n = tbl.n_vertices;
    let mu_hat: Vec<f64> = x_grid
        .iter()
        .map(|&x| xs.partition_point(|&e| e < x) as f64 / n as f64)
        .collect();
    let density_hat = mu_hat.iter().zip(x_grid).map(|(m, x)| m / x).collect();
    Ok(MuEstimate {
        x_grid: x_grid.to_vec(),
        mu_hat,
        density_hat,
        density_stderr: None,
        n,
        trusted_max: tbl.trusted_max,
    })
}

/// CSV with header `edge_id,u,v,len,perc,exc,in_mst`.
pub fn write_excess_csv<W: std::io::Write>(net: &Network, tbl: &ExcessTable, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["edge_id", "u", "v", "len", "perc", "exc", "in_mst"])?;
    for (e, edge) in net.edges().iter().enumerate() {
        w.write_record([
            e.to_string(),
            edge.u.to_string(),
            edge.v.to_string(),
            tbl.len[e].to_string(),
            tbl.perc[e].to_string(),
            tbl.exc[e].to_string(),
            tbl.in_mst[e].to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// CSV with header `x,mu_hat,density_hat,trusted`.
pub fn write_mu_csv<W: std::io::Write>(mu: &MuEstimate, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "mu_hat", "density_hat", "trusted"])?;
    for i in 0..mu.x_grid.len() {
        w.write_record([
            mu.x_grid[i].to_string(),
            mu.mu_hat[i].to_string(),
            mu.density_hat[i].to_string(),
            mu.trusted(i).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_lattice, random_connected, Dist, LatticeSpec};
    use crate::graph::{kruskal_mst, Edge};
    use proptest::prelude::*;

    fn triangle() -> Network {
        Network::new(3, vec![Edge::new(0, 1, 1.0), Edge::new(1, 2, 2.0), Edge::new(0, 2, 3.0)]).unwrap()
    }

    fn four_cycle() -> Network {
        Network::new(
            4,
            vec![Edge::new(0, 1, 0.9), Edge::new(1, 2, 0.95), Edge::new(2, 3, 0.3), Edge::new(3, 0, 0.5)],
        )
        .unwrap()
    }

    #[test]
    fn path_max_examples() {
        let path = Network::new(3, vec![Edge::new(0, 1, 1.0), Edge::new(1, 2, 2.0)]).unwrap();
        let mst = kruskal_mst(&path).unwrap();
        assert_eq!(path_max(&mst, 0, 2).unwrap(), (1, 2.0));
        assert_eq!(path_max(&mst, 1, 2).unwrap(), (1, 2.0));
        assert!(matches!(path_max(&mst, 1, 1), Err(Error::DegenerateQuery(1))));
        let tri = triangle();
        let mst = kruskal_mst(&tri).unwrap();
        assert_eq!(path_max(&mst, 0, 2).unwrap(), (1, 2.0));
    }

    #[test]
    fn table_examples() {
        let tri = triangle();
        let tbl = excess_table(&tri, &kruskal_mst(&tri).unwrap());
        assert_eq!(tbl.exc, vec![0.0, 0.0, 1.0]);
        assert_eq!(tbl.cycle_max_edge, vec![0, 1, 1]);
        let cyc = four_cycle();
        let tbl = excess_table(&cyc, &kruskal_mst(&cyc).unwrap());
        assert!((tbl.exc[1] - 0.05).abs() < 1e-12);
        assert_eq!(tbl.cycle_max_edge[1], 0);
    }

    #[test]
    fn excluded_perc_examples() {
        let cyc = four_cycle();
        let mst = kruskal_mst(&cyc).unwrap();
        assert_eq!(excluded_perc(&cyc, &mst, 0).unwrap(), 0.95);
        assert_eq!(excluded_perc(&cyc, &mst, 1).unwrap(), 0.9);
        let path = Network::new(3, vec![Edge::new(0, 1, 1.0), Edge::new(1, 2, 2.0)]).unwrap();
        let mst = kruskal_mst(&path).unwrap();
        assert!(matches!(excluded_perc(&path, &mst, 0), Err(Error::BridgeEdge(0))));
    }

    #[test]
    fn merge_tree_examples() {
        let line = Network::new(3, vec![Edge::new(0, 1, 1.0), Edge::new(1, 2, 2.0), Edge::new(0, 2, 3.0)]).unwrap();
        let mt = perc_all_pairs(&line);
        assert_eq!(mt.perc(0, 2), 2.0);
        assert_eq!(mt.perc(0, 1), 1.0);
        assert_eq!(mt.perc(1, 1), 0.0);
        let forest = Network::new(4, vec![Edge::new(0, 1, 1.0), Edge::new(2, 3, 2.0)]).unwrap();
        let mt = perc_all_pairs(&forest);
        assert_eq!(mt.perc(0, 3), f64::INFINITY);
        assert_eq!(mt.perc(2, 3), 2.0);
    }

    #[test]
    fn mu_examples() {
        let tree = Network::new(3, vec![Edge::new(0, 1, 1.0), Edge::new(1, 2, 2.0)]).unwrap();
        let tbl = excess_table(&tree, &kruskal_mst(&tree).unwrap());
        let mu = empirical_mu(&tbl, &[0.5, 1.0, 10.0]).unwrap();
        assert_eq!(mu.mu_hat, vec![0.0; 3]);
        let tri = triangle();
        let tbl = excess_table(&tri, &kruskal_mst(&tri).unwrap());
        let mu = empirical_mu(&tbl, &[0.5, 1.0, 1.0001, 4.0]).unwrap();
        assert_eq!(mu.mu_hat, vec![0.0, 0.0, 1.0 / 3.0, 1.0 / 3.0]);
        assert!(empirical_mu(&tbl, &[1.0, 0.5]).is_err());
        assert!(empirical_mu(&tbl, &[0.0]).is_err());
    }

    #[test]
    fn lattice_table_matches_merge_tree() {
        let net = gen_lattice(&LatticeSpec { d: 2, m: 50, dist: Dist::Uniform01, seed: 4 }).unwrap();
        let mst = kruskal_mst(&net).unwrap();
        let tbl = excess_table(&net, &mst);
        let mt = perc_all_pairs(&net);
        for (e, edge) in net.edges().iter().enumerate() {
            assert_eq!(tbl.perc[e], mt.perc(edge.u as usize, edge.v as usize));
            assert_eq!(tbl.exc[e] == 0.0, mst.contains(e));
        }
    }

    proptest! {
        #[test]
        fn table_invariants(seed in 0u64..300, n in 2usize..30, extra in 0usize..40) {
            let net = random_connected(n, n - 1 + extra, seed);
            let mst = kruskal_mst(&net).unwrap();
            let tbl = excess_table(&net, &mst);
            let mt = perc_all_pairs(&net);
            let repl = replacement_lengths(&net, &mst);
            for e in 0..net.n_edges() {
                prop_assert!(tbl.exc[e] >= 0.0);
                prop_assert!(tbl.perc[e] <= tbl.len[e]);
                prop_assert_eq!(tbl.exc[e] == 0.0, tbl.in_mst[e]);
                prop_assert_eq!(tbl.perc[e], net.len(tbl.cycle_max_edge[e]));
                let (u, v) = net.edge(e).endpoints();
                prop_assert_eq!(tbl.perc[e], mt.perc(u, v));
                match excluded_perc(&net, &mst, e) {
                    Ok(w) => {
                        prop_assert!(w >= tbl.perc[e]);
                        if !tbl.in_mst[e] { prop_assert_eq!(w, tbl.perc[e]); }
                        else { prop_assert_eq!(Some(w), repl[e]); }
                    }
                    Err(Error::BridgeEdge(_)) => prop_assert!(tbl.in_mst[e] && repl[e].is_none()),
                    Err(other) => prop_assert!(false, "unexpected {other}"),
                }
            }
            for u in 0..n {
                for v in 0..n {
                    if u != v {
                        prop_assert_eq!(mt.perc(u, v), path_max(&mst, u, v).unwrap().1);
                    }
                }
            }
            let grid = [0.01, 0.05, 0.1, 0.3, 0.7, 2.0];
            let mu = empirical_mu(&tbl, &grid).unwrap();
            prop_assert!(mu.mu_hat.windows(2).all(|w| w[0] <= w[1]));
            let non_tree = tbl.in_mst.iter().filter(|&&t| !t).count();
            prop_assert_eq!(mu.mu_hat[5], non_tree as f64 / n as f64);
        }
    }
}
