//! Exhaustive spanning-tree enumeration for tiny instances, and the
//! matrix-tree count used to cross-check it.

use crate::error::{Error, Result};
use crate::graph::{DisjointSet, EdgeId, MstResult, Network};

/// Largest instance the enumerator accepts: at most this many vertices, or
/// at most [`MAX_ENUM_EDGES`] edges.
pub const MAX_ENUM_VERTICES: usize = 12;
pub const MAX_ENUM_EDGES: usize = 20;
/// Cap on the matrix-tree count of an accepted instance.
pub const MAX_ENUM_TREES: u128 = 2_000_000;

/// Number of spanning trees by the matrix-tree theorem: the determinant of
/// the Laplacian with one row and column deleted, computed exactly by
/// fraction-free (Bareiss) elimination.
pub fn matrix_tree_count(net: &Network) -> u128 {
    let n = net.n_vertices();
    if n == 1 {
        return 1;
    }
    let k = n - 1;
    let mut a = vec![vec![0i128; k]; k];
    for e in net.edges() {
        let (u, v) = e.endpoints();
        for (x, y) in [(u, v), (v, u)] {
            if x < k {
                a[x][x] += 1;
                if y < k {
                    a[x][y] -= 1;
                }
            }
        }
    }
    let mut sign = 1i128;
    let mut prev = 1i128;
    for i in 0..k {
        if a[i][i] == 0 {
            match (i + 1..k).find(|&r| a[r][i] != 0) {
                Some(r) => {
                    a.swap(i, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for r in i + 1..k {
            for c in i + 1..k {
                a[r][c] = (a[r][c] * a[i][i] - a[r][i] * a[i][c]) / prev;
            }
            a[r][i] = 0;
        }
        prev = a[i][i];
    }
    (sign * a[k - 1][k - 1]) as u128
}

fn check_size(net: &Network) -> Result<()> {
    let (n, m) = (net.n_vertices(), net.n_edges());
    if n > MAX_ENUM_VERTICES && m > MAX_ENUM_EDGES {
        return Err(Error::InstanceTooLarge(format!(
            "{n} vertices and {m} edges (limits: {MAX_ENUM_VERTICES} vertices or {MAX_ENUM_EDGES} edges)"
        )));
    }
    let count = matrix_tree_count(net);
    if count > MAX_ENUM_TREES {
        return Err(Error::InstanceTooLarge(format!("{count} spanning trees (limit {MAX_ENUM_TREES})")));
    }
    Ok(())
}

struct Enumerator<'a, F> {
    net: &'a Network,
    chosen: Vec<EdgeId>,
    excluded: Vec<bool>,
    visit: F,
    count: u64,
}

impl<F: FnMut(&[EdgeId])> Enumerator<'_, F> {
    fn forest_joins(&self, e: EdgeId) -> bool {
        let mut dsu = DisjointSet::new(self.net.n_vertices());
        for &c in &self.chosen {
            let (u, v) = self.net.edge(c).endpoints();
            dsu.union(u, v);
        }
        let (u, v) = self.net.edge(e).endpoints();
        !dsu.same(u, v)
    }

    /// Whether the graph stays connected without `e` and the excluded edges.
    fn connected_without(&self, e: EdgeId) -> bool {
        let mut dsu = DisjointSet::new(self.net.n_vertices());
        for (id, edge) in self.net.edges().iter().enumerate() {
            if id != e && !self.excluded[id] {
                dsu.union(edge.u as usize, edge.v as usize);
            }
        }
        dsu.n_components() == 1
    }

    fn recurse(&mut self, i: usize) {
        let need = self.net.n_vertices() - 1;
        if self.chosen.len() == need {
            self.count += 1;
            (self.visit)(&self.chosen);
            return;
        }
        if i == self.net.n_edges() || self.net.n_edges() - i < need - self.chosen.len() {
            return;
        }
        // include: only if it joins two forest components
        if self.forest_joins(i) {
            self.chosen.push(i);
            self.recurse(i + 1);
            self.chosen.pop();
        }
        // exclude: only if i is not a bridge of the remaining graph
        if self.connected_without(i) {
            self.excluded[i] = true;
            self.recurse(i + 1);
            self.excluded[i] = false;
        }
    }
}

/// Calls `visit` with the edge set (ascending ids) of every spanning tree.
/// Returns the number of trees.
pub fn enumerate_spanning_trees<F: FnMut(&[EdgeId])>(net: &Network, visit: F) -> Result<u64> {
    check_size(net)?;
    if !net.is_connected() {
        return Ok(0);
    }
    let mut en = Enumerator {
        net,
        chosen: Vec::with_capacity(net.n_vertices()),
        excluded: vec![false; net.n_edges()],
        visit,
        count: 0,
    };
    en.recurse(0);
    Ok(en.count)
}

/// For each `d`, the cheapest spanning tree with exactly `d` edges outside
/// the MST, relative to the MST length.
#[derive(Debug, Clone)]
pub struct ExactProfile {
    n_vertices: usize,
    /// `best_by_diff[d]` = min (len(T') - len(T)) over trees with |T' \ T| = d.
    best_by_diff: Vec<Option<f64>>,
    pub n_trees: u64,
}

impl ExactProfile {
    pub fn new(net: &Network, mst: &MstResult) -> Result<Self> {
        let mut best: Vec<Option<f64>> = vec![None; net.n_vertices()];
        let n_trees = enumerate_spanning_trees(net, |tree| {
            let diff = tree.iter().filter(|&&e| !mst.contains(e)).count();
            let extra = tree.iter().map(|&e| net.len(e)).sum::<f64>() - mst.total_len;
            let slot = &mut best[diff];
            if slot.is_none_or(|b| extra < b) {
                *slot = Some(extra);
            }
        })?;
        Ok(ExactProfile {
            n_vertices: net.n_vertices(),
            best_by_diff: best,
            n_trees,
        })
    }

    /// Largest achievable `|T' \ T|`.
    pub fn max_k(&self) -> usize {
        self.best_by_diff.iter().rposition(Option::is_some).unwrap_or(0)
    }

    /// `ε_n(k / n)`: min over trees with at least `k` non-MST edges.
    pub fn epsilon(&self, k: usize) -> Result<f64> {
        self.best_by_diff
            .iter()
            .skip(k)
            .flatten()
            .copied()
            .min_by(f64::total_cmp)
            .map(|x| x.max(0.0) / self.n_vertices as f64)
            .ok_or(Error::InfeasibleK(k))
    }
}

/// Exact `ε_n(k / n)` by enumerating every spanning tree.
pub fn exact_epsilon(net: &Network, k: usize) -> Result<f64> {
    let mst = crate::graph::kruskal_mst(net)?;
    ExactProfile::new(net, &mst)?.epsilon(k)
}
