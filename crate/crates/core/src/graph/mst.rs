use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::graph::{DisjointSet, EdgeId, Network, VertexId};

const NONE: u32 = u32::MAX;

/// The unique MST of a network with distinct lengths.
#[derive(Debug, Clone)]
pub struct MstResult {
    /// Tree edge ids, ascending by id.
    pub tree_edges: Vec<EdgeId>,
    pub total_len: f64,
    in_tree: Vec<bool>,
    pub index: RootedIndex,
}

impl MstResult {
    #[inline]
    pub fn contains(&self, e: EdgeId) -> bool {
        self.in_tree[e]
    }

    pub fn membership(&self) -> &[bool] {
        &self.in_tree
    }
}

/// The MST rooted at vertex 0, with binary-lifting tables that keep the
/// longest edge on every `2^j` ancestor jump.
#[derive(Debug, Clone)]
pub struct RootedIndex {
    parent: Vec<u32>,
    parent_edge: Vec<u32>,
    depth: Vec<u32>,
    up: Vec<Vec<u32>>,
    max_edge: Vec<Vec<u32>>,
    max_len: Vec<Vec<f64>>,
}

impl RootedIndex {
    fn build(net: &Network, in_tree: &[bool]) -> Self {
        let n = net.n_vertices();
        let mut adj: Vec<Vec<(u32, u32)>> = vec![Vec::new(); n];
        for (id, e) in net.edges().iter().enumerate() {
            if in_tree[id] {
                adj[e.u as usize].push((e.v, id as u32));
                adj[e.v as usize].push((e.u, id as u32));
            }
        }
        let mut parent = vec![0u32; n];
        let mut parent_edge = vec![NONE; n];
        let mut depth = vec![0u32; n];
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(x) = queue.pop_front() {
            for &(y, id) in &adj[x] {
                let y = y as usize;
                if !seen[y] {
                    seen[y] = true;
                    parent[y] = x as u32;
                    parent_edge[y] = id;
                    depth[y] = depth[x] + 1;
                    queue.push_back(y);
                }
            }
        }

        let levels = (usize::BITS - n.max(1).leading_zeros()) as usize;
        let mut up = vec![parent.clone()];
        let mut max_edge = vec![parent_edge.clone()];
        let mut max_len = vec![parent_edge
            .iter()
            .map(|&e| if e == NONE { f64::NEG_INFINITY } else { net.len(e as usize) })
            .collect::<Vec<f64>>()];
        for j in 1..levels {
            let (pu, pe, pl) = (&up[j - 1], &max_edge[j - 1], &max_len[j - 1]);
            let mut nu = vec![0u32; n];
            let mut ne = vec![NONE; n];
            let mut nl = vec![f64::NEG_INFINITY; n];
            for v in 0..n {
                let mid = pu[v] as usize;
                nu[v] = pu[mid];
                if pl[mid] > pl[v] {
                    ne[v] = pe[mid];
                    nl[v] = pl[mid];
                } else {
                    ne[v] = pe[v];
                    nl[v] = pl[v];
                }
            }
            up.push(nu);
            max_edge.push(ne);
            max_len.push(nl);
        }
        RootedIndex {
            parent,
            parent_edge,
            depth,
            up,
            max_edge,
            max_len,
        }
    }

    pub fn depth(&self, v: VertexId) -> usize {
        self.depth[v] as usize
    }

    pub fn parent(&self, v: VertexId) -> Option<(VertexId, EdgeId)> {
        match self.parent_edge[v] {
            NONE => None,
            e => Some((self.parent[v] as usize, e as usize)),
        }
    }

    /// Longest edge on the tree path between `u` and `v`, or `None` when
    /// `u == v`. O(log n).
    pub fn path_max(&self, mut u: VertexId, mut v: VertexId) -> Option<(EdgeId, f64)> {
        if u == v {
            return None;
        }
        let mut best = (NONE, f64::NEG_INFINITY);
        let mut take = |e: u32, l: f64| {
            if l > best.1 {
                best = (e, l);
            }
        };
        if self.depth[u] < self.depth[v] {
            std::mem::swap(&mut u, &mut v);
        }
        let mut diff = self.depth[u] - self.depth[v];
        let mut j = 0;
        while diff > 0 {
            if diff & 1 == 1 {
                take(self.max_edge[j][u], self.max_len[j][u]);
                u = self.up[j][u] as usize;
            }
            diff >>= 1;
            j += 1;
        }
        if u != v {
            for j in (0..self.up.len()).rev() {
                if self.up[j][u] != self.up[j][v] {
                    take(self.max_edge[j][u], self.max_len[j][u]);
                    take(self.max_edge[j][v], self.max_len[j][v]);
                    u = self.up[j][u] as usize;
                    v = self.up[j][v] as usize;
                }
            }
            take(self.max_edge[0][u], self.max_len[0][u]);
            take(self.max_edge[0][v], self.max_len[0][v]);
        }
        Some((best.0 as usize, best.1))
    }

    /// Edge ids on the tree path between `u` and `v`, by walking parents.
    /// O(path length); used where the whole path is needed.
    pub fn path_edges(&self, mut u: VertexId, mut v: VertexId) -> Vec<EdgeId> {
        let mut left = Vec::new();
        let mut right = Vec::new();
        while self.depth[u] > self.depth[v] {
            left.push(self.parent_edge[u] as usize);
            u = self.parent[u] as usize;
        }
        while self.depth[v] > self.depth[u] {
            right.push(self.parent_edge[v] as usize);
            v = self.parent[v] as usize;
        }
        while u != v {
            left.push(self.parent_edge[u] as usize);
            right.push(self.parent_edge[v] as usize);
            u = self.parent[u] as usize;
            v = self.parent[v] as usize;
        }
        left.extend(right.into_iter().rev());
        left
    }
}

/// Kruskal's algorithm. Fails on disconnected input or tied lengths.
pub fn kruskal_mst(net: &Network) -> Result<MstResult> {
    let order = net.sorted_edge_ids();
    for w in order.windows(2) {
        if net.len(w[0]) == net.len(w[1]) {
            return Err(Error::TiedLengths(w[0].min(w[1]), w[0].max(w[1]), net.len(w[0])));
        }
    }
    let n = net.n_vertices();
    let mut dsu = DisjointSet::new(n);
    let mut in_tree = vec![false; net.n_edges()];
    let mut count = 0;
    for &id in &order {
        if count + 1 == n {
            break;
        }
        let (u, v) = net.edge(id).endpoints();
        if dsu.union(u, v).is_some() {
            in_tree[id] = true;
            count += 1;
        }
    }
    if count + 1 != n {
        return Err(Error::NotConnected);
    }
    let tree_edges: Vec<EdgeId> = (0..net.n_edges()).filter(|&e| in_tree[e]).collect();
    let total_len = tree_edges.iter().map(|&e| net.len(e)).sum();
    let index = RootedIndex::build(net, &in_tree);
    Ok(MstResult {
        tree_edges,
        total_len,
        in_tree,
        index,
    })
}

/// A vertex partition with canonical labels: blocks are numbered in order of
/// their smallest vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub labels: Vec<usize>,
    pub n_blocks: usize,
}

impl Partition {
    pub fn blocks(&self) -> Vec<Vec<VertexId>> {
        let mut out = vec![Vec::new(); self.n_blocks];
        for (v, &l) in self.labels.iter().enumerate() {
            out[l].push(v);
        }
        out
    }

    /// True if every block of `self` lies inside a block of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        let mut image = vec![usize::MAX; self.n_blocks];
        self.labels.iter().zip(&coarser.labels).all(|(&a, &b)| {
            if image[a] == usize::MAX {
                image[a] = b;
            }
            image[a] == b
        })
    }
}

/// Components of the threshold graph keeping edges with `len < t`.
pub fn components_at(net: &Network, t: f64) -> Partition {
    let n = net.n_vertices();
    let mut dsu = DisjointSet::new(n);
    for e in net.edges().iter().filter(|e| e.len < t) {
        dsu.union(e.u as usize, e.v as usize);
    }
    let mut label_of_root = vec![usize::MAX; n];
    let mut labels = vec![0; n];
    let mut n_blocks = 0;
    for (v, label) in labels.iter_mut().enumerate() {
        let r = dsu.find(v);
        if label_of_root[r] == usize::MAX {
            label_of_root[r] = n_blocks;
            n_blocks += 1;
        }
        *label = label_of_root[r];
    }
    Partition { labels, n_blocks }
}

/// True iff `edge_set` has `n - 1` distinct edges, no cycle, and spans.
pub fn is_spanning_tree(net: &Network, edge_set: &[EdgeId]) -> bool {
    let n = net.n_vertices();
    if edge_set.len() + 1 != n {
        return false;
    }
    let mut dsu = DisjointSet::new(n);
    edge_set.iter().all(|&e| {
        let (u, v) = net.edge(e).endpoints();
        dsu.union(u, v).is_some()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;
    use crate::generators::random_connected;
    use proptest::prelude::*;

    fn triangle() -> Network {
        // a=0, b=1, c=2: ab:1, bc:2, ac:3
        Network::new(3, vec![Edge::new(0, 1, 1.0), Edge::new(1, 2, 2.0), Edge::new(0, 2, 3.0)]).unwrap()
    }

    fn four_cycle() -> Network {
        // a:0.9, b:0.95, c:0.3, d:0.5 around vertices 0-1-2-3-0
        Network::new(
            4,
            vec![
                Edge::new(0, 1, 0.9),
                Edge::new(1, 2, 0.95),
                Edge::new(2, 3, 0.3),
                Edge::new(3, 0, 0.5),
            ],
        )
        .unwrap()
    }

    #[test]
    fn triangle_mst() {
        let mst = kruskal_mst(&triangle()).unwrap();
        assert_eq!(mst.tree_edges, vec![0, 1]);
        assert_eq!(mst.total_len, 3.0);
    }

    #[test]
    fn tree_input_is_its_own_mst() {
        let net = Network::new(4, vec![Edge::new(0, 1, 3.0), Edge::new(1, 2, 1.0), Edge::new(1, 3, 2.0)]).unwrap();
        let mst = kruskal_mst(&net).unwrap();
        assert_eq!(mst.tree_edges, vec![0, 1, 2]);
    }

    #[test]
    fn four_cycle_drops_b() {
        let mst = kruskal_mst(&four_cycle()).unwrap();
        assert_eq!(mst.tree_edges, vec![0, 2, 3]);
        assert!((mst.total_len - 1.7).abs() < 1e-12);
    }

    #[test]
    fn disconnected_is_rejected() {
        let net = Network::new(3, vec![Edge::new(0, 1, 1.0)]).unwrap();
        assert!(matches!(kruskal_mst(&net), Err(Error::NotConnected)));
    }

    #[test]
    fn components_strict_threshold() {
        let net = triangle();
        assert_eq!(components_at(&net, 1.0).n_blocks, 3);
        assert_eq!(components_at(&net, 2.5).blocks(), vec![vec![0, 1, 2]]);
        assert_eq!(components_at(&net, 0.0).n_blocks, 3);
    }

    #[test]
    fn spanning_tree_checks() {
        let net = four_cycle();
        let mst = kruskal_mst(&net).unwrap();
        assert!(is_spanning_tree(&net, &mst.tree_edges));
        assert!(!is_spanning_tree(&net, &mst.tree_edges[1..]));
        let mut plus = mst.tree_edges.clone();
        plus.push(1);
        assert!(!is_spanning_tree(&net, &plus));
    }

    #[test]
    fn path_queries_on_a_path() {
        let net = Network::new(3, vec![Edge::new(0, 1, 1.0), Edge::new(1, 2, 2.0)]).unwrap();
        let mst = kruskal_mst(&net).unwrap();
        assert_eq!(mst.index.path_max(0, 2), Some((1, 2.0)));
        assert_eq!(mst.index.path_max(0, 1), Some((0, 1.0)));
        assert_eq!(mst.index.path_max(1, 1), None);
        assert_eq!(mst.index.path_edges(2, 0), vec![1, 0]);
    }

    proptest! {
        #[test]
        fn path_max_matches_walk(seed in 0u64..500, n in 2usize..40) {
            let net = random_connected(n, 2 * n, seed);
            let mst = kruskal_mst(&net).unwrap();
            prop_assert!(is_spanning_tree(&net, &mst.tree_edges));
            let sum: f64 = mst.tree_edges.iter().map(|&e| net.len(e)).sum();
            prop_assert_eq!(sum, mst.total_len);
            for u in 0..n {
                for v in 0..n {
                    if u == v { continue; }
                    let walk = mst.index.path_edges(u, v);
                    let best = walk.iter().copied().max_by(|&a, &b| net.len(a).total_cmp(&net.len(b))).unwrap();
                    prop_assert_eq!(mst.index.path_max(u, v).unwrap().0, best);
                }
            }
            // optimality certificate
            for e in 0..net.n_edges() {
                if !mst.contains(e) {
                    let (u, v) = net.edge(e).endpoints();
                    prop_assert!(mst.index.path_max(u, v).unwrap().1 < net.len(e));
                }
            }
        }

        #[test]
        fn components_coarsen_monotonically(seed in 0u64..200, t in 0.0f64..1.0, dt in 0.0f64..0.5) {
            let net = random_connected(25, 50, seed);
            prop_assert!(components_at(&net, t).refines(&components_at(&net, t + dt)));
        }
    }
}
