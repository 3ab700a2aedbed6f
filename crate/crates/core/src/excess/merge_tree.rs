use crate::graph::{DisjointSet, Network, VertexId};

/// Kruskal reconstruction tree: the merge history of the threshold graph as
/// the threshold rises. Leaves are vertices; each internal node is a merge,
/// weighted by the length of the merging edge. The percolation value of two
/// vertices is the weight of their lowest common ancestor.
///
/// LCA is answered by an Euler tour with a sparse table over depths.
#[derive(Debug, Clone)]
pub struct MergeTree {
    n_leaves: usize,
    children: Vec<[u32; 2]>,
    weight: Vec<f64>,
    first: Vec<u32>,
    tree_of: Vec<u32>,
    euler: Vec<u32>,
    depth: Vec<u32>,
    sparse: Vec<Vec<u32>>,
}

impl MergeTree {
    /// Processes edges by increasing length. The network need not be
    /// connected; queries across components return `f64::INFINITY`.
    pub fn build(net: &Network) -> Self {
        let n = net.n_vertices();
        let mut dsu = DisjointSet::new(n);
        // KRT node currently representing each DSU root
        let mut top: Vec<u32> = (0..n as u32).collect();
        let mut children: Vec<[u32; 2]> = Vec::with_capacity(n.saturating_sub(1));
        let mut weight = vec![0.0; n];
        for id in net.sorted_edge_ids() {
            let (u, v) = net.edge(id).endpoints();
            let (ru, rv) = (dsu.find(u), dsu.find(v));
            if ru == rv {
                continue;
            }
            let node = (n + children.len()) as u32;
            children.push([top[ru], top[rv]]);
            weight.push(net.len(id));
            dsu.union_logged(u, v, id, net.len(id));
            let r = dsu.find(u);
            top[r] = node;
        }
        let total = n + children.len();
        let mut is_child = vec![false; total];
        for c in &children {
            is_child[c[0] as usize] = true;
            is_child[c[1] as usize] = true;
        }

        // iterative Euler tour over every tree of the forest
        let mut first = vec![u32::MAX; total];
        let mut tree_of = vec![0u32; total];
        let mut euler = Vec::with_capacity(2 * total);
        let mut depth_of = vec![0u32; total];
        let mut depth = Vec::with_capacity(2 * total);
        for root in (0..total).filter(|&x| !is_child[x]) {
            let mut stack: Vec<(u32, u8)> = vec![(root as u32, 0)];
            while let Some(top) = stack.last_mut() {
                let (x, next) = (top.0 as usize, top.1);
                if next == 0 {
                    first[x] = euler.len() as u32;
                    tree_of[x] = root as u32;
                    euler.push(x as u32);
                    depth.push(depth_of[x]);
                }
                if x >= n && next < 2 {
                    top.1 += 1;
                    let c = children[x - n][next as usize];
                    depth_of[c as usize] = depth_of[x] + 1;
                    stack.push((c, 0));
                } else {
                    stack.pop();
                    if let Some(&(p, _)) = stack.last() {
                        euler.push(p);
                        depth.push(depth_of[p as usize]);
                    }
                }
            }
        }
        let mut sparse = vec![(0..euler.len() as u32).collect::<Vec<u32>>()];
        let mut span = 1;
        while 2 * span <= euler.len() {
            let prev = sparse.last().unwrap();
            let row: Vec<u32> = (0..euler.len() + 1 - 2 * span)
                .map(|i| {
                    let (a, b) = (prev[i], prev[i + span]);
                    if depth[b as usize] < depth[a as usize] {
                        b
                    } else {
                        a
                    }
                })
                .collect();
            sparse.push(row);
            span *= 2;
        }
        MergeTree {
            n_leaves: n,
            children,
            weight,
            first,
            tree_of,
            euler,
            depth,
            sparse,
        }
    }

    fn lca(&self, u: usize, v: usize) -> usize {
        let (mut a, mut b) = (self.first[u] as usize, self.first[v] as usize);
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        let len = b - a + 1;
        let j = (usize::BITS - 1 - len.leading_zeros()) as usize;
        let (x, y) = (self.sparse[j][a], self.sparse[j][b + 1 - (1 << j)]);
        let best = if self.depth[y as usize] < self.depth[x as usize] { y } else { x };
        self.euler[best as usize] as usize
    }

    /// `inf { t : u and v connected using edges shorter than t }`.
    pub fn perc(&self, u: VertexId, v: VertexId) -> f64 {
        if u == v {
            return 0.0;
        }
        if self.tree_of[u] != self.tree_of[v] {
            return f64::INFINITY;
        }
        self.weight[self.lca(u, v)]
    }

    pub fn n_vertices(&self) -> usize {
        self.n_leaves
    }

    /// Leaves plus merge nodes.
    pub fn n_nodes(&self) -> usize {
        self.weight.len()
    }

    /// The two components, as node ids, whose merge first connects `u` and
    /// `v`. `None` when `u == v` or they are never connected.
    pub fn merge_children(&self, u: VertexId, v: VertexId) -> Option<[usize; 2]> {
        if u == v || self.tree_of[u] != self.tree_of[v] {
            return None;
        }
        let [a, b] = self.children[self.lca(u, v) - self.n_leaves];
        Some([a as usize, b as usize])
    }

    /// Minimum of a per-vertex value over the leaves of every node.
    pub fn subtree_min(&self, leaf: &[f64]) -> Vec<f64> {
        let mut out = leaf.to_vec();
        // children always precede their parent
        for [a, b] in &self.children {
            out.push(out[*a as usize].min(out[*b as usize]));
        }
        out
    }
}
