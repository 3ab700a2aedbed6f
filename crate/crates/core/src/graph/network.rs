use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::DisjointSet;

/// Dense edge index, assigned at construction.
pub type EdgeId = usize;
pub type VertexId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: u32,
    pub v: u32,
    pub len: f64,
}

impl Edge {
    pub fn new(u: usize, v: usize, len: f64) -> Self {
        Edge {
            u: u as u32,
            v: v as u32,
            len,
        }
    }

    #[inline]
    pub fn endpoints(&self) -> (usize, usize) {
        (self.u as usize, self.v as usize)
    }
}

/// Provenance of a generated network. Serialized as the JSON sidecar of the
/// CSV edge list.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ModelMeta {
    pub model: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dist: Option<String>,
    /// Euclidean vertex coordinates, `d` values per vertex.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub coords: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff_validated: Option<bool>,
}

/// An undirected network with strictly positive, pairwise distinct edge
/// lengths and no loops or parallel edges.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    n_vertices: usize,
    edges: Vec<Edge>,
    pub meta: Option<ModelMeta>,
}

impl Network {
    /// Validates and builds a network. Ties and duplicate pairs are rejected,
    /// never perturbed.
    pub fn new(n_vertices: usize, edges: Vec<Edge>) -> Result<Self> {
        if n_vertices == 0 {
            return Err(Error::Invalid("network has no vertices".into()));
        }
        if n_vertices > u32::MAX as usize {
            return Err(Error::Overflow(format!("{n_vertices} vertices")));
        }
        for (id, e) in edges.iter().enumerate() {
            let (u, v) = e.endpoints();
            if u == v {
                return Err(Error::Invalid(format!("edge {id} is a loop at {u}")));
            }
            if u >= n_vertices || v >= n_vertices {
                return Err(Error::Invalid(format!(
                    "edge {id} ({u},{v}) references a vertex >= {n_vertices}"
                )));
            }
            if !(e.len.is_finite() && e.len > 0.0) {
                return Err(Error::Invalid(format!("edge {id} has length {}", e.len)));
            }
        }
        let mut pairs: Vec<(u32, u32, usize)> = edges
            .iter()
            .enumerate()
            .map(|(i, e)| (e.u.min(e.v), e.u.max(e.v), i))
            .collect();
        pairs.sort_unstable();
        if let Some(w) = pairs.windows(2).find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
            return Err(Error::Invalid(format!(
                "edges {} and {} join the same pair ({},{})",
                w[0].2, w[1].2, w[0].0, w[0].1
            )));
        }
        let net = Network {
            n_vertices,
            edges,
            meta: None,
        };
        net.check_distinct_lengths()?;
        Ok(net)
    }

    pub fn with_meta(mut self, meta: ModelMeta) -> Self {
        self.meta = Some(meta);
        self
    }

    #[inline]
    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    #[inline]
    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    #[inline]
    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id]
    }

    #[inline]
    pub fn len(&self, id: EdgeId) -> f64 {
        self.edges[id].len
    }

    /// Edge ids in increasing length order.
    pub fn sorted_edge_ids(&self) -> Vec<EdgeId> {
        let mut ids: Vec<EdgeId> = (0..self.edges.len()).collect();
        ids.sort_unstable_by(|&a, &b| self.edges[a].len.total_cmp(&self.edges[b].len));
        ids
    }

    fn check_distinct_lengths(&self) -> Result<()> {
        let ids = self.sorted_edge_ids();
        for w in ids.windows(2) {
            if self.edges[w[0]].len == self.edges[w[1]].len {
                let (a, b) = (w[0].min(w[1]), w[0].max(w[1]));
                return Err(Error::TiedLengths(a, b, self.edges[a].len));
            }
        }
        Ok(())
    }

    pub fn is_connected(&self) -> bool {
        let mut dsu = DisjointSet::new(self.n_vertices);
        for e in &self.edges {
            dsu.union(e.u as usize, e.v as usize);
        }
        dsu.n_components() == 1
    }

    /// Adjacency lists of `(neighbor, edge id)`.
    pub fn adjacency(&self) -> Vec<Vec<(usize, EdgeId)>> {
        let mut adj = vec![Vec::new(); self.n_vertices];
        for (id, e) in self.edges.iter().enumerate() {
            adj[e.u as usize].push((e.v as usize, id));
            adj[e.v as usize].push((e.u as usize, id));
        }
        adj
    }

    /// Euclidean coordinates of vertex `v`, if the network carries them.
    pub fn coords(&self, v: VertexId) -> Option<&[f64]> {
        let meta = self.meta.as_ref()?;
        let d = meta.d?;
        meta.coords.get(v * d..(v + 1) * d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_ties_loops_and_duplicates() {
        let tie = Network::new(3, vec![Edge::new(0, 1, 1.0), Edge::new(1, 2, 1.0)]);
        assert!(matches!(tie, Err(Error::TiedLengths(0, 1, _))));
        assert!(Network::new(2, vec![Edge::new(1, 1, 1.0)]).is_err());
        assert!(Network::new(2, vec![Edge::new(0, 1, 1.0), Edge::new(1, 0, 2.0)]).is_err());
        assert!(Network::new(2, vec![Edge::new(0, 1, 0.0)]).is_err());
        assert!(Network::new(2, vec![Edge::new(0, 2, 1.0)]).is_err());
    }

    #[test]
    fn connectivity() {
        let a = Network::new(3, vec![Edge::new(0, 1, 1.0), Edge::new(1, 2, 2.0)]).unwrap();
        assert!(a.is_connected());
        let b = Network::new(3, vec![Edge::new(0, 1, 1.0)]).unwrap();
        assert!(!b.is_connected());
    }
}
