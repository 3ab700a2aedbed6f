//! Graph substrate: edge-list networks, disjoint-set union, Kruskal MST and
//! threshold-subgraph components.

mod dsu;
pub mod io;
mod mst;
mod network;

pub use dsu::{DisjointSet, Merge};
pub use mst::{components_at, is_spanning_tree, kruskal_mst, MstResult, Partition, RootedIndex};
pub use network::{Edge, EdgeId, ModelMeta, Network, VertexId};
