//! Near-minimal spanning trees on random networks.
//!
//! Builds the disordered lattice and the random Euclidean model, computes
//! their minimal spanning trees, percolation values and edge excesses, and
//! brackets the cost `ε_n(δ)` of the cheapest spanning tree that differs from
//! the MST in at least `δ n` edges.

pub mod error;
pub mod excess;
pub mod experiments;
pub mod generators;
pub mod graph;
pub mod near_mst;
pub mod percolation;
pub mod rng;

pub use error::{Error, Result};
