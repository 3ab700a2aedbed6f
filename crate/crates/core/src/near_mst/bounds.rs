use crate::error::{Error, Result};
use crate::excess::ExcessTable;

/// Sum of the `k` smallest positive excesses, per vertex: the smallest value
/// the exchange lower bound can take over trees differing from the MST in
/// `k` edges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBound {
    pub k: usize,
    pub value: f64,
    /// The `k`-th smallest positive excess (0 for `k = 0`).
    pub kth_excess: f64,
    /// False when `kth_excess` lies beyond the table's trusted range.
    pub trusted: bool,
}

/// Prefix sums of sorted positive excesses, answering the lower bound for
/// every `k` in O(1).
#[derive(Debug, Clone)]
pub struct LowerBoundProfile {
    sorted: Vec<f64>,
    prefix: Vec<f64>,
    n_vertices: usize,
    trusted_max: Option<f64>,
}

impl LowerBoundProfile {
    pub fn new(tbl: &ExcessTable) -> Self {
        let sorted = tbl.positive_excesses_sorted();
        let mut prefix = Vec::with_capacity(sorted.len() + 1);
        let mut acc = 0.0;
        prefix.push(0.0);
        for &x in &sorted {
            acc += x;
            prefix.push(acc);
        }
        LowerBoundProfile {
            sorted,
            prefix,
            n_vertices: tbl.n_vertices,
            trusted_max: tbl.trusted_max,
        }
    }

    pub fn max_k(&self) -> usize {
        self.sorted.len()
    }

    pub fn at(&self, k: usize) -> Result<LowerBound> {
        if k > self.sorted.len() {
            return Err(Error::InsufficientCandidates {
                needed: k,
                available: self.sorted.len(),
            });
        }
        let kth = if k == 0 { 0.0 } else { self.sorted[k - 1] };
        Ok(LowerBound {
            k,
            value: self.prefix[k] / self.n_vertices as f64,
            kth_excess: kth,
            trusted: self.trusted_max.is_none_or(|t| kth <= t),
        })
    }
}

/// Lower bound on `ε_n(k / n)`.
pub fn epsilon_lower_bound(tbl: &ExcessTable, k: usize) -> Result<LowerBound> {
    LowerBoundProfile::new(tbl).at(k)
}
