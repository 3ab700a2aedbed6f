//! Counting disjoint 3×3 blocks that admit a cheap local exchange.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::LatticeIndex;
use crate::graph::{EdgeId, Network};
use crate::near_mst::Swap;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigCount {
    /// Blocks fully inside the instance.
    pub blocks: usize,
    pub matches: usize,
    /// Sum of `len(added) - len(removed)` over matches.
    pub cost_sum: f64,
    /// The exchange each matching block licenses.
    pub swaps: Vec<Swap>,
}

impl ConfigCount {
    pub fn frequency(&self) -> f64 {
        if self.blocks == 0 {
            0.0
        } else {
            self.matches as f64 / self.blocks as f64
        }
    }

    pub fn mean_cost(&self) -> f64 {
        if self.blocks == 0 {
            0.0
        } else {
            self.cost_sum / self.blocks as f64
        }
    }
}

/// Counts blocks showing the pattern. Dispatches on the network's model:
/// the 4-cycle pattern for a planar lattice, the three-point triangle
/// pattern for a planar Euclidean instance.
pub fn config_count(net: &Network, delta: f64) -> Result<ConfigCount> {
    if !(delta > 0.0) {
        return Err(Error::Invalid(format!("delta must be positive, got {delta}")));
    }
    let meta = net.meta.clone().unwrap_or_default();
    match (meta.model.as_str(), meta.d, meta.m) {
        ("lattice", Some(2), Some(m)) => Ok(lattice_blocks(net, m, delta)),
        ("euclidean", Some(2), _) => euclidean_blocks(net, delta),
        _ => Err(Error::Invalid(format!(
            "block counting needs a planar lattice or Euclidean instance, got model {:?} d={:?}",
            meta.model, meta.d
        ))),
    }
}

/// Block `(bx, by)` spans vertex coordinates `3b..=3b+3` on each axis. The
/// cycle sits on local coordinates 1 and 2:
///
/// ```text
///        |       |
///   -- (1,2) -b- (2,2) --
///        a       c
///   -- (1,1) -d- (2,1) --
///        |       |
/// ```
///
/// Pattern: `len(a) = x`, `len(b)` in `(x, x + δ)`, `len(c), len(d) < x`,
/// and the eight edges leaving the cycle longer than `x + δ`.
fn lattice_blocks(net: &Network, m: usize, delta: f64) -> ConfigCount {
    let idx = LatticeIndex { d: 2, m };
    let per_axis = (m - 1) / 3;
    let id = |x: usize, y: usize, axis: usize| idx.edge_id(&[x, y], axis).expect("block edge inside lattice");
    let mut out = ConfigCount {
        blocks: per_axis * per_axis,
        matches: 0,
        cost_sum: 0.0,
        swaps: Vec::new(),
    };
    for by in 0..per_axis {
        for bx in 0..per_axis {
            let (x0, y0) = (3 * bx, 3 * by);
            let a = id(x0 + 1, y0 + 1, 1);
            let x = net.len(a);
            let b = id(x0 + 1, y0 + 2, 0);
            let lb = net.len(b);
            if !(lb > x && lb < x + delta) {
                continue;
            }
            let c = id(x0 + 2, y0 + 1, 1);
            let d = id(x0 + 1, y0 + 1, 0);
            if net.len(c) >= x || net.len(d) >= x {
                continue;
            }
            let outer = [
                id(x0, y0 + 1, 0),
                id(x0 + 1, y0, 1),
                id(x0 + 2, y0 + 1, 0),
                id(x0 + 2, y0, 1),
                id(x0 + 2, y0 + 2, 0),
                id(x0 + 2, y0 + 2, 1),
                id(x0, y0 + 2, 0),
                id(x0 + 1, y0 + 2, 1),
            ];
            if outer.iter().all(|&e| net.len(e) > x + delta) {
                out.matches += 1;
                out.cost_sum += lb - x;
                out.swaps.push(Swap {
                    added: b,
                    removed: a,
                    cost: lb - x,
                });
            }
        }
    }
    out
}

/// Blocks are the `3 × 3` squares of a grid anchored at the origin. A block
/// matches when it holds exactly three points, all inside its central unit
/// square, and the triangle's longest side lies in `(x, x + δ)` with `x`
/// the middle side and `x + δ < 1`.
fn euclidean_blocks(net: &Network, delta: f64) -> Result<ConfigCount> {
    let n = net.n_vertices();
    let side = (n as f64).sqrt();
    let per_axis = (side / 3.0).floor() as usize;
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); per_axis * per_axis];
    for v in 0..n {
        let p = net
            .coords(v)
            .ok_or_else(|| Error::Invalid("euclidean instance without coordinates".into()))?;
        let (bx, by) = ((p[0] / 3.0).floor() as usize, (p[1] / 3.0).floor() as usize);
        if bx < per_axis && by < per_axis {
            members[by * per_axis + bx].push(v);
        }
    }
    let adj = net.adjacency();
    let edge_between = |u: usize, v: usize| -> Result<EdgeId> {
        adj[u]
            .iter()
            .find(|&&(w, _)| w == v)
            .map(|&(_, e)| e)
            .ok_or_else(|| Error::CutoffTooSmall(net.meta.as_ref().and_then(|m| m.cutoff).unwrap_or(f64::NAN)))
    };
    let mut out = ConfigCount {
        blocks: per_axis * per_axis,
        matches: 0,
        cost_sum: 0.0,
        swaps: Vec::new(),
    };
    for (b, pts) in members.iter().enumerate() {
        if pts.len() != 3 {
            continue;
        }
        let (bx, by) = ((b % per_axis) as f64 * 3.0, (b / per_axis) as f64 * 3.0);
        let central = pts.iter().all(|&v| {
            let p = net.coords(v).expect("checked above");
            p[0] > bx + 1.0 && p[0] < bx + 2.0 && p[1] > by + 1.0 && p[1] < by + 2.0
        });
        if !central {
            continue;
        }
        let mut sides = [
            edge_between(pts[0], pts[1])?,
            edge_between(pts[1], pts[2])?,
            edge_between(pts[0], pts[2])?,
        ];
        sides.sort_by(|&e, &f| net.len(e).total_cmp(&net.len(f)));
        let (mid, long) = (sides[1], sides[2]);
        let x = net.len(mid);
        let gap = net.len(long) - x;
        if gap < delta && x + delta < 1.0 {
            out.matches += 1;
            out.cost_sum += gap;
            out.swaps.push(Swap {
                added: long,
                removed: mid,
                cost: gap,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::excess::excess_table;
    use crate::generators::{build_radius_network, gen_euclidean, gen_lattice, Cutoff, Dist, EuclideanSpec, LatticeSpec};
    use crate::graph::{kruskal_mst, Edge, ModelMeta};
    use crate::rng::{stream_rng, Stream};
    use rand::Rng;

    /// A 4×4 lattice (one usable block) with lengths set per edge id.
    fn lattice_with(lens: impl Fn(usize, &Edge) -> f64) -> Network {
        let base = gen_lattice(&LatticeSpec { d: 2, m: 4, dist: Dist::Uniform01, seed: 0 }).unwrap();
        let edges = base
            .edges()
            .iter()
            .enumerate()
            .map(|(i, e)| Edge::new(e.u as usize, e.v as usize, lens(i, e)))
            .collect();
        Network::new(16, edges).unwrap().with_meta(base.meta.clone().unwrap())
    }

    fn block_ids() -> (EdgeId, EdgeId, EdgeId, EdgeId) {
        let idx = LatticeIndex { d: 2, m: 4 };
        (
            idx.edge_id(&[1, 1], 1).unwrap(),
            idx.edge_id(&[1, 2], 0).unwrap(),
            idx.edge_id(&[2, 1], 1).unwrap(),
            idx.edge_id(&[1, 1], 0).unwrap(),
        )
    }

    #[test]
    fn hand_built_block() {
        let (a, b, c, d) = block_ids();
        // distinct filler lengths above 0.9 for every other edge
        let net = lattice_with(|i, _| match i {
            _ if i == a => 0.4,
            _ if i == b => 0.45,
            _ if i == c => 0.2,
            _ if i == d => 0.3,
            _ => 0.9 + i as f64 * 1e-3,
        });
        let got = config_count(&net, 0.1).unwrap();
        assert_eq!((got.blocks, got.matches), (1, 1));
        assert!((got.cost_sum - 0.05).abs() < 1e-15);
        assert_eq!(got.swaps, vec![Swap { added: b, removed: a, cost: got.cost_sum }]);

        let mst = kruskal_mst(&net).unwrap();
        assert!(mst.contains(a) && mst.contains(c) && mst.contains(d) && !mst.contains(b));
        let tbl = excess_table(&net, &mst);
        assert_eq!(tbl.cycle_max_edge[b], a);
        assert!((tbl.exc[b] - 0.05).abs() < 1e-15);

        // gap too wide for δ
        assert_eq!(config_count(&net, 0.04).unwrap().matches, 0);
    }

    #[test]
    fn evenly_spaced_lengths_fail_outer_test() {
        let net = lattice_with(|i, _| (i + 1) as f64 / 25.0);
        for delta in [0.01, 0.1, 0.5] {
            assert_eq!(config_count(&net, delta).unwrap().matches, 0);
        }
    }

    #[test]
    fn trailing_rows_are_ignored() {
        for (m, per_axis) in [(4, 1), (6, 1), (7, 2), (9, 2), (10, 3)] {
            let net = gen_lattice(&LatticeSpec { d: 2, m, dist: Dist::Uniform01, seed: 1 }).unwrap();
            assert_eq!(config_count(&net, 0.5).unwrap().blocks, per_axis * per_axis);
        }
    }

    #[test]
    fn rejects_other_models() {
        let net = gen_lattice(&LatticeSpec { d: 3, m: 4, dist: Dist::Uniform01, seed: 1 }).unwrap();
        assert!(config_count(&net, 0.5).is_err());
        let plain = crate::generators::random_connected(10, 20, 1);
        assert!(config_count(&plain, 0.5).is_err());
    }

    fn assert_valid(net: &Network, got: &ConfigCount) {
        let mst = kruskal_mst(net).unwrap();
        let tbl = excess_table(net, &mst);
        for s in &got.swaps {
            assert!(mst.contains(s.removed) && !mst.contains(s.added));
            assert_eq!(tbl.cycle_max_edge[s.added], s.removed);
            assert!((s.cost - (net.len(s.added) - net.len(s.removed))).abs() < 1e-15);
            assert!((tbl.exc[s.added] - s.cost).abs() < 1e-12);
        }
    }

    #[test]
    fn hand_built_triangle() {
        // 36 points in [0, 6]^2: a triangle in the central unit square of the
        // first block, the rest spread over the other three blocks
        let mut coords = vec![1.2, 1.2, 1.8, 1.3, 1.5, 1.75];
        let mut rng = stream_rng(3, Stream::Oracle, 0);
        let mut k = 0;
        while coords.len() < 72 {
            let (i, j) = (k % 6, k / 6);
            k += 1;
            if i < 3 && j < 3 {
                continue;
            }
            coords.extend_from_slice(&[i as f64 + rng.random::<f64>(), j as f64 + rng.random::<f64>()]);
        }
        let rn = build_radius_network(&coords, 2, 0.0, 6.0, Cutoff::Auto).unwrap();
        let meta = ModelMeta { model: "euclidean".into(), d: Some(2), n: Some(36), coords, ..Default::default() };
        let net = rn.net.with_meta(meta);
        let mut sides = [0.6f64.hypot(0.1), 0.3f64.hypot(0.45), 0.3f64.hypot(0.55)];
        sides.sort_by(f64::total_cmp);
        let got = config_count(&net, 0.1).unwrap();
        assert_eq!((got.blocks, got.matches), (4, 1));
        assert!((got.cost_sum - (sides[2] - sides[1])).abs() < 1e-12);
        assert_valid(&net, &got);
        assert_eq!(config_count(&net, (sides[2] - sides[1]) * (1.0 - 1e-9)).unwrap().matches, 0);
    }

    #[test]
    fn euclidean_swaps_are_valid_exchanges() {
        for seed in 0..4 {
            let net = gen_euclidean(&EuclideanSpec { d: 2, n: 4000, seed, cutoff: Cutoff::Auto }).unwrap();
            let got = config_count(&net, 0.5).unwrap();
            assert_eq!(got.blocks, 21 * 21);
            assert_valid(&net, &got);
        }
    }
}
