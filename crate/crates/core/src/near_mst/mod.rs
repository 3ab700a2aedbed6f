//! Bracketing `ε_n(δ)`, the per-vertex extra length of the cheapest spanning
//! tree that differs from the MST in at least `δ n` edges.
//!
//! The lower bound sums the smallest excesses; the upper bound is realized by
//! an explicit sequence of exchanges; tiny instances are solved exactly by
//! enumeration.

mod bounds;
mod enumerate;
mod exchange;
mod link_cut;
mod oracle;

use serde::{Deserialize, Serialize};

pub use bounds::{epsilon_lower_bound, LowerBound, LowerBoundProfile};
pub use enumerate::{
    enumerate_spanning_trees, exact_epsilon, matrix_tree_count, ExactProfile, MAX_ENUM_EDGES, MAX_ENUM_TREES,
    MAX_ENUM_VERTICES,
};
pub use exchange::{greedy_plan, Strategy, Swap, SwapPlan};
pub use oracle::{oracle_instance, sandwich_check, SandwichReport, SANDWICH_TOL};

use crate::error::{Error, Result};
use crate::excess::ExcessTable;
use crate::graph::{MstResult, Network};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub k: usize,
    pub delta: f64,
    pub lb: f64,
    pub ub: f64,
    pub exact: Option<f64>,
    /// `|T' \ T|` of the tree realizing `ub` (at least `k`).
    pub ub_tree_diff: usize,
    pub strategy: Strategy,
    /// False when the lower bound used excesses beyond the trusted range.
    pub lb_trusted: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EpsilonCurve {
    pub rows: Vec<CurveRow>,
}

/// Greedy exchange with exactly `k` swaps, and the curve row it certifies.
pub fn greedy_exchange(
    net: &Network,
    mst: &MstResult,
    tbl: &ExcessTable,
    k: usize,
    strategy: Strategy,
) -> Result<(SwapPlan, CurveRow)> {
    if k == 0 {
        return Err(Error::Invalid("greedy exchange needs k >= 1".into()));
    }
    let plan = greedy_plan(net, mst, tbl, k, strategy);
    if plan.len() < k {
        return Err(Error::ExhaustedCandidates {
            accepted: plan.len(),
            requested: k,
        });
    }
    let lb = epsilon_lower_bound(tbl, k)?;
    let n = net.n_vertices() as f64;
    let row = CurveRow {
        k,
        delta: k as f64 / n,
        lb: lb.value,
        ub: plan.total_cost / n,
        exact: None,
        ub_tree_diff: k,
        strategy,
        lb_trusted: lb.trusted,
    };
    Ok((plan, row))
}

/// `k = ⌈δ n⌉`, robust to `δ n` landing a rounding error above an integer.
pub fn swaps_for_delta(delta: f64, n: usize) -> usize {
    let x = delta * n as f64;
    let r = x.round();
    if (x - r).abs() <= 1e-9 * x.max(1.0) {
        r as usize
    } else {
        x.ceil() as usize
    }
}

/// Upper-bound envelope of one greedy run: for each `k`, the cheapest
/// prefix with at least `k` swaps.
#[derive(Debug, Clone)]
struct Envelope {
    /// `best[k] = (cost, j)` minimizing `prefix[j]` over `j >= k`.
    best: Vec<(f64, usize)>,
}

impl Envelope {
    fn new(plan: &SwapPlan) -> Self {
        let prefix = plan.prefix_costs();
        let mut best = vec![(f64::INFINITY, 0); prefix.len()];
        let mut cur = (f64::INFINITY, 0);
        for j in (0..prefix.len()).rev() {
            if prefix[j] <= cur.0 {
                cur = (prefix[j], j);
            }
            best[j] = cur;
        }
        Envelope { best }
    }

    fn at(&self, k: usize) -> Option<(f64, usize)> {
        self.best.get(k).copied()
    }
}

/// Lower and upper bounds (and the exact value on tiny instances) for each
/// `δ` in `deltas`.
///
/// Each strategy runs once up to the largest `k`; the upper bound at `k` is
/// the cheapest prefix with at least `k` swaps, which keeps the curve
/// nondecreasing. The reported bound is the smaller of the two strategies.
pub fn epsilon_curve(net: &Network, mst: &MstResult, tbl: &ExcessTable, deltas: &[f64]) -> Result<EpsilonCurve> {
    if deltas.iter().any(|&d| !(d > 0.0 && d < 1.0)) || deltas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Invalid("deltas must be increasing and inside (0, 1)".into()));
    }
    let n = net.n_vertices();
    let ks: Vec<usize> = deltas.iter().map(|&d| swaps_for_delta(d, n)).collect();
    let k_max = ks.iter().copied().max().unwrap_or(0);
    let profile = LowerBoundProfile::new(tbl);
    let envelopes: Vec<(Strategy, Envelope)> = Strategy::ALL
        .iter()
        .map(|&s| (s, Envelope::new(&greedy_plan(net, mst, tbl, k_max, s))))
        .collect();
    let exact = if n <= MAX_ENUM_VERTICES || net.n_edges() <= MAX_ENUM_EDGES {
        ExactProfile::new(net, mst).ok()
    } else {
        None
    };
    let mut rows = Vec::with_capacity(ks.len());
    for (&delta, &k) in deltas.iter().zip(&ks) {
        let lb = profile.at(k)?;
        let (ub_cost, diff, strategy) = envelopes
            .iter()
            .filter_map(|(s, env)| env.at(k).map(|(c, j)| (c, j, *s)))
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .ok_or(Error::ExhaustedCandidates {
                accepted: envelopes.iter().map(|(_, e)| e.best.len() - 1).max().unwrap_or(0),
                requested: k,
            })?;
        rows.push(CurveRow {
            k,
            delta,
            lb: lb.value,
            ub: ub_cost / n as f64,
            exact: exact.as_ref().and_then(|p| p.epsilon(k).ok()),
            ub_tree_diff: diff,
            strategy,
            lb_trusted: lb.trusted,
        });
    }
    Ok(EpsilonCurve { rows })
}

/// CSV with header `k,delta,lb,ub,exact,ub_strategy`.
pub fn write_curve_csv<W: std::io::Write>(curve: &EpsilonCurve, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["k", "delta", "lb", "ub", "exact", "ub_strategy"])?;
    for r in &curve.rows {
        w.write_record([
            r.k.to_string(),
            r.delta.to_string(),
            r.lb.to_string(),
            r.ub.to_string(),
            r.exact.map(|x| x.to_string()).unwrap_or_default(),
            r.strategy.tag().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
