//! Random instances: the disordered lattice (i.i.d. edge lengths on the
//! cube grid) and the random Euclidean model (uniform points in a cube of
//! volume `n`, candidate edges pruned by radius).

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Open01};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{kruskal_mst, Edge, EdgeId, ModelMeta, MstResult, Network};
use crate::rng::{stream_rng, Stream};

/// Edge-length distribution for the lattice model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Dist {
    #[serde(rename = "uniform01")]
    Uniform01,
    #[serde(rename = "exp1")]
    Exp1,
}

impl Dist {
    pub fn tag(&self) -> &'static str {
        match self {
            Dist::Uniform01 => "uniform01",
            Dist::Exp1 => "exp1",
        }
    }

    /// A strictly positive draw.
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            Dist::Uniform01 => Open01.sample(rng),
            Dist::Exp1 => loop {
                let x: f64 = Exp1.sample(rng);
                if x > 0.0 {
                    break x;
                }
            },
        }
    }

    pub fn density(&self, x: f64) -> f64 {
        match self {
            Dist::Uniform01 => {
                if (0.0..=1.0).contains(&x) {
                    1.0
                } else {
                    0.0
                }
            }
            Dist::Exp1 => {
                if x >= 0.0 {
                    (-x).exp()
                } else {
                    0.0
                }
            }
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            Dist::Uniform01 => x.clamp(0.0, 1.0),
            Dist::Exp1 => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-x).exp_m1()
                }
            }
        }
    }

    /// `1 - F(x)`, computed without cancellation in the tail.
    pub fn survival(&self, x: f64) -> f64 {
        match self {
            Dist::Uniform01 => 1.0 - x.clamp(0.0, 1.0),
            Dist::Exp1 => {
                if x <= 0.0 {
                    1.0
                } else {
                    (-x).exp()
                }
            }
        }
    }

    /// `∫_x^{x+δ} (y - x) f(y) dy`.
    pub fn partial_first_moment(&self, x: f64, delta: f64) -> f64 {
        match self {
            Dist::Uniform01 => {
                let lo = x.max(0.0);
                let hi = (x + delta).min(1.0);
                if hi <= lo {
                    0.0
                } else {
                    // ∫_lo^hi (y - x) dy
                    ((hi - x).powi(2) - (lo - x).powi(2)) / 2.0
                }
            }
            Dist::Exp1 => {
                let x = x.max(0.0);
                // e^{-x} (1 - e^{-δ}(1 + δ))
                let tail = -(-delta).exp_m1() - delta * (-delta).exp();
                (-x).exp() * tail
            }
        }
    }

    /// Supremum of the density.
    pub fn density_bound(&self) -> f64 {
        1.0
    }
}

impl fmt::Display for Dist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Dist {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform01" => Ok(Dist::Uniform01),
            "exp1" => Ok(Dist::Exp1),
            other => Err(Error::UnknownDistribution(other.to_string())),
        }
    }
}

/// Bound on the density of the named edge-length distribution.
pub fn dist_density_bound(tag: &str) -> Result<f64> {
    Ok(tag.parse::<Dist>()?.density_bound())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub d: usize,
    pub m: usize,
    pub dist: Dist,
    pub seed: u64,
}

/// Addressing for the cube grid `{0..m}^d`. Vertex `v` has coordinates
/// `v = Σ c_i m^i`. Edges are grouped by axis; within an axis they are
/// ordered by the lower endpoint's coordinates in mixed radix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticeIndex {
    pub d: usize,
    pub m: usize,
}

impl LatticeIndex {
    pub fn new(d: usize, m: usize) -> Result<Self> {
        if d < 2 || m < 2 {
            return Err(Error::Invalid(format!("lattice needs d >= 2 and m >= 2, got d={d}, m={m}")));
        }
        let n = (m as u64)
            .checked_pow(d as u32)
            .filter(|&n| n <= u32::MAX as u64)
            .ok_or_else(|| Error::Overflow(format!("{m}^{d} vertices")))?;
        (n as usize)
            .checked_mul(d)
            .ok_or_else(|| Error::Overflow(format!("{m}^{d} vertices")))?;
        Ok(LatticeIndex { d, m })
    }

    pub fn n_vertices(&self) -> usize {
        self.m.pow(self.d as u32)
    }

    pub fn n_edges(&self) -> usize {
        self.d * self.m.pow(self.d as u32 - 1) * (self.m - 1)
    }

    pub fn vertex(&self, coords: &[usize]) -> usize {
        coords.iter().rev().fold(0, |acc, &c| acc * self.m + c)
    }

    pub fn coords(&self, mut v: usize) -> Vec<usize> {
        (0..self.d)
            .map(|_| {
                let c = v % self.m;
                v /= self.m;
                c
            })
            .collect()
    }

    /// Id of the edge from `coords` to `coords + e_axis`, if it exists.
    pub fn edge_id(&self, coords: &[usize], axis: usize) -> Option<EdgeId> {
        if coords[axis] + 1 >= self.m {
            return None;
        }
        let per_axis = self.m.pow(self.d as u32 - 1) * (self.m - 1);
        let mut rank = 0;
        for i in (0..self.d).rev() {
            let radix = if i == axis { self.m - 1 } else { self.m };
            rank = rank * radix + coords[i];
        }
        Some(axis * per_axis + rank)
    }
}

/// The disordered lattice: grid adjacency of `{1..m}^d` with i.i.d. lengths.
pub fn gen_lattice(spec: &LatticeSpec) -> Result<Network> {
    let idx = LatticeIndex::new(spec.d, spec.m)?;
    let n = idx.n_vertices();
    let mut edges = Vec::with_capacity(idx.n_edges());
    let mut coords = vec![0usize; spec.d];
    for axis in 0..spec.d {
        // iterate lower endpoints in the same mixed-radix order as edge_id
        for rank in 0..idx.n_edges() / spec.d {
            let mut r = rank;
            for (i, c) in coords.iter_mut().enumerate() {
                let radix = if i == axis { spec.m - 1 } else { spec.m };
                *c = r % radix;
                r /= radix;
            }
            let u = idx.vertex(&coords);
            let v = u + spec.m.pow(axis as u32);
            edges.push(Edge::new(u, v, 0.0));
        }
    }
    let mut rng = stream_rng(spec.seed, Stream::LatticeLengths, 0);
    for e in edges.iter_mut() {
        e.len = spec.dist.sample(&mut rng);
    }
    redraw_ties(&mut edges, spec.dist, spec.seed);
    let meta = ModelMeta {
        model: "lattice".into(),
        d: Some(spec.d),
        m: Some(spec.m),
        n: Some(n),
        seed: Some(spec.seed),
        dist: Some(spec.dist.tag().into()),
        ..Default::default()
    };
    Ok(Network::new(n, edges)?.with_meta(meta))
}

/// Redraws the later of any two edges whose lengths coincide exactly.
fn redraw_ties(edges: &mut [Edge], dist: Dist, seed: u64) {
    let mut fallback = stream_rng(seed, Stream::LatticeLengths, 1);
    loop {
        let mut ids: Vec<usize> = (0..edges.len()).collect();
        ids.sort_unstable_by(|&a, &b| edges[a].len.total_cmp(&edges[b].len).then(a.cmp(&b)));
        let tied: Vec<usize> = ids
            .windows(2)
            .filter(|w| edges[w[0]].len == edges[w[1]].len)
            .map(|w| w[1])
            .collect();
        if tied.is_empty() {
            return;
        }
        for id in tied {
            edges[id].len = dist.sample(&mut fallback);
        }
    }
}

/// Candidate-edge radius for the Euclidean model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cutoff {
    /// Start at `2 (ln n)^{1/d}` and double until certified.
    Auto,
    Fixed(f64),
}

impl FromStr for Cutoff {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(Cutoff::Auto);
        }
        match s.parse::<f64>() {
            Ok(r) if r > 0.0 && r.is_finite() => Ok(Cutoff::Fixed(r)),
            _ => Err(Error::Invalid(format!("cutoff must be 'auto' or a positive number, got {s}"))),
        }
    }
}

impl fmt::Display for Cutoff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cutoff::Auto => f.write_str("auto"),
            Cutoff::Fixed(r) => write!(f, "{r}"),
        }
    }
}

impl Serialize for Cutoff {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Cutoff::Auto => s.serialize_str("auto"),
            Cutoff::Fixed(r) => s.serialize_f64(*r),
        }
    }
}

impl<'de> Deserialize<'de> for Cutoff {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(r) => Cutoff::from_str(&r.to_string()),
            Repr::Str(s) => Cutoff::from_str(&s),
        }
        .map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EuclideanSpec {
    pub d: usize,
    pub n: usize,
    pub seed: u64,
    pub cutoff: Cutoff,
}

/// A radius-pruned geometric network together with its MST and the
/// certification outcome.
#[derive(Debug, Clone)]
pub struct RadiusNetwork {
    pub net: Network,
    pub mst: MstResult,
    pub cutoff: f64,
    /// True when the longest MST edge is at most `cutoff / 2` or the
    /// candidate set is the complete graph.
    pub validated: bool,
}

/// All pairs at distance `<= r` among points in the box `[lo, hi]^d`, found
/// by bucketing into cells of side at least `r`. Edges are sorted by
/// `(u, v)` with `u < v`.
pub fn radius_edges(coords: &[f64], d: usize, lo: f64, hi: f64, r: f64) -> Vec<Edge> {
    let n = coords.len() / d;
    if n < 2 {
        return Vec::new();
    }
    let extent = (hi - lo).max(f64::MIN_POSITIVE);
    let mut k = ((extent / r).floor() as usize).max(1);
    // keep the cell count near the point count
    let cap = (2 * n).max(1) as f64;
    while (k as f64).powi(d as i32) > cap && k > 1 {
        k = ((cap.powf(1.0 / d as f64)).floor() as usize).max(1).min(k - 1);
    }
    let side = extent / k as f64;
    let cell_of = |p: &[f64]| -> usize {
        p.iter().rev().fold(0, |acc, &x| {
            let c = (((x - lo) / side).floor() as isize).clamp(0, k as isize - 1) as usize;
            acc * k + c
        })
    };
    let n_cells = k.pow(d as u32);
    let cells: Vec<usize> = (0..n).map(|i| cell_of(&coords[i * d..(i + 1) * d])).collect();
    let mut start = vec![0usize; n_cells + 1];
    for &c in &cells {
        start[c + 1] += 1;
    }
    for c in 0..n_cells {
        start[c + 1] += start[c];
    }
    let mut fill = start.clone();
    let mut members = vec![0u32; n];
    for (i, &c) in cells.iter().enumerate() {
        members[fill[c]] = i as u32;
        fill[c] += 1;
    }

    let offsets: Vec<Vec<isize>> = (0..3usize.pow(d as u32))
        .map(|mut t| {
            (0..d)
                .map(|_| {
                    let o = (t % 3) as isize - 1;
                    t /= 3;
                    o
                })
                .collect()
        })
        .collect();
    let r2 = r * r;
    let mut edges = Vec::new();
    let mut cc = vec![0isize; d];
    for i in 0..n {
        let p = &coords[i * d..(i + 1) * d];
        let mut c = cells[i];
        for slot in cc.iter_mut() {
            *slot = (c % k) as isize;
            c /= k;
        }
        'off: for off in &offsets {
            let mut cell = 0usize;
            for a in (0..d).rev() {
                let x = cc[a] + off[a];
                if x < 0 || x >= k as isize {
                    continue 'off;
                }
                cell = cell * k + x as usize;
            }
            for &j in &members[start[cell]..start[cell + 1]] {
                let j = j as usize;
                if j <= i {
                    continue;
                }
                let q = &coords[j * d..(j + 1) * d];
                let dist2: f64 = p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum();
                if dist2 <= r2 {
                    edges.push(Edge::new(i, j, dist2.sqrt()));
                }
            }
        }
    }
    edges.sort_unstable_by_key(|e| (e.u, e.v));
    edges
}

/// Builds the radius network on `coords` under the given cutoff policy.
///
/// `Auto` starts from `2 (ln n)^{1/d}` and doubles until the candidate graph
/// is connected and its longest MST edge is at most half the radius, which
/// makes the candidate MST equal to the complete-graph MST and keeps every
/// edge with excess below `cutoff / 2`.
pub fn build_radius_network(coords: &[f64], d: usize, lo: f64, hi: f64, cutoff: Cutoff) -> Result<RadiusNetwork> {
    let n = coords.len() / d;
    let diameter = (hi - lo) * (d as f64).sqrt();
    let mut r = match cutoff {
        Cutoff::Auto => 2.0 * (n.max(2) as f64).ln().powf(1.0 / d as f64),
        Cutoff::Fixed(r) => r,
    };
    loop {
        let complete = r >= diameter;
        let net = Network::new(n, radius_edges(coords, d, lo, hi, r))?;
        let connected = net.is_connected();
        if !connected {
            match cutoff {
                Cutoff::Fixed(_) => return Err(Error::CutoffTooSmall(r)),
                Cutoff::Auto => {
                    r *= 2.0;
                    continue;
                }
            }
        }
        let mst = kruskal_mst(&net)?;
        let longest = mst.tree_edges.iter().map(|&e| net.len(e)).fold(0.0, f64::max);
        let validated = complete || longest <= r / 2.0;
        if validated || matches!(cutoff, Cutoff::Fixed(_)) {
            return Ok(RadiusNetwork {
                net,
                mst,
                cutoff: r,
                validated,
            });
        }
        r *= 2.0;
    }
}

/// Random Euclidean instance: `n` uniform points in `[0, n^{1/d}]^d`.
pub fn gen_euclidean(spec: &EuclideanSpec) -> Result<Network> {
    Ok(gen_euclidean_with_mst(spec)?.net)
}

pub fn gen_euclidean_with_mst(spec: &EuclideanSpec) -> Result<RadiusNetwork> {
    if spec.d < 2 || spec.n < 2 {
        return Err(Error::Invalid(format!(
            "euclidean model needs d >= 2 and n >= 2, got d={}, n={}",
            spec.d, spec.n
        )));
    }
    let side = (spec.n as f64).powf(1.0 / spec.d as f64);
    // an exact distance tie is a probability-zero event; resample if it occurs
    for attempt in 0.. {
        let mut rng = stream_rng(spec.seed, Stream::EuclideanPoints, attempt);
        let coords: Vec<f64> = (0..spec.n * spec.d).map(|_| rng.random::<f64>() * side).collect();
        match build_radius_network(&coords, spec.d, 0.0, side, spec.cutoff) {
            Err(Error::TiedLengths(..)) => continue,
            Err(e) => return Err(e),
            Ok(mut rn) => {
                let meta = ModelMeta {
                    model: "euclidean".into(),
                    d: Some(spec.d),
                    n: Some(spec.n),
                    seed: Some(spec.seed),
                    coords,
                    cutoff: Some(rn.cutoff),
                    cutoff_validated: Some(rn.validated),
                    ..Default::default()
                };
                rn.net = rn.net.with_meta(meta);
                return Ok(rn);
            }
        }
    }
    unreachable!()
}

/// A random connected network: a random spanning tree plus random extra
/// pairs up to `n_edges` total (capped at the complete graph), with
/// i.i.d. uniform lengths.
pub fn random_connected(n: usize, n_edges: usize, seed: u64) -> Network {
    let mut rng = stream_rng(seed, Stream::Oracle, n as u64);
    let max_edges = n * (n - 1) / 2;
    let target = n_edges.clamp(n - 1, max_edges);
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.random_range(0..=i));
    }
    let mut present = std::collections::HashSet::new();
    let mut edges = Vec::with_capacity(target);
    for i in 1..n {
        let j = rng.random_range(0..i);
        let (a, b) = (perm[i].min(perm[j]), perm[i].max(perm[j]));
        present.insert((a, b));
        edges.push(Edge::new(a, b, 0.0));
    }
    while edges.len() < target {
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        if a == b {
            continue;
        }
        let key = (a.min(b), a.max(b));
        if present.insert(key) {
            edges.push(Edge::new(key.0, key.1, 0.0));
        }
    }
    for e in edges.iter_mut() {
        e.len = Dist::Uniform01.sample(&mut rng);
    }
    redraw_ties(&mut edges, Dist::Uniform01, seed ^ 0x5eed);
    Network::new(n, edges).expect("generated network is valid")
}
