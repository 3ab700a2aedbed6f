//! Origin-rooted percolation on a finite window of a rate-1 Poisson process.
//!
//! The infinite process is approximated by the window `[-W, W]^d` with an
//! extra point at the origin. Quantities are trusted only at distance more
//! than a margin (default `2 * cutoff`) from the window boundary.

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::excess::{check_grid, excess_table, perc_all_pairs, ExcessTable, MergeTree, MuEstimate};
use crate::generators::{build_radius_network, Cutoff, RadiusNetwork};
use crate::graph::ModelMeta;
use crate::rng::{derive_seed, stream_rng, Stream};

/// Poisson points in `[-W, W]^d` plus the origin, which is point 0.
#[derive(Debug, Clone, PartialEq)]
pub struct RootedSample {
    pub d: usize,
    pub half_width: f64,
    /// Flat coordinates, `d` per point; the origin comes first.
    pub coords: Vec<f64>,
    pub seed: u64,
}

impl RootedSample {
    pub fn n_points(&self) -> usize {
        self.coords.len() / self.d
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.d..(i + 1) * self.d]
    }

    /// Distance from point `i` to the window boundary.
    pub fn boundary_distance(&self, i: usize) -> f64 {
        let far = self.point(i).iter().fold(0.0f64, |m, x| m.max(x.abs()));
        self.half_width - far
    }
}

fn cell_key(cell: &[i64]) -> u64 {
    cell.iter()
        .fold(cell.len() as u64, |acc, &c| derive_seed(acc, Stream::PoissonCell, c as u64))
}

/// Samples the window. Points are generated per unit cell from a stream
/// keyed by the cell's integer coordinates, so a larger window with the same
/// seed contains exactly the points of a smaller one.
pub fn sample_rooted(d: usize, half_width: f64, seed: u64) -> Result<RootedSample> {
    if !(half_width > 0.0) || d == 0 {
        return Err(Error::Invalid(format!("window needs W > 0 and d >= 1, got W={half_width}, d={d}")));
    }
    let reach = half_width.ceil() as i64;
    let poisson = Poisson::new(1.0).expect("rate 1 is valid");
    let mut coords = vec![0.0; d];
    let mut cell = vec![-reach; d];
    let mut p = vec![0.0; d];
    'cells: loop {
        let mut rng = stream_rng(seed, Stream::PoissonCell, cell_key(&cell));
        let count = poisson.sample(&mut rng) as usize;
        for _ in 0..count {
            for (x, &c) in p.iter_mut().zip(&cell) {
                *x = c as f64 + rng.random::<f64>();
            }
            if p.iter().all(|x| x.abs() <= half_width) {
                coords.extend_from_slice(&p);
            }
        }
        for c in cell.iter_mut() {
            *c += 1;
            if *c < reach {
                continue 'cells;
            }
            *c = -reach;
        }
        break;
    }
    Ok(RootedSample {
        d,
        half_width,
        coords,
        seed,
    })
}

/// A window sample with its candidate network, MST and excess table.
#[derive(Debug, Clone)]
pub struct Window {
    pub sample: RootedSample,
    pub radius: RadiusNetwork,
    pub table: ExcessTable,
    pub margin: f64,
}

impl Window {
    /// Builds the radius network (auto cutoff doubles as for the Euclidean
    /// model) and the excess table. `margin` defaults to `2 * cutoff`.
    pub fn build(sample: RootedSample, cutoff: Cutoff, margin: Option<f64>) -> Result<Self> {
        let w = sample.half_width;
        let mut radius = build_radius_network(&sample.coords, sample.d, -w, w, cutoff)?;
        let meta = ModelMeta {
            model: "window".into(),
            d: Some(sample.d),
            n: Some(sample.n_points()),
            seed: Some(sample.seed),
            cutoff: Some(radius.cutoff),
            cutoff_validated: Some(radius.validated),
            ..Default::default()
        };
        radius.net = radius.net.with_meta(meta);
        let table = excess_table(&radius.net, &radius.mst);
        let margin = margin.unwrap_or(2.0 * radius.cutoff);
        Ok(Window {
            sample,
            radius,
            table,
            margin,
        })
    }

    pub fn is_interior(&self, i: usize) -> bool {
        self.sample.boundary_distance(i) > self.margin
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mark {
    pub point: usize,
    pub coords: Vec<f64>,
    pub len: f64,
    pub perc: f64,
    pub exc: f64,
    pub interior: bool,
    /// The component of `O` or of the point just below their merge stays
    /// farther than `perc` from the window boundary, so no point outside the
    /// window can change `perc`.
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PercMarks {
    pub cutoff: f64,
    pub margin: f64,
    pub marks: Vec<Mark>,
}

/// `len(O, η)`, `perc(O, η)` and their difference for every non-origin
/// point, with percolation values from the merge history of the window's
/// candidate graph.
pub fn perc_marks(window: &Window) -> PercMarks {
    let mt = perc_all_pairs(&window.radius.net);
    marks_with(window, &mt)
}

fn marks_with(window: &Window, mt: &MergeTree) -> PercMarks {
    let s = &window.sample;
    let origin_inside = window.is_interior(0);
    let boundary: Vec<f64> = (0..s.n_points()).map(|i| s.boundary_distance(i)).collect();
    let reach = mt.subtree_min(&boundary);
    let marks = (1..s.n_points())
        .map(|i| {
            let p = s.point(i);
            let len = p.iter().map(|x| x * x).sum::<f64>().sqrt();
            let perc = mt.perc(0, i);
            let certified = window.radius.validated
                && mt
                    .merge_children(0, i)
                    .is_some_and(|[a, b]| reach[a].max(reach[b]) >= perc);
            Mark {
                point: i,
                coords: p.to_vec(),
                len,
                perc,
                exc: len - perc,
                interior: origin_inside && window.is_interior(i),
                certified,
            }
        })
        .collect();
    PercMarks {
        cutoff: window.radius.cutoff,
        margin: window.margin,
        marks,
    }
}

/// Which points serve as roots for the excess measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Roots {
    /// Only the added origin.
    Origin,
    /// Every interior point. By stationarity each sees the same Palm
    /// distribution as the origin, so this averages many roots per window.
    AllInterior,
}

/// Counts of positive excesses below each grid point, summed over roots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PalmCounts {
    pub roots: usize,
    pub counts: Vec<u64>,
}

pub fn palm_counts(window: &Window, x_grid: &[f64], roots: Roots) -> Result<PalmCounts> {
    check_grid(x_grid)?;
    let mut counts = vec![0u64; x_grid.len()];
    let mut bump = |exc: f64| {
        if exc > 0.0 {
            let from = x_grid.partition_point(|&x| x <= exc);
            for c in &mut counts[from..] {
                *c += 1;
            }
        }
    };
    let n_roots = match roots {
        Roots::Origin => {
            if !window.is_interior(0) {
                0
            } else {
                for m in perc_marks(window).marks.iter().filter(|m| m.interior) {
                    bump(m.exc);
                }
                1
            }
        }
        Roots::AllInterior => {
            let interior: Vec<bool> = (0..window.sample.n_points()).map(|i| window.is_interior(i)).collect();
            for (e, edge) in window.radius.net.edges().iter().enumerate() {
                let (u, v) = edge.endpoints();
                for _ in 0..(interior[u] as usize + interior[v] as usize) {
                    bump(window.table.exc[e]);
                }
            }
            interior.iter().filter(|&&b| b).count()
        }
    };
    Ok(PalmCounts { roots: n_roots, counts })
}

/// Replica-averaged `μ̂(0, x)` with standard errors of `μ̂(0, x) / x`.
pub fn mu_density_estimate(replicas: &[PalmCounts], x_grid: &[f64], trusted_max: Option<f64>) -> Result<MuEstimate> {
    check_grid(x_grid)?;
    if replicas.is_empty() {
        return Err(Error::Invalid("no replicas".into()));
    }
    let used: Vec<&PalmCounts> = replicas.iter().filter(|r| r.roots > 0).collect();
    if used.is_empty() {
        // no interior roots anywhere: nothing observed
        let zeros = vec![0.0; x_grid.len()];
        return Ok(MuEstimate {
            x_grid: x_grid.to_vec(),
            mu_hat: zeros.clone(),
            density_hat: zeros.clone(),
            density_stderr: Some(zeros),
            n: 0,
            trusted_max,
        });
    }
    let r = used.len() as f64;
    let per_replica: Vec<Vec<f64>> = used
        .iter()
        .map(|p| p.counts.iter().map(|&c| c as f64 / p.roots as f64).collect())
        .collect();
    let mut mu_hat = vec![0.0; x_grid.len()];
    let mut stderr = vec![0.0; x_grid.len()];
    for (i, &x) in x_grid.iter().enumerate() {
        let mean = per_replica.iter().map(|v| v[i]).sum::<f64>() / r;
        let var = if used.len() > 1 {
            per_replica.iter().map(|v| (v[i] - mean).powi(2)).sum::<f64>() / (r - 1.0)
        } else {
            0.0
        };
        mu_hat[i] = mean;
        stderr[i] = (var / r).sqrt() / x;
    }
    Ok(MuEstimate {
        density_hat: mu_hat.iter().zip(x_grid).map(|(m, x)| m / x).collect(),
        x_grid: x_grid.to_vec(),
        mu_hat,
        density_stderr: Some(stderr),
        n: used.iter().map(|p| p.roots).sum(),
        trusted_max,
    })
}

/// Disagreements between the window MST and the set of edges whose length
/// equals their merge-time percolation value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MsfDiagnostic {
    pub n_edges: usize,
    pub mst_edges: usize,
    pub criterion_edges: usize,
    /// Edge ids in the symmetric difference with both endpoints interior.
    pub interior_mismatches: Vec<usize>,
    /// The rest of the symmetric difference (reported, not asserted).
    pub boundary_mismatches: Vec<usize>,
}

pub fn msf_window_diagnostic(window: &Window) -> MsfDiagnostic {
    let net = &window.radius.net;
    let mst = &window.radius.mst;
    let mt = perc_all_pairs(net);
    let mut out = MsfDiagnostic {
        n_edges: net.n_edges(),
        mst_edges: mst.tree_edges.len(),
        criterion_edges: 0,
        interior_mismatches: Vec::new(),
        boundary_mismatches: Vec::new(),
    };
    for (e, edge) in net.edges().iter().enumerate() {
        let (u, v) = edge.endpoints();
        let criterion = mt.perc(u, v) == edge.len;
        out.criterion_edges += criterion as usize;
        if criterion != mst.contains(e) {
            if window.is_interior(u) && window.is_interior(v) {
                out.interior_mismatches.push(e);
            } else {
                out.boundary_mismatches.push(e);
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stability {
    /// Interior marks of the smaller window.
    pub compared: usize,
    pub certified: usize,
    /// `(smaller, larger)` pairs whose length or percolation value differ.
    pub mismatches: Vec<(Mark, Mark)>,
}

impl Stability {
    pub fn certified_mismatches(&self) -> usize {
        self.mismatches.iter().filter(|(s, _)| s.certified).count()
    }
}

/// Compares interior origin marks of a window against the same points in a
/// larger window with the same seed.
pub fn window_stability(d: usize, half_width: f64, larger: f64, seed: u64, cutoff: Cutoff) -> Result<Stability> {
    let small = Window::build(sample_rooted(d, half_width, seed)?, cutoff, None)?;
    let big = Window::build(sample_rooted(d, larger, seed)?, cutoff, Some(small.margin))?;
    let mut by_coords: std::collections::HashMap<Vec<u64>, &Mark> = std::collections::HashMap::new();
    let big_marks = perc_marks(&big);
    for m in &big_marks.marks {
        by_coords.insert(m.coords.iter().map(|x| x.to_bits()).collect(), m);
    }
    let mut out = Stability {
        compared: 0,
        certified: 0,
        mismatches: Vec::new(),
    };
    for m in perc_marks(&small).marks.into_iter().filter(|m| m.interior) {
        out.compared += 1;
        out.certified += m.certified as usize;
        let key: Vec<u64> = m.coords.iter().map(|x| x.to_bits()).collect();
        let b = by_coords
            .get(&key)
            .ok_or_else(|| Error::Invalid("larger window lost a point of the smaller one".into()))?;
        if b.perc != m.perc || b.len != m.len {
            out.mismatches.push((m, (*b).clone()));
        }
    }
    Ok(out)
}

/// Seed of replica `r` in a percolation sweep.
pub fn replica_seed(seed: u64, r: usize) -> u64 {
    derive_seed(seed, Stream::Replica, r as u64)
}

/// CSV with header `px,py[,pz],len,perc,exc,interior`.
pub fn write_marks_csv<W: std::io::Write>(marks: &PercMarks, d: usize, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let axes = ["px", "py", "pz"];
    let mut header: Vec<String> = (0..d).map(|i| axes.get(i).map_or(format!("p{i}"), |s| s.to_string())).collect();
    header.extend(["len", "perc", "exc", "interior"].map(String::from));
    w.write_record(&header)?;
    for m in &marks.marks {
        let mut row: Vec<String> = m.coords.iter().map(|x| x.to_string()).collect();
        row.extend([m.len.to_string(), m.perc.to_string(), m.exc.to_string(), m.interior.to_string()]);
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
