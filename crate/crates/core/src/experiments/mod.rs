//! Declarative sweeps: replicated curves, excess-measure estimates, block
//! counts against their predicted rates, and window percolation checks.
//!
//! A run is a pure function of its [`ExperimentConfig`]. Replicas draw from
//! seeds derived from the master seed and their index, run on a rayon pool
//! of configurable size and are aggregated in index order, so the worker
//! count never changes an emitted number.

mod configs;
mod output;
mod plot;
mod quadrature;

use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

pub use configs::{config_count, ConfigCount};
pub use output::{write_configs_csv, write_curve_csv, write_mu_csv, write_outputs};
pub use plot::curve_svg;
pub use quadrature::{
    config_rate_quadrature, config_rate_slope_limit, ConfigRates, REL_TOL, SLOPE_DELTA, TAIL_SURVIVAL,
};

use crate::error::{Error, Result};
use crate::excess::{empirical_mu, excess_table, MuEstimate};
use crate::generators::{gen_euclidean_with_mst, gen_lattice, Cutoff, Dist, EuclideanSpec, LatticeIndex, LatticeSpec};
use crate::graph::{kruskal_mst, Network};
use crate::near_mst::{epsilon_curve, swaps_for_delta, EpsilonCurve};
use crate::percolation::{msf_window_diagnostic, mu_density_estimate, palm_counts, sample_rooted, Roots, Window};
use crate::rng::{derive_seed, Stream};

/// Instance family; the concrete size comes from the size list.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelTemplate {
    /// Side length `m` per size entry.
    Lattice { d: usize, dist: Dist },
    /// Point count `n` per size entry.
    Euclidean {
        d: usize,
        #[serde(default = "auto_cutoff")]
        cutoff: Cutoff,
    },
}

fn auto_cutoff() -> Cutoff {
    Cutoff::Auto
}

impl ModelTemplate {
    pub fn d(&self) -> usize {
        match *self {
            ModelTemplate::Lattice { d, .. } | ModelTemplate::Euclidean { d, .. } => d,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Analysis {
    Curve,
    Mu,
    Configs,
    Percolation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PercolationSettings {
    /// Half side of the window.
    pub window: f64,
    /// Defaults to the config's replica count.
    #[serde(default)]
    pub replicas: Option<usize>,
    /// Defaults to twice the cutoff.
    #[serde(default)]
    pub margin: Option<f64>,
    #[serde(default = "all_interior")]
    pub roots: Roots,
}

fn all_interior() -> Roots {
    Roots::AllInterior
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub model: ModelTemplate,
    pub sizes: Vec<usize>,
    #[serde(default)]
    pub deltas: Vec<f64>,
    pub replicas: usize,
    pub seed: u64,
    pub analyses: Vec<Analysis>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default = "default_mu_grid")]
    pub mu_grid: Vec<f64>,
    /// Gaps for block counting; the delta grid when empty.
    #[serde(default)]
    pub config_deltas: Vec<f64>,
    #[serde(default)]
    pub percolation: Option<PercolationSettings>,
    /// Rows with fewer swaps are left out of the slope fits.
    #[serde(default = "default_min_fit_k")]
    pub min_fit_k: usize,
    #[serde(default)]
    pub plot: bool,
}

pub fn default_mu_grid() -> Vec<f64> {
    vec![0.01, 0.02, 0.05, 0.1, 0.2]
}

fn default_min_fit_k() -> usize {
    20
}

fn increasing_positive(xs: &[f64]) -> bool {
    xs.iter().all(|&x| x > 0.0) && xs.windows(2).all(|w| w[1] > w[0])
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn has(&self, a: Analysis) -> bool {
        self.analyses.contains(&a)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Invalid(msg));
        if self.replicas == 0 {
            return bad("replica count must be at least 1".into());
        }
        if self.analyses.is_empty() {
            return bad("no analyses requested".into());
        }
        let needs_sizes = self.analyses.iter().any(|&a| a != Analysis::Percolation);
        if needs_sizes && self.sizes.is_empty() {
            return bad("size list is empty".into());
        }
        if !self.deltas.iter().all(|&d| d > 0.0 && d < 1.0) || !increasing_positive(&self.deltas) {
            return bad("deltas must be increasing and inside (0, 1)".into());
        }
        if self.has(Analysis::Curve) && self.deltas.is_empty() {
            return bad("curve analysis needs a delta grid".into());
        }
        if !increasing_positive(&self.mu_grid) || self.mu_grid.is_empty() {
            return bad("mu grid must be nonempty, positive and increasing".into());
        }
        if self.has(Analysis::Configs) {
            if self.model.d() != 2 {
                return bad("block counting needs d = 2".into());
            }
            if self.config_delta_grid().is_empty() || !self.config_delta_grid().iter().all(|&d| d > 0.0) {
                return bad("block counting needs positive gaps".into());
            }
        }
        if self.has(Analysis::Percolation) {
            match &self.percolation {
                Some(p) if p.window > 0.0 && p.replicas != Some(0) => {}
                _ => return bad("percolation analysis needs a positive window and replica count".into()),
            }
        }
        Ok(())
    }

    pub fn config_delta_grid(&self) -> &[f64] {
        if self.config_deltas.is_empty() {
            &self.deltas
        } else {
            &self.config_deltas
        }
    }

    /// Seed of replica `r` at size index `s`.
    pub fn replica_seed(&self, s: usize, r: usize) -> u64 {
        derive_seed(self.seed, Stream::Replica, ((s as u64) << 32) | r as u64)
    }

    /// Seed of percolation replica `r`.
    pub fn window_seed(&self, r: usize) -> u64 {
        derive_seed(self.seed, Stream::PoissonCell, r as u64)
    }
}

/// Mean and standard error (`None` for a single value).
pub fn mean_stderr(xs: &[f64]) -> (f64, Option<f64>) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, None);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, Some((var / n).sqrt()))
}

/// Least-squares line through `(ln x, ln y)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub points: usize,
    /// Standard error and 95% interval; absent with fewer than three points.
    pub stderr: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
}

pub fn fit_loglog(xs: &[f64], ys: &[f64]) -> Option<SlopeFit> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    let p = pts.len();
    if p < 2 {
        return None;
    }
    let mx = pts.iter().map(|q| q.0).sum::<f64>() / p as f64;
    let my = pts.iter().map(|q| q.1).sum::<f64>() / p as f64;
    let sxx: f64 = pts.iter().map(|q| (q.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|q| (q.0 - mx) * (q.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let (mut stderr, mut ci_low, mut ci_high) = (None, None, None);
    if p > 2 {
        let sse: f64 = pts.iter().map(|q| (q.1 - intercept - slope * q.0).powi(2)).sum();
        let se = (sse / (p - 2) as f64 / sxx).sqrt();
        let t = StudentsT::new(0.0, 1.0, (p - 2) as f64)
            .expect("positive degrees of freedom")
            .inverse_cdf(0.975);
        stderr = Some(se);
        ci_low = Some(slope - t * se);
        ci_high = Some(slope + t * se);
    }
    Some(SlopeFit {
        slope,
        intercept,
        points: p,
        stderr,
        ci_low,
        ci_high,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaRow {
    pub delta: f64,
    pub k: usize,
    pub lb_mean: f64,
    pub lb_stderr: Option<f64>,
    pub ub_mean: f64,
    pub ub_stderr: Option<f64>,
    pub ub_lb_ratio: f64,
    /// All replicas' lower bounds within the trusted excess range.
    pub lb_trusted: bool,
    pub exact_mean: Option<f64>,
    /// `δ² / (2 f̂)` with `f̂` the estimated excess density near zero.
    pub predicted: Option<f64>,
    /// Row entered the slope fits.
    pub fitted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigRow {
    pub delta: f64,
    pub blocks: usize,
    pub freq_mean: f64,
    pub freq_stderr: Option<f64>,
    pub cost_mean: f64,
    pub cost_stderr: Option<f64>,
    /// Predicted per-block rates (lattice only).
    pub predicted_q: Option<f64>,
    pub predicted_r: Option<f64>,
    pub per_vertex_q: Option<f64>,
    pub per_vertex_r: Option<f64>,
    pub total_matches: usize,
}

impl ConfigRow {
    /// Frequency within `z` standard errors of the prediction.
    pub fn freq_within(&self, z: f64) -> Option<bool> {
        Some((self.freq_mean - self.predicted_q?).abs() <= z * self.freq_stderr?)
    }

    pub fn cost_within(&self, z: f64) -> Option<bool> {
        Some((self.cost_mean - self.predicted_r?).abs() <= z * self.cost_stderr?)
    }
}

/// One replica's block counts at one gap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicaConfig {
    pub replica: usize,
    pub seed: u64,
    pub delta: f64,
    pub blocks: usize,
    pub matches: usize,
    pub cost_sum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicaFailure {
    pub replica: usize,
    pub seed: u64,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LbCheckRow {
    pub delta: f64,
    pub ub_mean: f64,
    pub bound: f64,
    /// `ub_mean / bound`.
    pub margin: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LbCheck {
    pub pass: bool,
    pub rows: Vec<LbCheckRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeReport {
    pub size: usize,
    pub n_vertices: usize,
    pub seeds: Vec<u64>,
    pub replicas_ok: usize,
    pub failures: Vec<ReplicaFailure>,
    pub rows: Vec<DeltaRow>,
    pub fit_lb: Option<SlopeFit>,
    pub fit_ub: Option<SlopeFit>,
    pub mu: Option<MuEstimate>,
    /// Estimated excess density at the smallest grid point.
    pub f_mu0: Option<f64>,
    pub f_mu0_stderr: Option<f64>,
    pub lb_check: Option<LbCheck>,
    pub configs: Vec<ConfigRow>,
    pub config_replicas: Vec<ReplicaConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowReplica {
    pub replica: usize,
    pub seed: u64,
    pub points: usize,
    pub roots: usize,
    pub cutoff: f64,
    pub margin: f64,
    pub interior_mismatches: usize,
    pub boundary_mismatches: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PercolationReport {
    pub d: usize,
    pub window: f64,
    pub roots: Roots,
    pub mu: MuEstimate,
    /// `max / min` of the density estimate over the grid.
    pub density_ratio: f64,
    pub interior_mismatches: usize,
    pub boundary_mismatches: usize,
    pub replicas: Vec<WindowReplica>,
    pub failures: Vec<ReplicaFailure>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub package: String,
    pub version: String,
    pub master_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: ExperimentConfig,
    pub manifest: Manifest,
    pub sizes: Vec<SizeReport>,
    pub percolation: Option<PercolationReport>,
}

#[derive(Debug, Clone)]
struct ReplicaOutcome {
    curve: Option<EpsilonCurve>,
    mu: Option<MuEstimate>,
    configs: Vec<ConfigCount>,
}

fn build_instance(cfg: &ExperimentConfig, size: usize, seed: u64) -> Result<(Network, Option<crate::graph::MstResult>)> {
    match cfg.model {
        ModelTemplate::Lattice { d, dist } => Ok((gen_lattice(&LatticeSpec { d, m: size, dist, seed })?, None)),
        ModelTemplate::Euclidean { d, cutoff } => {
            let rn = gen_euclidean_with_mst(&EuclideanSpec { d, n: size, seed, cutoff })?;
            Ok((rn.net, Some(rn.mst)))
        }
    }
}

fn run_replica(cfg: &ExperimentConfig, size: usize, seed: u64) -> Result<ReplicaOutcome> {
    let (net, mst) = build_instance(cfg, size, seed)?;
    let mut out = ReplicaOutcome {
        curve: None,
        mu: None,
        configs: Vec::new(),
    };
    if cfg.has(Analysis::Configs) {
        for &delta in cfg.config_delta_grid() {
            let mut c = config_count(&net, delta)?;
            c.swaps.clear();
            out.configs.push(c);
        }
    }
    if cfg.has(Analysis::Curve) || cfg.has(Analysis::Mu) {
        let mst = match mst {
            Some(m) => m,
            None => kruskal_mst(&net)?,
        };
        let tbl = excess_table(&net, &mst);
        if cfg.has(Analysis::Curve) {
            out.curve = Some(epsilon_curve(&net, &mst, &tbl, &cfg.deltas)?);
        }
        if cfg.has(Analysis::Mu) {
            out.mu = Some(empirical_mu(&tbl, &cfg.mu_grid)?);
        }
    }
    Ok(out)
}

fn check_failures(failed: usize, total: usize) -> Result<()> {
    // more than 10% failed
    if failed * 10 > total {
        return Err(Error::Aborted { failed, total });
    }
    Ok(())
}

fn n_vertices_for(model: &ModelTemplate, size: usize) -> Result<usize> {
    match *model {
        ModelTemplate::Lattice { d, .. } => Ok(LatticeIndex::new(d, size)?.n_vertices()),
        ModelTemplate::Euclidean { .. } => Ok(size),
    }
}

fn aggregate_size(
    cfg: &ExperimentConfig,
    size: usize,
    seeds: Vec<u64>,
    results: Vec<Result<ReplicaOutcome>>,
) -> Result<SizeReport> {
    let n = n_vertices_for(&cfg.model, size)?;
    let mut failures = Vec::new();
    let mut ok: Vec<(usize, ReplicaOutcome)> = Vec::new();
    for (r, res) in results.into_iter().enumerate() {
        match res {
            Ok(o) => ok.push((r, o)),
            Err(e) => failures.push(ReplicaFailure {
                replica: r,
                seed: seeds[r],
                error: e.to_string(),
            }),
        }
    }
    check_failures(failures.len(), seeds.len())?;

    let mut report = SizeReport {
        size,
        n_vertices: n,
        seeds: seeds.clone(),
        replicas_ok: ok.len(),
        failures,
        rows: Vec::new(),
        fit_lb: None,
        fit_ub: None,
        mu: None,
        f_mu0: None,
        f_mu0_stderr: None,
        lb_check: None,
        configs: Vec::new(),
        config_replicas: Vec::new(),
    };

    if cfg.has(Analysis::Mu) {
        let per: Vec<&MuEstimate> = ok.iter().filter_map(|(_, o)| o.mu.as_ref()).collect();
        let mut mu_hat = Vec::new();
        let mut density_hat = Vec::new();
        let mut stderr = Vec::new();
        for i in 0..cfg.mu_grid.len() {
            let (m, _) = mean_stderr(&per.iter().map(|e| e.mu_hat[i]).collect::<Vec<_>>());
            let (dens, se) = mean_stderr(&per.iter().map(|e| e.density_hat[i]).collect::<Vec<_>>());
            mu_hat.push(m);
            density_hat.push(dens);
            stderr.push(se.unwrap_or(0.0));
        }
        report.f_mu0 = density_hat.first().copied();
        report.f_mu0_stderr = stderr.first().copied().filter(|_| per.len() > 1);
        report.mu = Some(MuEstimate {
            x_grid: cfg.mu_grid.clone(),
            mu_hat,
            density_hat,
            density_stderr: (per.len() > 1).then_some(stderr),
            n,
            trusted_max: per.first().and_then(|e| e.trusted_max),
        });
    }

    if cfg.has(Analysis::Curve) {
        let curves: Vec<&EpsilonCurve> = ok.iter().filter_map(|(_, o)| o.curve.as_ref()).collect();
        for (i, &delta) in cfg.deltas.iter().enumerate() {
            let lbs: Vec<f64> = curves.iter().map(|c| c.rows[i].lb).collect();
            let ubs: Vec<f64> = curves.iter().map(|c| c.rows[i].ub).collect();
            let exact: Option<Vec<f64>> = curves.iter().map(|c| c.rows[i].exact).collect();
            let (lb_mean, lb_stderr) = mean_stderr(&lbs);
            let (ub_mean, ub_stderr) = mean_stderr(&ubs);
            let k = swaps_for_delta(delta, n);
            let lb_trusted = curves.iter().all(|c| c.rows[i].lb_trusted);
            report.rows.push(DeltaRow {
                delta,
                k,
                lb_mean,
                lb_stderr,
                ub_mean,
                ub_stderr,
                ub_lb_ratio: ub_mean / lb_mean,
                lb_trusted,
                exact_mean: exact.map(|e| mean_stderr(&e).0),
                predicted: report.f_mu0.map(|f| delta * delta / (2.0 * f)),
                fitted: k >= cfg.min_fit_k && lb_trusted,
            });
        }
        let fitted: Vec<&DeltaRow> = report.rows.iter().filter(|r| r.fitted).collect();
        let xs: Vec<f64> = fitted.iter().map(|r| r.delta).collect();
        report.fit_lb = fit_loglog(&xs, &fitted.iter().map(|r| r.lb_mean).collect::<Vec<_>>());
        report.fit_ub = fit_loglog(&xs, &fitted.iter().map(|r| r.ub_mean).collect::<Vec<_>>());
        if let ModelTemplate::Lattice { d, dist } = cfg.model {
            let edges = LatticeIndex::new(d, size)?.n_edges();
            report.lb_check = Some(model1_lb_check(&report.rows, edges as f64 / n as f64, dist.density_bound()));
        }
    }

    if cfg.has(Analysis::Configs) {
        for (j, &delta) in cfg.config_delta_grid().iter().enumerate() {
            let counts: Vec<(usize, &ConfigCount)> = ok.iter().map(|(r, o)| (*r, &o.configs[j])).collect();
            let freqs: Vec<f64> = counts.iter().map(|(_, c)| c.frequency()).collect();
            let costs: Vec<f64> = counts.iter().map(|(_, c)| c.mean_cost()).collect();
            let (freq_mean, freq_stderr) = mean_stderr(&freqs);
            let (cost_mean, cost_stderr) = mean_stderr(&costs);
            let rates = match cfg.model {
                ModelTemplate::Lattice { dist, .. } => Some(config_rate_quadrature(dist, delta)?),
                ModelTemplate::Euclidean { .. } => None,
            };
            report.configs.push(ConfigRow {
                delta,
                blocks: counts.first().map_or(0, |(_, c)| c.blocks),
                freq_mean,
                freq_stderr,
                cost_mean,
                cost_stderr,
                predicted_q: rates.map(|r| r.q),
                predicted_r: rates.map(|r| r.r),
                per_vertex_q: rates.map(|r| r.q / 9.0),
                per_vertex_r: rates.map(|r| r.r / 9.0),
                total_matches: counts.iter().map(|(_, c)| c.matches).sum(),
            });
            for (r, c) in counts {
                report.config_replicas.push(ReplicaConfig {
                    replica: r,
                    seed: seeds[r],
                    delta,
                    blocks: c.blocks,
                    matches: c.matches,
                    cost_sum: c.cost_sum,
                });
            }
        }
    }
    Ok(report)
}

/// Checks `mean ub >= (edges / n) δ² / (8 f̄)` on every row, where `f̄`
/// bounds the length density.
pub fn model1_lb_check(rows: &[DeltaRow], edges_per_vertex: f64, density_bound: f64) -> LbCheck {
    let rows: Vec<LbCheckRow> = rows
        .iter()
        .map(|r| {
            let bound = edges_per_vertex * r.delta * r.delta / (8.0 * density_bound);
            LbCheckRow {
                delta: r.delta,
                ub_mean: r.ub_mean,
                bound,
                margin: r.ub_mean / bound,
                pass: r.ub_mean >= bound,
            }
        })
        .collect();
    LbCheck {
        pass: rows.iter().all(|r| r.pass),
        rows,
    }
}

fn run_percolation(cfg: &ExperimentConfig, settings: &PercolationSettings) -> Result<PercolationReport> {
    let d = cfg.model.d();
    let cutoff = match cfg.model {
        ModelTemplate::Euclidean { cutoff, .. } => cutoff,
        ModelTemplate::Lattice { .. } => Cutoff::Auto,
    };
    let replicas = settings.replicas.unwrap_or(cfg.replicas);
    let results: Vec<Result<_>> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let seed = cfg.window_seed(r);
            let window = Window::build(sample_rooted(d, settings.window, seed)?, cutoff, settings.margin)?;
            let counts = palm_counts(&window, &cfg.mu_grid, settings.roots)?;
            let diag = msf_window_diagnostic(&window);
            let info = WindowReplica {
                replica: r,
                seed,
                points: window.sample.n_points(),
                roots: counts.roots,
                cutoff: window.radius.cutoff,
                margin: window.margin,
                interior_mismatches: diag.interior_mismatches.len(),
                boundary_mismatches: diag.boundary_mismatches.len(),
            };
            Ok((counts, info))
        })
        .collect();
    let mut failures = Vec::new();
    let mut counts = Vec::new();
    let mut infos = Vec::new();
    for (r, res) in results.into_iter().enumerate() {
        match res {
            Ok((c, i)) => {
                counts.push(c);
                infos.push(i);
            }
            Err(e) => failures.push(ReplicaFailure {
                replica: r,
                seed: cfg.window_seed(r),
                error: e.to_string(),
            }),
        }
    }
    check_failures(failures.len(), replicas)?;
    let trusted = infos.iter().map(|i| i.cutoff / 2.0).reduce(f64::min);
    let mu = mu_density_estimate(&counts, &cfg.mu_grid, trusted)?;
    let max = mu.density_hat.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = mu.density_hat.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(PercolationReport {
        d,
        window: settings.window,
        roots: settings.roots,
        density_ratio: max / min,
        interior_mismatches: infos.iter().map(|i| i.interior_mismatches).sum(),
        boundary_mismatches: infos.iter().map(|i| i.boundary_mismatches).sum(),
        mu,
        replicas: infos,
        failures,
    })
}

/// Runs every requested analysis on a pool of `workers` threads (rayon's
/// default when `None`).
pub fn run_scaling_experiment(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<RunReport> {
    cfg.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        builder = builder.num_threads(w.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Invalid(format!("thread pool: {e}")))?;
    pool.install(|| {
        let mut sizes = Vec::new();
        if cfg.analyses.iter().any(|&a| a != Analysis::Percolation) {
            for (s, &size) in cfg.sizes.iter().enumerate() {
                let seeds: Vec<u64> = (0..cfg.replicas).map(|r| cfg.replica_seed(s, r)).collect();
                let results: Vec<Result<ReplicaOutcome>> =
                    seeds.par_iter().map(|&seed| run_replica(cfg, size, seed)).collect();
                sizes.push(aggregate_size(cfg, size, seeds, results)?);
            }
        }
        let percolation = match (&cfg.percolation, cfg.has(Analysis::Percolation)) {
            (Some(p), true) => Some(run_percolation(cfg, p)?),
            _ => None,
        };
        Ok(RunReport {
            config: cfg.clone(),
            manifest: Manifest {
                package: env!("CARGO_PKG_NAME").into(),
                version: env!("CARGO_PKG_VERSION").into(),
                master_seed: cfg.seed,
            },
            sizes,
            percolation,
        })
    })
}
