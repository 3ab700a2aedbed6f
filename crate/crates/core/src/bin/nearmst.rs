use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use nearmst::excess::{empirical_mu, excess_table, write_excess_csv, write_mu_csv};
use nearmst::experiments::{run_scaling_experiment, write_outputs, ExperimentConfig};
use nearmst::generators::{gen_euclidean, gen_lattice, Cutoff, Dist, EuclideanSpec, LatticeSpec};
use nearmst::graph::io::{load_network, save_network};
use nearmst::graph::kruskal_mst;
use nearmst::near_mst::{epsilon_curve, oracle_instance, sandwich_check, write_curve_csv};
use nearmst::percolation::{
    mu_density_estimate, palm_counts, perc_marks, replica_seed, sample_rooted, write_marks_csv, Roots, Window,
};

#[derive(Parser)]
#[command(name = "nearmst", version, about = "Near-minimal spanning trees on random networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Lattice,
    Euclidean,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance as `u,v,len` CSV plus a JSON sidecar.
    Gen {
        #[arg(long, value_enum)]
        model: Model,
        #[arg(long, default_value_t = 2)]
        d: usize,
        /// Lattice side length.
        #[arg(long, required_if_eq("model", "lattice"))]
        m: Option<usize>,
        /// Euclidean point count.
        #[arg(long, required_if_eq("model", "euclidean"))]
        n: Option<usize>,
        #[arg(long, default_value = "uniform01")]
        dist: Dist,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "auto")]
        cutoff: Cutoff,
        #[arg(long)]
        out: PathBuf,
    },
    /// Per-edge percolation values and excesses.
    Excess {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Empirical excess measure on a grid of thresholds.
    Mu {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "0.01,0.02,0.05,0.1,0.2")]
        xgrid: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Lower and upper bounds (exact on tiny instances) per delta.
    Curve {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_delimiter = ',')]
        deltas: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Brute-force sandwich test on generated small instances.
    Oracle {
        #[arg(long, default_value_t = 200)]
        instances: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Origin-rooted marks and excess density on Poisson windows.
    Percolation {
        #[arg(long, default_value_t = 2)]
        d: usize,
        /// Half side of the window.
        #[arg(long)]
        window: f64,
        #[arg(long, default_value_t = 1)]
        replicas: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_delimiter = ',', default_value = "0.02,0.05,0.1,0.2")]
        xgrid: Vec<f64>,
        #[arg(long, default_value = "auto")]
        cutoff: Cutoff,
        /// Use only the origin as root instead of every interior point.
        #[arg(long)]
        origin_only: bool,
        /// Marks CSV (of replica 0).
        #[arg(long)]
        out: PathBuf,
        /// Defaults to the marks path with a `_mu` suffix.
        #[arg(long)]
        mu_out: Option<PathBuf>,
    },
    /// Run a JSON-configured sweep.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

fn mu_path(marks: &Path) -> PathBuf {
    let stem = marks.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    marks.with_file_name(format!("{stem}_mu.csv"))
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Gen { model, d, m, n, dist, seed, cutoff, out } => {
            let net = match model {
                Model::Lattice => gen_lattice(&LatticeSpec { d, m: m.context("--m is required")?, dist, seed })?,
                Model::Euclidean => gen_euclidean(&EuclideanSpec { d, n: n.context("--n is required")?, seed, cutoff })?,
            };
            save_network(&net, &out)?;
        }
        Command::Excess { input, out } => {
            let net = load_network(&input)?;
            let mst = kruskal_mst(&net)?;
            write_excess_csv(&net, &excess_table(&net, &mst), create(&out)?)?;
        }
        Command::Mu { input, xgrid, out } => {
            let net = load_network(&input)?;
            let mst = kruskal_mst(&net)?;
            write_mu_csv(&empirical_mu(&excess_table(&net, &mst), &xgrid)?, create(&out)?)?;
        }
        Command::Curve { input, deltas, out } => {
            if deltas.is_empty() {
                bail!("--deltas is required");
            }
            let net = load_network(&input)?;
            let mst = kruskal_mst(&net)?;
            let tbl = excess_table(&net, &mst);
            write_curve_csv(&epsilon_curve(&net, &mst, &tbl, &deltas)?, create(&out)?)?;
        }
        Command::Oracle { instances, seed } => {
            let mut failed = 0;
            for i in 0..instances {
                let net = oracle_instance(seed, i);
                let report = sandwich_check(&net)?;
                let status = if report.pass() { "pass" } else { "FAIL" };
                println!(
                    "instance {i}: {status} (n={}, m={}, trees={}, k checked={})",
                    report.n_vertices, report.n_edges, report.trees, report.ks
                );
                for v in &report.violations {
                    println!("  {v}");
                }
                failed += !report.pass() as usize;
            }
            println!("{} of {instances} instances passed", instances - failed);
            if failed > 0 {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Percolation { d, window, replicas, seed, xgrid, cutoff, origin_only, out, mu_out } => {
            if replicas == 0 {
                bail!("--replicas must be at least 1");
            }
            let roots = if origin_only { Roots::Origin } else { Roots::AllInterior };
            let windows: Vec<nearmst::Result<Window>> = (0..replicas)
                .into_par_iter()
                .map(|r| Window::build(sample_rooted(d, window, replica_seed(seed, r))?, cutoff, None))
                .collect();
            let windows = windows.into_iter().collect::<nearmst::Result<Vec<_>>>()?;
            write_marks_csv(&perc_marks(&windows[0]), d, create(&out)?)?;
            let counts = windows
                .iter()
                .map(|w| palm_counts(w, &xgrid, roots))
                .collect::<nearmst::Result<Vec<_>>>()?;
            let trusted = windows.iter().map(|w| w.radius.cutoff / 2.0).reduce(f64::min);
            let mu = mu_density_estimate(&counts, &xgrid, trusted)?;
            write_mu_csv(&mu, create(&mu_out.unwrap_or_else(|| mu_path(&out)))?)?;
        }
        Command::Experiment { config, workers, out } => {
            let text = std::fs::read_to_string(&config).with_context(|| format!("reading {}", config.display()))?;
            let cfg = ExperimentConfig::from_json(&text)?;
            let dir = out
                .or_else(|| cfg.output_dir.clone())
                .context("no output directory: pass --out or set output_dir")?;
            let report = run_scaling_experiment(&cfg, workers)?;
            write_outputs(&report, &dir)?;
            for s in &report.sizes {
                for (name, fit) in [("lb", &s.fit_lb), ("ub", &s.fit_ub)] {
                    if let Some(f) = fit {
                        println!("size {}: {name} slope {:.4}", s.size, f.slope);
                    }
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
