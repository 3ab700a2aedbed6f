use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::Result;
use crate::excess::MuEstimate;

use super::{curve_svg, RunReport};

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn write_curve_csv<W: Write>(report: &RunReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "size", "n", "delta", "k", "lb_mean", "lb_stderr", "ub_mean", "ub_stderr", "ub_lb_ratio", "exact_mean",
        "predicted", "fitted",
    ])?;
    for s in &report.sizes {
        for r in &s.rows {
            w.write_record([
                s.size.to_string(),
                s.n_vertices.to_string(),
                r.delta.to_string(),
                r.k.to_string(),
                r.lb_mean.to_string(),
                opt(r.lb_stderr),
                r.ub_mean.to_string(),
                opt(r.ub_stderr),
                r.ub_lb_ratio.to_string(),
                opt(r.exact_mean),
                opt(r.predicted),
                r.fitted.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn mu_rows<W: Write>(w: &mut csv::Writer<W>, source: &str, mu: &MuEstimate) -> Result<()> {
    for i in 0..mu.x_grid.len() {
        w.write_record([
            source.to_string(),
            mu.x_grid[i].to_string(),
            mu.mu_hat[i].to_string(),
            mu.density_hat[i].to_string(),
            opt(mu.density_stderr.as_ref().map(|s| s[i])),
            mu.trusted(i).to_string(),
        ])?;
    }
    Ok(())
}

/// Replica-averaged excess measures; `source` is the size or `window`.
pub fn write_mu_csv<W: Write>(report: &RunReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["source", "x", "mu_hat", "density_hat", "density_stderr", "trusted"])?;
    for s in &report.sizes {
        if let Some(mu) = &s.mu {
            mu_rows(&mut w, &s.size.to_string(), mu)?;
        }
    }
    if let Some(p) = &report.percolation {
        mu_rows(&mut w, "window", &p.mu)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_configs_csv<W: Write>(report: &RunReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "size", "delta", "replica", "seed", "blocks", "matches", "cost_sum", "predicted_q", "predicted_r",
    ])?;
    for s in &report.sizes {
        for c in &s.config_replicas {
            let row = s.configs.iter().find(|r| r.delta == c.delta);
            w.write_record([
                s.size.to_string(),
                c.delta.to_string(),
                c.replica.to_string(),
                c.seed.to_string(),
                c.blocks.to_string(),
                c.matches.to_string(),
                c.cost_sum.to_string(),
                opt(row.and_then(|r| r.predicted_q)),
                opt(row.and_then(|r| r.predicted_r)),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Writes `report.json`, `curve.csv`, `mu.csv`, `configs.csv` and, when the
/// config asks for it and there are curve rows, `curve.svg`.
pub fn write_outputs(report: &RunReport, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut json = serde_json::to_string_pretty(report)?;
    json.push('\n');
    fs::write(dir.join("report.json"), json)?;
    write_curve_csv(report, fs::File::create(dir.join("curve.csv"))?)?;
    write_mu_csv(report, fs::File::create(dir.join("mu.csv"))?)?;
    write_configs_csv(report, fs::File::create(dir.join("configs.csv"))?)?;
    if report.config.plot && report.sizes.iter().any(|s| !s.rows.is_empty()) {
        fs::write(dir.join("curve.svg"), curve_svg(report))?;
    }
    Ok(())
}
