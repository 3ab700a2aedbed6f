//! Predicted per-block rates for the 3×3 exchange configuration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::Dist;

/// Relative accuracy demanded of every integral.
pub const REL_TOL: f64 = 1e-8;
/// Exponential tails are cut where the survival function drops below this.
pub const TAIL_SURVIVAL: f64 = 1e-12;
/// `δ` at which the small-`δ` slope `q(δ)/δ` is read off.
pub const SLOPE_DELTA: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfigRates {
    pub delta: f64,
    /// Probability that a block shows the pattern.
    pub q: f64,
    /// Expected exchange cost per block.
    pub r: f64,
    /// `q(δ)/δ` at `δ = SLOPE_DELTA`.
    pub c: f64,
}

fn integrate_pieces<F: Fn(f64) -> f64>(f: F, breaks: &[f64]) -> Result<f64> {
    let mut total = 0.0;
    let mut err = 0.0;
    for w in breaks.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        // no absolute target: refine to the last level and read the estimate
        let out = quadrature::integrate(&f, w[0], w[1], 0.0);
        total += out.integral;
        err += out.error_estimate;
    }
    if err > REL_TOL * total.abs() && err > f64::MIN_POSITIVE {
        return Err(Error::Invalid(format!(
            "quadrature error {err:.3e} exceeds relative tolerance at value {total:.3e}"
        )));
    }
    Ok(total)
}

/// Integration breakpoints: kinks of the integrand plus a geometric split of
/// long ranges.
fn breakpoints(dist: Dist, delta: f64) -> Vec<f64> {
    let hi = match dist {
        // (1 - F(x + δ)) vanishes from 1 - δ on
        Dist::Uniform01 => (1.0 - delta).max(0.0),
        Dist::Exp1 => -TAIL_SURVIVAL.ln(),
    };
    let mut pts = vec![0.0];
    let mut x = delta.min(hi / 8.0);
    while x < hi {
        if x > 0.0 {
            pts.push(x);
        }
        x *= 2.0;
    }
    pts.push(hi);
    pts.dedup();
    pts
}

fn rates_at(dist: Dist, delta: f64) -> Result<(f64, f64)> {
    let weight = |x: f64| dist.density(x) * dist.cdf(x).powi(2) * dist.survival(x + delta).powi(8);
    let breaks = breakpoints(dist, delta);
    if breaks.len() < 2 {
        return Ok((0.0, 0.0));
    }
    let q = integrate_pieces(|x| weight(x) * (dist.cdf(x + delta) - dist.cdf(x)), &breaks)?;
    let r = integrate_pieces(|x| weight(x) * dist.partial_first_moment(x, delta), &breaks)?;
    Ok((q, r))
}

/// Pattern probability `q(δ)`, expected exchange cost `r(δ)` and the
/// small-`δ` slope for one length distribution.
pub fn config_rate_quadrature(dist: Dist, delta: f64) -> Result<ConfigRates> {
    if !(delta > 0.0) {
        return Err(Error::Invalid(format!("delta must be positive, got {delta}")));
    }
    let (q, r) = rates_at(dist, delta)?;
    let (q_small, _) = rates_at(dist, SLOPE_DELTA)?;
    Ok(ConfigRates {
        delta,
        q,
        r,
        c: q_small / SLOPE_DELTA,
    })
}

/// Richardson extrapolation of `q(δ)/δ` to `δ = 0` from `SLOPE_DELTA` and
/// its half.
pub fn config_rate_slope_limit(dist: Dist) -> Result<f64> {
    let (q1, _) = rates_at(dist, SLOPE_DELTA)?;
    let (q2, _) = rates_at(dist, SLOPE_DELTA / 2.0)?;
    let (s1, s2) = (q1 / SLOPE_DELTA, q2 / (SLOPE_DELTA / 2.0));
    Ok(2.0 * s2 - s1)
}
