//! Static log-log plot of the bracketing curves.

use std::fmt::Write;

use super::RunReport;

const W: f64 = 640.0;
const H: f64 = 480.0;
const PAD: f64 = 60.0;
const COLORS: [(&str, &str); 4] = [("#1f77b4", "#d62728"), ("#2ca02c", "#ff7f0e"), ("#9467bd", "#8c564b"), ("#17becf", "#e377c2")];

pub fn curve_svg(report: &RunReport) -> String {
    let pts: Vec<(f64, f64)> = report
        .sizes
        .iter()
        .flat_map(|s| s.rows.iter().flat_map(|r| [(r.delta, r.lb_mean), (r.delta, r.ub_mean)]))
        .filter(|p| p.0 > 0.0 && p.1 > 0.0)
        .map(|(x, y)| (x.log10(), y.log10()))
        .collect();
    let (x0, x1) = bounds(pts.iter().map(|p| p.0));
    let (y0, y1) = bounds(pts.iter().map(|p| p.1));
    let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{PAD}" y="{PAD}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        W - 2.0 * PAD,
        H - 2.0 * PAD
    );
    for e in (x0.ceil() as i32)..=(x1.floor() as i32) {
        let x = sx(e as f64);
        let _ = writeln!(s, r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">1e{e}</text>"#, H - PAD + 18.0);
    }
    for e in (y0.ceil() as i32)..=(y1.floor() as i32) {
        let y = sy(e as f64);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{y:.1}" text-anchor="end">1e{e}</text>"#, PAD - 6.0);
    }
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">delta</text>"#, W / 2.0, H - 15.0);
    let _ = writeln!(s, r#"<text x="15" y="{:.1}" transform="rotate(-90 15 {:.1})" text-anchor="middle">epsilon</text>"#, H / 2.0, H / 2.0);

    let mut legend = 0;
    for (i, size) in report.sizes.iter().enumerate() {
        let (c_lb, c_ub) = COLORS[i % COLORS.len()];
        for (name, color, fit, get) in [
            ("lb", c_lb, &size.fit_lb, (|r: &super::DeltaRow| r.lb_mean) as fn(&super::DeltaRow) -> f64),
            ("ub", c_ub, &size.fit_ub, |r: &super::DeltaRow| r.ub_mean),
        ] {
            for r in &size.rows {
                let y = get(r);
                if y > 0.0 {
                    let _ = writeln!(s, r#"<circle cx="{:.1}" cy="{:.1}" r="3" fill="{color}"/>"#, sx(r.delta.log10()), sy(y.log10()));
                }
            }
            let mut label = format!("{name} (size {})", size.size);
            if let Some(f) = fit {
                // fitted line in natural logs, drawn in log10 coordinates
                let line = |lx: f64| (f.intercept + f.slope * lx * std::f64::consts::LN_10) / std::f64::consts::LN_10;
                let _ = writeln!(
                    s,
                    r#"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="{color}"/>"#,
                    sx(x0),
                    sy(line(x0)),
                    sx(x1),
                    sy(line(x1))
                );
                let _ = write!(label, " slope {:.3}", f.slope);
            }
            let ly = PAD + 16.0 + 16.0 * legend as f64;
            let _ = writeln!(s, r#"<text x="{:.1}" y="{ly:.1}" fill="{color}">{label}</text>"#, PAD + 10.0);
            legend += 1;
        }
    }
    s.push_str("</svg>\n");
    s
}

fn bounds(it: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = it.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (-1.0, 0.0);
    }
    let pad = ((hi - lo) * 0.05).max(0.05);
    (lo - pad, hi + pad)
}
