//! Minimal static SVG renderings: distribution lines or a 2D heat map, and
//! the width against the step.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::run::{CaseResult, TOOL, VERSION};

const W: f64 = 720.0;
const H: f64 = 420.0;
const PAD: f64 = 48.0;
const MAX_CURVES: usize = 6;
const COLORS: [&str; MAX_CURVES] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn header(title: &str, hash: &str) -> String {
    let mut s = String::new();
    let _ = write!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n\
         <!-- {TOOL} {VERSION} config_sha256={hash} -->\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <text x=\"{PAD}\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">{title}</text>\n"
    );
    s
}

fn axes(s: &mut String, x: (f64, f64), y: (f64, f64), xlabel: &str, ylabel: &str) {
    let (x0, y0, x1, y1) = (PAD, H - PAD, W - PAD / 2.0, PAD);
    let _ = writeln!(s, "<path d=\"M{x0} {y1} L{x0} {y0} L{x1} {y0}\" stroke=\"black\" fill=\"none\"/>");
    let _ = writeln!(
        s,
        "<g font-family=\"sans-serif\" font-size=\"11\">\
         <text x=\"{x0}\" y=\"{}\">{:.4}</text>\
         <text x=\"{x1}\" y=\"{}\" text-anchor=\"end\">{:.4}</text>\
         <text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{xlabel}</text>\
         <text x=\"4\" y=\"{y0}\">{:.3e}</text>\
         <text x=\"4\" y=\"{}\">{:.3e}</text>\
         <text x=\"4\" y=\"{}\">{ylabel}</text></g>",
        y0 + 14.0,
        x.0,
        y0 + 14.0,
        x.1,
        (x0 + x1) / 2.0,
        y0 + 30.0,
        y.0,
        y1 + 4.0,
        y.1,
        (y0 + y1) / 2.0,
    );
}

fn scale(v: f64, range: (f64, f64), out: (f64, f64)) -> f64 {
    let span = range.1 - range.0;
    let t = if span > 0.0 { (v - range.0) / span } else { 0.5 };
    out.0 + t * (out.1 - out.0)
}

/// Indices of at most `MAX_CURVES` snapshots, first and last included.
fn pick(n: usize) -> Vec<usize> {
    if n <= MAX_CURVES {
        return (0..n).collect();
    }
    (0..MAX_CURVES).map(|k| k * (n - 1) / (MAX_CURVES - 1)).collect()
}

fn line_plot(case: &CaseResult, hash: &str) -> String {
    let rep = &case.rep;
    let xs: Vec<f64> = (0..rep.site_count()).map(|s| rep.coordinate(0, s)).collect();
    let chosen = pick(case.distributions.len());
    let pmax = chosen.iter().flat_map(|&i| case.distributions[i].1.iter().copied()).fold(0.0, f64::max);
    let xr = xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let mut s = header(&format!("{}: P over {}", case.name, rep.kind().name()), hash);
    axes(&mut s, xr, (0.0, pmax), "lattice coordinate", "P");
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    for (k, &i) in chosen.iter().enumerate() {
        let (step, probs) = &case.distributions[i];
        let mut d = String::new();
        for (j, &site) in order.iter().enumerate() {
            let px = scale(xs[site], xr, (PAD, W - PAD / 2.0));
            let py = scale(probs[site], (0.0, pmax), (H - PAD, PAD));
            let _ = write!(d, "{}{px:.2} {py:.2} ", if j == 0 { "M" } else { "L" });
        }
        let color = COLORS[k % COLORS.len()];
        let _ = writeln!(s, "<path d=\"{d}\" stroke=\"{color}\" fill=\"none\" stroke-width=\"1\"><title>m = {step}</title></path>");
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" fill=\"{color}\">m = {step}</text>",
            W - 110.0,
            PAD + 14.0 * k as f64
        );
    }
    s.push_str("</svg>\n");
    s
}

/// `sqrt(P)` of the last snapshot summed over sites sharing Cartan coordinates.
fn heat_map(case: &CaseResult, hash: &str) -> String {
    let rep = &case.rep;
    let Some((step, probs)) = case.distributions.last() else {
        return String::new();
    };
    // coordinates are multiples of 1/2 or 1/(2 sqrt 3); key on rounded values
    let mut cells: BTreeMap<(i64, i64), (f64, f64, f64)> = BTreeMap::new();
    for (site, &p) in probs.iter().enumerate() {
        let (x, y) = (rep.coordinate(0, site), rep.coordinate(1, site));
        let key = ((x * 1e6).round() as i64, (y * 1e6).round() as i64);
        cells.entry(key).or_insert((x, y, 0.0)).2 += p;
    }
    let xr = cells.values().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), c| (a.min(c.0), b.max(c.0)));
    let yr = cells.values().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), c| (a.min(c.1), b.max(c.1)));
    let amax = cells.values().map(|c| c.2.sqrt()).fold(0.0, f64::max);
    let mut s = header(&format!("{}: sqrt P at m = {step}", case.name), hash);
    axes(&mut s, xr, yr, "C1", "C2");
    let r = ((W - 1.5 * PAD) / (cells.len() as f64).sqrt() / 2.0).clamp(0.6, 6.0);
    for (x, y, p) in cells.values() {
        let a = if amax > 0.0 { p.sqrt() / amax } else { 0.0 };
        if a < 1e-3 {
            continue;
        }
        let cx = scale(*x, xr, (PAD, W - PAD / 2.0));
        let cy = scale(*y, yr, (H - PAD, PAD));
        let _ = writeln!(s, "<circle cx=\"{cx:.2}\" cy=\"{cy:.2}\" r=\"{r:.2}\" fill=\"#08306b\" fill-opacity=\"{a:.3}\"/>");
    }
    s.push_str("</svg>\n");
    s
}

fn width_plot(case: &CaseResult, hash: &str) -> String {
    let pts: Vec<(f64, f64)> = case.snapshots.iter().map(|s| (s.step as f64, s.sigma)).collect();
    let xr = (0.0, pts.last().map_or(1.0, |p| p.0.max(1.0)));
    let yr = (0.0, pts.iter().map(|p| p.1).fold(0.0, f64::max));
    let mut s = header(&format!("{}: width against step", case.name), hash);
    axes(&mut s, xr, yr, "step m", "sigma");
    for (x, y) in pts {
        let cx = scale(x, xr, (PAD, W - PAD / 2.0));
        let cy = scale(y, yr, (H - PAD, PAD));
        let _ = writeln!(s, "<circle cx=\"{cx:.2}\" cy=\"{cy:.2}\" r=\"2.5\" fill=\"#d62728\"/>");
    }
    s.push_str("</svg>\n");
    s
}

/// File name and contents of each plot for one case.
pub fn case_plots(case: &CaseResult, hash: &str) -> Vec<(&'static str, String)> {
    let dist = if case.rep.rank() == 1 { line_plot(case, hash) } else { heat_map(case, hash) };
    vec![("distribution.svg", dist), ("width.svg", width_plot(case, hash))]
}
