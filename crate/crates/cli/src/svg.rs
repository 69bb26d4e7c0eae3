//! Minimal native SVG writers: trace plots (one polyline per parameter)
//! and histograms (rects). Output is self-contained XML with no external
//! references.

use ndarray::Array2;

const WIDTH: f64 = 900.0;
const HEIGHT: f64 = 520.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 160.0;
const MARGIN_T: f64 = 50.0;
const MARGIN_B: f64 = 50.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

fn esc(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn header(title: &str) -> String {
    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n<text x=\"{x}\" y=\"26\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">{}</text>\n",
        esc(title),
        x = WIDTH / 2.0,
    )
}

fn axes(x0: f64, y0: f64, x1: f64, y1: f64) -> String {
    format!(
        "<line x1=\"{x0}\" y1=\"{y1}\" x2=\"{x1}\" y2=\"{y1}\" stroke=\"black\" stroke-width=\"1\"/>\n<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{y1}\" stroke=\"black\" stroke-width=\"1\"/>\n"
    )
}

/// Trace plot: one polyline per parameter, one point per retained draw.
pub fn trace_plot(names: &[String], draws: &Array2<f64>, title: &str) -> String {
    let rows = draws.nrows();
    let dims = draws.ncols();
    let (x0, x1) = (MARGIN_L, WIDTH - MARGIN_R);
    let (y0, y1) = (MARGIN_T, HEIGHT - MARGIN_B);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in draws.iter() {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() || !hi.is_finite() {
        lo = -1.0;
        hi = 1.0;
    }
    if hi - lo < 1e-12 {
        lo -= 0.5;
        hi += 0.5;
    }
    let x_at = |i: usize| {
        if rows <= 1 {
            (x0 + x1) / 2.0
        } else {
            x0 + (x1 - x0) * i as f64 / (rows - 1) as f64
        }
    };
    let y_at = |v: f64| y1 - (y1 - y0) * (v - lo) / (hi - lo);

    let mut out = header(title);
    out.push_str(&axes(x0, y0, x1, y1));
    out.push_str(&format!(
        "<text x=\"{x0}\" y=\"{y}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"start\">iteration</text>\n",
        y = y1 + 34.0
    ));
    out.push_str(&format!(
        "<text x=\"{x}\" y=\"{y}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{v:.3}</text>\n",
        x = x0 - 6.0,
        y = y1,
        v = lo
    ));
    out.push_str(&format!(
        "<text x=\"{x}\" y=\"{y}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{v:.3}</text>\n",
        x = x0 - 6.0,
        y = y0 + 4.0,
        v = hi
    ));
    for j in 0..dims {
        let color = PALETTE[j % PALETTE.len()];
        let points: Vec<String> = (0..rows)
            .map(|i| format!("{:.2},{:.2}", x_at(i), y_at(draws[[i, j]])))
            .collect();
        out.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1\" points=\"{}\"/>\n",
            points.join(" ")
        ));
        let ly = y0 + 16.0 * j as f64;
        out.push_str(&format!(
            "<line x1=\"{lx}\" y1=\"{ly}\" x2=\"{lx2}\" y2=\"{ly}\" stroke=\"{color}\" stroke-width=\"2\"/>\n",
            lx = x1 + 10.0,
            lx2 = x1 + 30.0,
        ));
        out.push_str(&format!(
            "<text x=\"{lx}\" y=\"{ly}\" font-family=\"sans-serif\" font-size=\"11\">{}</text>\n",
            esc(&names[j]),
            lx = x1 + 36.0,
            ly = ly + 4.0,
        ));
    }
    out.push_str("</svg>\n");
    out
}

/// Histogram with `ceil(sqrt(count))` bins.
pub fn histogram(name: &str, values: &[f64], title: &str) -> String {
    let bins = bin_count(values.len());
    let (x0, x1) = (MARGIN_L, WIDTH - 40.0);
    let (y0, y1) = (MARGIN_T, HEIGHT - MARGIN_B);
    let mut lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !lo.is_finite() || !hi.is_finite() {
        lo = 0.0;
        hi = 1.0;
    }
    if hi - lo < 1e-12 {
        lo -= 0.5;
        hi += 0.5;
    }
    let mut counts = vec![0usize; bins];
    for &v in values {
        let mut b = ((v - lo) / (hi - lo) * bins as f64).floor() as usize;
        if b >= bins {
            b = bins - 1;
        }
        counts[b] += 1;
    }
    let max_count = counts.iter().copied().max().unwrap_or(1).max(1);
    let bar_w = (x1 - x0) / bins as f64;

    let mut out = header(title);
    out.push_str(&axes(x0, y0, x1, y1));
    for (b, &c) in counts.iter().enumerate() {
        let h = (y1 - y0) * c as f64 / max_count as f64;
        out.push_str(&format!(
            "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"#1f77b4\" stroke=\"white\" stroke-width=\"0.5\"/>\n",
            x0 + b as f64 * bar_w,
            y1 - h,
            bar_w,
            h,
        ));
    }
    out.push_str(&format!(
        "<text x=\"{x}\" y=\"{y}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n",
        esc(name),
        x = (x0 + x1) / 2.0,
        y = y1 + 34.0,
    ));
    out.push_str(&format!(
        "<text x=\"{x}\" y=\"{y}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{lo:.3}</text>\n",
        x = x0,
        y = y1 + 16.0,
    ));
    out.push_str(&format!(
        "<text x=\"{x}\" y=\"{y}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{hi:.3}</text>\n",
        x = x1,
        y = y1 + 16.0,
    ));
    out.push_str("</svg>\n");
    out
}

/// Documented bin rule: ceil(sqrt(draw count)), at least one.
pub fn bin_count(n: usize) -> usize {
    ((n as f64).sqrt().ceil() as usize).max(1)
}
