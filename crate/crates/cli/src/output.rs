//! CSV and SVG persistence. CSV is the authoritative artifact; the SVG
//! charts are minimal hand-emitted log-scale line plots.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rfed_core::{Error, Result};

pub fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source: e,
    }
}

/// Shortest round-trip decimal form; empty for absent values.
pub fn fmt_opt(x: Option<f64>) -> String {
    match x {
        Some(v) => format!("{}", v),
        None => String::new(),
    }
}

pub fn write_lines(path: &Path, header: &str, lines: &[String]) -> Result<()> {
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    writeln!(w, "{}", header).map_err(|e| io_err(path, e))?;
    for line in lines {
        writeln!(w, "{}", line).map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

/// One line series for a chart.
pub struct Series {
    pub label: String,
    pub values: Vec<f64>,
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 50.0;

/// Log-y line chart over round index. Values at or below zero are clamped
/// to the smallest positive value in the data (or 1e-16).
pub fn write_svg_log_y(path: &Path, title: &str, y_label: &str, series: &[Series]) -> Result<()> {
    let floor = series
        .iter()
        .flat_map(|s| s.values.iter())
        .filter(|v| **v > 0.0 && v.is_finite())
        .fold(f64::INFINITY, |a, &b| a.min(b))
        .max(1e-16);
    let clamp = |v: f64| if v > 0.0 && v.is_finite() { v } else { floor };
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut max_len = 1usize;
    for s in series {
        max_len = max_len.max(s.values.len());
        for &v in &s.values {
            let lv = clamp(v).log10();
            lo = lo.min(lv);
            hi = hi.max(lv);
        }
    }
    if !lo.is_finite() {
        lo = -1.0;
        hi = 1.0;
    }
    let lo = lo.floor();
    let hi = (hi.ceil()).max(lo + 1.0);

    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let x_of = |i: usize| {
        MARGIN_L + plot_w * i as f64 / (max_len.max(2) - 1) as f64
    };
    let y_of = |v: f64| {
        let t = (clamp(v).log10() - lo) / (hi - lo);
        MARGIN_T + plot_h * (1.0 - t)
    };

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n",
        w = WIDTH,
        h = HEIGHT
    ));
    svg.push_str(&format!(
        "<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n",
        WIDTH, HEIGHT
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">{}</text>\n",
        WIDTH / 2.0,
        title
    ));
    // axes
    svg.push_str(&format!(
        "<line x1=\"{l}\" y1=\"{t}\" x2=\"{l}\" y2=\"{b}\" stroke=\"black\"/>\n<line x1=\"{l}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n",
        l = MARGIN_L,
        t = MARGIN_T,
        b = HEIGHT - MARGIN_B,
        r = WIDTH - MARGIN_R
    ));
    // y ticks at integer powers of ten
    let mut tick = lo;
    while tick <= hi + 1e-9 {
        let y = MARGIN_T + plot_h * (1.0 - (tick - lo) / (hi - lo));
        svg.push_str(&format!(
            "<line x1=\"{l1}\" y1=\"{y}\" x2=\"{l2}\" y2=\"{y}\" stroke=\"black\"/>\n<text x=\"{lt}\" y=\"{yt}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">1e{e}</text>\n",
            l1 = MARGIN_L - 4.0,
            l2 = MARGIN_L,
            y = y,
            lt = MARGIN_L - 8.0,
            yt = y + 4.0,
            e = tick as i64
        ));
        tick += 1.0;
    }
    // x tick labels: first and last round
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">0</text>\n",
        MARGIN_L,
        HEIGHT - MARGIN_B + 18.0
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n",
        WIDTH - MARGIN_R,
        HEIGHT - MARGIN_B + 18.0,
        max_len.saturating_sub(1)
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">round</text>\n",
        MARGIN_L + plot_w / 2.0,
        HEIGHT - 12.0
    ));
    svg.push_str(&format!(
        "<text x=\"16\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">{} (log scale)</text>\n",
        MARGIN_T + plot_h / 2.0,
        MARGIN_T + plot_h / 2.0,
        y_label
    ));
    for (si, s) in series.iter().enumerate() {
        let color = PALETTE[si % PALETTE.len()];
        let points: Vec<String> = s
            .values
            .iter()
            .enumerate()
            .map(|(i, &v)| format!("{:.2},{:.2}", x_of(i), y_of(v)))
            .collect();
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            color,
            points.join(" ")
        ));
        // legend
        let ly = MARGIN_T + 16.0 * si as f64;
        svg.push_str(&format!(
            "<line x1=\"{x}\" y1=\"{y}\" x2=\"{x2}\" y2=\"{y}\" stroke=\"{c}\" stroke-width=\"2\"/>\n<text x=\"{xt}\" y=\"{yt}\" font-family=\"sans-serif\" font-size=\"11\">{l}</text>\n",
            x = WIDTH - MARGIN_R - 150.0,
            x2 = WIDTH - MARGIN_R - 130.0,
            y = ly,
            c = color,
            xt = WIDTH - MARGIN_R - 124.0,
            yt = ly + 4.0,
            l = s.label
        ));
    }
    svg.push_str("</svg>\n");
    std::fs::write(path, svg).map_err(|e| io_err(path, e))
}
