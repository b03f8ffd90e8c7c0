//! Minimal SVG charts for run reports.

use std::fmt::Write as _;

const W: f64 = 480.0;
const H: f64 = 320.0;
const PAD: f64 = 48.0;

fn frame(title: &str, body: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n\
         <rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">{}</text>\n\
         <line x1=\"{PAD}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n\
         <line x1=\"{PAD}\" y1=\"{PAD}\" x2=\"{PAD}\" y2=\"{}\" stroke=\"black\"/>\n{body}</svg>\n",
        W / 2.0,
        escape(title),
        H - PAD,
        W - PAD,
        H - PAD,
        H - PAD,
    )
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) =
        values.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

fn axis_labels(out: &mut String, (y0, y1): (f64, f64)) {
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">{y1:.3e}</text>",
        PAD - 4.0,
        PAD + 4.0
    );
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">{y0:.3e}</text>",
        PAD - 4.0,
        H - PAD
    );
}

/// One polyline per series, sharing the axes.
pub fn line_chart(title: &str, series: &[Vec<f64>]) -> String {
    let n = series.iter().map(Vec::len).max().unwrap_or(0).max(2);
    let yr = range(series.iter().flatten().copied());
    let colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];
    let mut body = String::new();
    for (k, s) in series.iter().enumerate() {
        let pts: Vec<String> = s
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_finite())
            .map(|(i, v)| {
                let x = PAD + (W - 2.0 * PAD) * i as f64 / (n - 1) as f64;
                let y = H - PAD - (H - 2.0 * PAD) * (v - yr.0) / (yr.1 - yr.0);
                format!("{x:.1},{y:.1}")
            })
            .collect();
        let _ = writeln!(
            body,
            "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>",
            colors[k % colors.len()],
            pts.join(" ")
        );
    }
    axis_labels(&mut body, yr);
    frame(title, &body)
}

/// 2-D scatter; flagged points are drawn in red.
pub fn scatter(title: &str, points: &[(f64, f64)], flagged: &[bool]) -> String {
    let xr = range(points.iter().map(|p| p.0));
    let yr = range(points.iter().map(|p| p.1));
    let mut body = String::new();
    for (i, (px, py)) in points.iter().enumerate() {
        let x = PAD + (W - 2.0 * PAD) * (px - xr.0) / (xr.1 - xr.0);
        let y = H - PAD - (H - 2.0 * PAD) * (py - yr.0) / (yr.1 - yr.0);
        let color = if flagged.get(i).copied().unwrap_or(false) { "#d62728" } else { "#1f77b4" };
        let _ = writeln!(body, "<circle cx=\"{x:.1}\" cy=\"{y:.1}\" r=\"2.5\" fill=\"{color}\" fill-opacity=\"0.7\"/>");
    }
    axis_labels(&mut body, yr);
    frame(title, &body)
}

/// Vertical bars on a `[0, max(1, values)]` scale.
pub fn bar_chart(title: &str, bars: &[(String, f64)]) -> String {
    let top = bars.iter().map(|b| b.1).filter(|v| v.is_finite()).fold(1.0, f64::max);
    let slot = (W - 2.0 * PAD) / bars.len().max(1) as f64;
    let mut body = String::new();
    for (i, (label, v)) in bars.iter().enumerate() {
        let v = if v.is_finite() { v.max(0.0) } else { 0.0 };
        let h = (H - 2.0 * PAD) * v / top;
        let x = PAD + slot * i as f64 + slot * 0.15;
        let _ = writeln!(
            body,
            "<rect x=\"{x:.1}\" y=\"{:.1}\" width=\"{:.1}\" height=\"{h:.1}\" fill=\"#1f77b4\"/>",
            H - PAD - h,
            slot * 0.7
        );
        let _ = writeln!(
            body,
            "<text x=\"{:.1}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">{}</text>",
            x + slot * 0.35,
            H - PAD + 14.0,
            escape(label)
        );
    }
    axis_labels(&mut body, (0.0, top));
    frame(title, &body)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn charts_are_well_formed() {
        for svg in [
            line_chart("loss <train>", &[vec![3.0, 2.0, 1.0], vec![]]),
            scatter("latent", &[(0.0, 1.0), (1.0, 0.0)], &[true, false]),
            bar_chart("f1", &[("AE".into(), 0.9), ("HAE".into(), f64::NAN)]),
        ] {
            assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
            assert!(!svg.contains("NaN"));
        }
        assert!(line_chart("a<b", &[]).contains("a&lt;b"));
    }
}
