//! Self-contained SVG line plots.

use std::fmt::Write;

use kk_spectra::scenario::Plot;

const W: f64 = 640.0;
const H: f64 = 400.0;
const L: f64 = 70.0;
const R: f64 = 150.0;
const T: f64 = 40.0;
const B: f64 = 50.0;
const COLORS: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#7f7f7f"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn bounds(v: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    let (lo, hi) = v.filter(|x| x.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    if lo > hi {
        return None;
    }
    if hi - lo < 1e-300 {
        let pad = lo.abs().max(1.0) * 0.5;
        return Some((lo - pad, hi + pad));
    }
    Some((lo, hi))
}

pub fn render(plot: &Plot) -> String {
    let ymap = |y: f64| if plot.log_y { if y > 0.0 { y.log10() } else { f64::NAN } } else { y };
    let xs = || plot.series.iter().flat_map(|s| s.points.iter().map(|p| p.0));
    let ys = || plot.series.iter().flat_map(|s| s.points.iter().map(|p| ymap(p.1)));
    let (x0, x1) = bounds(xs()).unwrap_or((0.0, 1.0));
    let (y0, y1) = bounds(ys()).unwrap_or((0.0, 1.0));
    let px = |x: f64| L + (x - x0) / (x1 - x0) * (W - L - R);
    let py = |y: f64| H - B - (y - y0) / (y1 - y0) * (H - T - B);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, (L + W - R) / 2.0, escape(&plot.title));
    let _ = writeln!(
        s,
        r#"<rect x="{L}" y="{T}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        W - L - R,
        H - T - B
    );
    for k in 0..=4 {
        let f = k as f64 / 4.0;
        let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
        let ylab = if plot.log_y { format!("1e{yv:.1}") } else { format!("{yv:.3e}") };
        let _ = writeln!(s, r#"<text x="{:.1}" y="{}" text-anchor="middle">{xv:.3}</text>"#, px(xv), H - B + 16.0);
        let _ = writeln!(s, r#"<text x="{}" y="{:.1}" text-anchor="end">{ylab}</text>"#, L - 4.0, py(yv) + 4.0);
        let _ = writeln!(s, r##"<line x1="{L}" x2="{}" y1="{:.1}" y2="{:.1}" stroke="#dddddd"/>"##, W - R, py(yv), py(yv));
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, (L + W - R) / 2.0, H - 12.0, escape(&plot.x_label));
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        (T + H - B) / 2.0,
        (T + H - B) / 2.0,
        escape(&plot.y_label)
    );
    for (n, series) in plot.series.iter().enumerate() {
        let color = COLORS[n % COLORS.len()];
        let pts: Vec<String> = series
            .points
            .iter()
            .filter(|p| ymap(p.1).is_finite())
            .map(|p| format!("{:.2},{:.2}", px(p.0), py(ymap(p.1))))
            .collect();
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, pts.join(" "));
        for p in &pts {
            let (cx, cy) = p.split_once(',').expect("formatted pair");
            let _ = writeln!(s, r#"<circle cx="{cx}" cy="{cy}" r="2.5" fill="{color}"/>"#);
        }
        let ly = T + 14.0 + 16.0 * n as f64;
        let _ = writeln!(s, r#"<line x1="{}" x2="{}" y1="{ly}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#, W - R + 10.0, W - R + 30.0);
        let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, W - R + 34.0, ly + 4.0, escape(&series.label));
    }
    s.push_str("</svg>\n");
    s
}
