//! Minimal log-log scatter plot with a least-squares line, as plain SVG.

use std::fmt::Write;

use anyhow::{bail, Context, Result};
use hermite_spectral::verification::ExponentFit;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 72.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 56.0;

/// Reads `(k, value)` pairs from a CSV with a header row naming `k` and
/// `value`; lines starting with `#` are skipped.
pub fn read_points(text: &str) -> Result<Vec<(u64, f64)>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers().context("reading CSV header")?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let (Some(kc), Some(vc)) = (col("k"), col("value")) else {
        bail!("CSV needs 'k' and 'value' columns, found [{}]", headers.iter().collect::<Vec<_>>().join(", "));
    };
    let mut points = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row.with_context(|| format!("CSV row {}", i + 1))?;
        let k: u64 = row
            .get(kc)
            .unwrap_or("")
            .parse()
            .with_context(|| format!("row {}: k must be a positive integer", i + 1))?;
        let v: f64 = row
            .get(vc)
            .unwrap_or("")
            .parse()
            .with_context(|| format!("row {}: value is not a number", i + 1))?;
        if k == 0 || !(v > 0.0 && v.is_finite()) {
            bail!("row {}: log-log plot needs k >= 1 and a positive finite value", i + 1);
        }
        points.push((k, v));
    }
    if points.is_empty() {
        bail!("CSV contains no data rows");
    }
    Ok(points)
}

struct Axis {
    lo: f64,
    hi: f64,
    px_lo: f64,
    px_hi: f64,
}

impl Axis {
    /// Log10 axis padded by 5% on each side.
    fn new(values: impl Iterator<Item = f64>, px_lo: f64, px_hi: f64) -> Self {
        let (mut lo, mut hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
            let l = v.log10();
            (a.min(l), b.max(l))
        });
        if hi - lo < 1e-9 {
            lo -= 0.5;
            hi += 0.5;
        }
        let pad = 0.05 * (hi - lo);
        Self {
            lo: lo - pad,
            hi: hi + pad,
            px_lo,
            px_hi,
        }
    }

    fn px(&self, v: f64) -> f64 {
        self.px_lo + (v.log10() - self.lo) / (self.hi - self.lo) * (self.px_hi - self.px_lo)
    }

    fn ticks(&self) -> Vec<f64> {
        let sets: [&[f64]; 3] = [&[1.0], &[1.0, 2.0, 5.0], &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0]];
        let mut best = Vec::new();
        for mantissas in sets {
            best = (self.lo.floor() as i32..=self.hi.ceil() as i32)
                .flat_map(|e| mantissas.iter().map(move |m| m * 10f64.powi(e)))
                .filter(|v| (self.lo..=self.hi).contains(&v.log10()))
                .collect();
            if best.len() >= 3 {
                break;
            }
        }
        if best.len() < 2 {
            best = vec![10f64.powf(self.lo), 10f64.powf(self.hi)];
        }
        best
    }
}

fn label(v: f64) -> String {
    let digits = 3 - 1 - v.abs().log10().floor() as i32;
    let scale = 10f64.powi(digits);
    format!("{}", (v * scale).round() / scale)
}

/// SVG document; identical inputs give identical bytes.
pub fn render(points: &[(u64, f64)], fit: Option<&ExponentFit>, title: &str, comment: &[String]) -> String {
    let x = Axis::new(points.iter().map(|p| p.0 as f64), LEFT, WIDTH - RIGHT);
    let y = Axis::new(points.iter().map(|p| p.1), HEIGHT - BOTTOM, TOP);
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    if !comment.is_empty() {
        let _ = writeln!(s, "<!--");
        for line in comment {
            let _ = writeln!(s, "  {}", line.replace("--", "- -"));
        }
        let _ = writeln!(s, "-->");
    }
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, TOP, HEIGHT - BOTTOM);
    let _ = writeln!(
        s,
        r#"<rect x="{x0:.2}" y="{y0:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
        x1 - x0,
        y1 - y0
    );
    for t in x.ticks() {
        let px = x.px(t);
        let _ = writeln!(s, r#"<line x1="{px:.2}" y1="{y1:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/>"#, y1 + 5.0);
        let _ = writeln!(s, r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, y1 + 19.0, label(t));
    }
    for t in y.ticks() {
        let py = y.px(t);
        let _ = writeln!(s, r#"<line x1="{:.2}" y1="{py:.2}" x2="{x0:.2}" y2="{py:.2}" stroke="black"/>"#, x0 - 5.0);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, x0 - 8.0, py + 4.0, label(t));
    }
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">k</text>"#, (x0 + x1) / 2.0, HEIGHT - 14.0);
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">value</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );
    if let Some(f) = fit {
        let (ka, kb) = (points[0].0 as f64, points[points.len() - 1].0 as f64);
        let line = |k: f64| (f.intercept + f.slope * k.ln()).exp();
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="firebrick" stroke-width="1.5"/>"#,
            x.px(ka),
            y.px(line(ka)),
            x.px(kb),
            y.px(line(kb))
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" fill="firebrick">slope = {:.4} (R² = {:.4})</text>"#,
            x0 + 10.0,
            y0 + 18.0,
            f.slope,
            f.r_squared
        );
    }
    for &(k, v) in points {
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="3.5" fill="steelblue"/>"#,
            x.px(k as f64),
            y.px(v)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use hermite_spectral::verification::fit_exponent;

    #[test]
    fn reads_commented_csv() {
        let pts = read_points("# meta\nk,value,log_k,log_value\n4,0.5,1,1\n8,0.25,2,2\n").unwrap();
        assert_eq!(pts, vec![(4, 0.5), (8, 0.25)]);
        assert!(read_points("k,value\n").is_err());
        assert!(read_points("").is_err());
        assert!(read_points("k,other\n1,2\n").is_err());
        assert!(read_points("k,value\n3,-1\n").is_err());
    }

    #[test]
    fn deterministic_svg() {
        let pts: Vec<(u64, f64)> = [64u64, 128, 256, 512].iter().map(|&k| (k, (k as f64).powf(-0.25))).collect();
        let fit = fit_exponent(&pts).unwrap();
        let a = render(&pts, Some(&fit), "test", &["meta".into()]);
        let b = render(&pts, Some(&fit), "test", &["meta".into()]);
        assert_eq!(a, b);
        assert!(a.contains("slope = -0.2500"));
        assert_eq!(a.matches("<circle").count(), 4);
    }

    #[test]
    fn tick_labels() {
        assert_eq!(label(0.2), "0.2");
        assert_eq!(label(500.0), "500");
        assert_eq!(label(0.123456), "0.123");
    }
}
