//! Log–log decay plot of a curve table as a standalone SVG document.

use std::fmt::Write;

use favardlab::EstimateRecord;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 84.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 48.0;
const BOTTOM: f64 = 64.0;

pub fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Geometric mean of `k·mean`, the least-squares `C` of `log C - log k`.
pub fn inverse_scale(records: &[EstimateRecord]) -> f64 {
    let n = records.len() as f64;
    (records
        .iter()
        .map(|r| (r.k as f64 * r.mean).ln())
        .sum::<f64>()
        / n)
        .exp()
}

struct Axis {
    lo: f64,
    hi: f64,
}

impl Axis {
    /// Log10 range covering `values` with 5% padding on each side.
    fn covering(values: impl Iterator<Item = f64>) -> Axis {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values {
            let l = v.log10();
            lo = lo.min(l);
            hi = hi.max(l);
        }
        if hi - lo < 1e-9 {
            lo -= 0.5;
            hi += 0.5;
        }
        let pad = 0.05 * (hi - lo);
        Axis {
            lo: lo - pad,
            hi: hi + pad,
        }
    }

    fn frac(&self, v: f64) -> f64 {
        (v.log10() - self.lo) / (self.hi - self.lo)
    }

    fn ticks(&self) -> Vec<f64> {
        let first = self.lo.floor() as i32 - 1;
        let last = self.hi.ceil() as i32 + 1;
        let pick = |mantissas: &[f64]| -> Vec<f64> {
            (first..=last)
                .flat_map(|e| mantissas.iter().map(move |m| m * 10f64.powi(e)))
                .filter(|v| {
                    let l = v.log10();
                    l >= self.lo && l <= self.hi
                })
                .collect()
        };
        let coarse = pick(&[1.0, 2.0, 5.0]);
        if coarse.len() >= 3 {
            coarse
        } else {
            pick(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0])
        }
    }
}

fn tick_label(v: f64) -> String {
    let decimals = (-v.log10().floor()).max(0.0) as usize;
    format!("{v:.decimals$}")
}

/// Renders `records` (positive means) with ±1 standard-error bars and the
/// fitted `C/k` line. `metadata` is embedded as escaped text.
pub fn decay_plot(records: &[EstimateRecord], title: &str, metadata: &str) -> String {
    let c = inverse_scale(records);
    let ks: Vec<f64> = records.iter().map(|r| r.k as f64).collect();
    let (kmin, kmax) = (ks[0], ks[ks.len() - 1]);
    let x = Axis::covering(ks.iter().copied());
    let y = Axis::covering(
        records
            .iter()
            .flat_map(|r| [r.mean + r.stderr, r.mean - r.stderr, r.mean])
            .filter(|v| *v > 0.0)
            .chain([c / kmin, c / kmax]),
    );
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let px = |k: f64| LEFT + x.frac(k) * pw;
    let py = |v: f64| TOP + (1.0 - y.frac(v)) * ph;
    let y_floor = 10f64.powf(y.lo);

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, "<metadata>{}</metadata>", escape(metadata));
    let _ = writeln!(
        s,
        r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.3}" y="28" text-anchor="middle" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );

    // axes
    let (x0, x1, y0, y1) = (LEFT, LEFT + pw, TOP, TOP + ph);
    let _ = writeln!(
        s,
        r#"<g id="axes" stroke="black" fill="none"><line x1="{x0:.3}" y1="{y1:.3}" x2="{x1:.3}" y2="{y1:.3}"/><line x1="{x0:.3}" y1="{y0:.3}" x2="{x0:.3}" y2="{y1:.3}"/></g>"#
    );
    let _ = writeln!(s, r#"<g id="x-ticks">"#);
    for t in x.ticks() {
        let p = px(t);
        let _ = writeln!(
            s,
            r#"<line x1="{p:.3}" y1="{y1:.3}" x2="{p:.3}" y2="{:.3}" stroke="black"/><text x="{p:.3}" y="{:.3}" text-anchor="middle">{}</text>"#,
            y1 + 5.0,
            y1 + 19.0,
            tick_label(t)
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r#"<g id="y-ticks">"#);
    for t in y.ticks() {
        let p = py(t);
        let _ = writeln!(
            s,
            r#"<line x1="{:.3}" y1="{p:.3}" x2="{x0:.3}" y2="{p:.3}" stroke="black"/><text x="{:.3}" y="{:.3}" text-anchor="end">{}</text>"#,
            x0 - 5.0,
            x0 - 8.0,
            p + 4.0,
            tick_label(t)
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(
        s,
        r#"<text x="{:.3}" y="{:.3}" text-anchor="middle">k</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 18.0
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.3}" text-anchor="middle" transform="rotate(-90 18 {:.3})">mean projection length</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0
    );

    let _ = writeln!(s, r#"<g id="error-bars" stroke="steelblue">"#);
    for r in records {
        let k = r.k as f64;
        let lo = (r.mean - r.stderr).max(y_floor);
        let hi = r.mean + r.stderr;
        let p = px(k);
        let _ = writeln!(
            s,
            r#"<line x1="{p:.3}" y1="{:.3}" x2="{p:.3}" y2="{:.3}"/>"#,
            py(lo),
            py(hi)
        );
    }
    let _ = writeln!(s, "</g>");

    let data: Vec<String> = records
        .iter()
        .map(|r| format!("{:.3},{:.3}", px(r.k as f64), py(r.mean)))
        .collect();
    let _ = writeln!(
        s,
        r#"<polyline id="data" fill="none" stroke="steelblue" stroke-width="1.5" points="{}"/>"#,
        data.join(" ")
    );
    let _ = writeln!(s, r#"<g id="markers" fill="steelblue">"#);
    for r in records {
        let _ = writeln!(
            s,
            r#"<circle cx="{:.3}" cy="{:.3}" r="3"/>"#,
            px(r.k as f64),
            py(r.mean)
        );
    }
    let _ = writeln!(s, "</g>");

    let fit: Vec<String> = ks
        .iter()
        .map(|&k| format!("{:.3},{:.3}", px(k), py(c / k)))
        .collect();
    let _ = writeln!(
        s,
        r#"<polyline id="fit" fill="none" stroke="firebrick" stroke-dasharray="6 4" points="{}"/>"#,
        fit.join(" ")
    );

    let lx = x1 - 190.0;
    let ly = y0 + 16.0;
    let _ = writeln!(
        s,
        r#"<g id="legend"><rect x="{:.3}" y="{:.3}" width="180" height="44" fill="white" stroke="gray"/><line x1="{:.3}" y1="{ly:.3}" x2="{:.3}" y2="{ly:.3}" stroke="steelblue" stroke-width="1.5"/><text x="{:.3}" y="{:.3}">mean ± stderr</text><line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="firebrick" stroke-dasharray="6 4"/><text x="{:.3}" y="{:.3}">C/k, C = {}</text></g>"#,
        lx - 4.0,
        ly - 12.0,
        lx + 4.0,
        lx + 30.0,
        lx + 36.0,
        ly + 4.0,
        lx + 4.0,
        ly + 20.0,
        lx + 30.0,
        ly + 20.0,
        lx + 36.0,
        ly + 24.0,
        format_args!("{c:.4}")
    );
    let _ = writeln!(s, "</svg>");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(k: u32, mean: f64) -> EstimateRecord {
        EstimateRecord {
            k,
            mean,
            stderr: 0.01 * mean,
            samples: 10,
            theta: Some(0.0),
        }
    }

    #[test]
    fn scale_of_exact_inverse_law() {
        let recs: Vec<_> = (1..=8).map(|k| rec(k, 2.0 / k as f64)).collect();
        assert!((inverse_scale(&recs) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn ticks_and_labels() {
        let axis = Axis::covering([1.0, 10.0].into_iter());
        let t = axis.ticks();
        assert!(t.contains(&1.0) && t.contains(&2.0) && t.contains(&5.0) && t.contains(&10.0));
        assert_eq!(tick_label(0.05), "0.05");
        assert_eq!(tick_label(20.0), "20");
    }

    #[test]
    fn escapes_markup() {
        assert_eq!(escape(r#"<a & "b">"#), "&lt;a &amp; &quot;b&quot;&gt;");
    }

    #[test]
    fn single_point_plot_is_finite() {
        let svg = decay_plot(&[rec(3, 0.5)], "t", "m");
        assert!(!svg.contains("NaN") && !svg.contains("inf"));
    }
}
