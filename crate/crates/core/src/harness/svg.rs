//! Minimal deterministic SVG line plots.

use std::fmt::Write;

use super::series::TimeSeries;
use super::HarnessError;

pub const WIDTH: f64 = 640.0;
pub const HEIGHT: f64 = 400.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;
const TICKS: usize = 5;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisKind {
    Linear,
    LogLog,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Plot {
    pub svg: String,
    /// Points skipped because they were non-finite (or non-positive on log axes).
    pub dropped: usize,
    pub kind: AxisKind,
    /// Axis ranges in plotted units (`log10` on log axes).
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
}

impl Plot {
    /// Pixel position of a data point.
    pub fn pixel(&self, x: f64, y: f64) -> (f64, f64) {
        let (x, y) = match self.kind {
            AxisKind::Linear => (x, y),
            AxisKind::LogLog => (x.log10(), y.log10()),
        };
        to_pixel(x, y, self.x_range, self.y_range)
    }
}

fn to_pixel(x: f64, y: f64, xr: (f64, f64), yr: (f64, f64)) -> (f64, f64) {
    let px = LEFT + (x - xr.0) / (xr.1 - xr.0) * (WIDTH - LEFT - RIGHT);
    let py = HEIGHT - BOTTOM - (y - yr.0) / (yr.1 - yr.0) * (HEIGHT - TOP - BOTTOM);
    (px, py)
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        (lo, hi)
    } else {
        let pad = if lo == 0.0 { 1.0 } else { 0.5 * lo.abs() };
        (lo - pad, hi + pad)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// One polyline per non-time column against the first column.
pub fn render(series: &TimeSeries, kind: AxisKind, title: &str) -> Result<Plot, HarnessError> {
    if series.is_empty() {
        return Err(HarnessError::Series("cannot plot an empty series".into()));
    }
    if series.columns().len() < 2 {
        return Err(HarnessError::Series("plot needs at least one value column".into()));
    }
    let map = |v: f64| match kind {
        AxisKind::Linear => v,
        AxisKind::LogLog => v.log10(),
    };
    let keep = |v: f64| v.is_finite() && (kind == AxisKind::Linear || v > 0.0);

    let mut dropped = 0;
    let mut lines: Vec<(usize, Vec<(f64, f64)>)> = Vec::new();
    for k in 1..series.columns().len() {
        let mut pts = Vec::new();
        for row in series.rows() {
            if keep(row[0]) && keep(row[k]) {
                pts.push((map(row[0]), map(row[k])));
            } else {
                dropped += 1;
            }
        }
        lines.push((k, pts));
    }
    let all: Vec<(f64, f64)> = lines.iter().flat_map(|l| l.1.iter().copied()).collect();
    if all.is_empty() {
        return Err(HarnessError::Series("no plottable points".into()));
    }
    let fold = |f: fn(&(f64, f64)) -> f64| {
        all.iter().map(f).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    };
    let (xlo, xhi) = fold(|p| p.0);
    let (ylo, yhi) = fold(|p| p.1);
    let xr = padded(xlo, xhi);
    let yr = padded(ylo, yhi);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="20" font-size="14" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let (x0, y0) = to_pixel(xr.0, yr.0, xr, yr);
    let (x1, y1) = to_pixel(xr.1, yr.1, xr, yr);
    let _ = writeln!(
        s,
        r#"<path d="M{x0:.2},{y1:.2} L{x0:.2},{y0:.2} L{x1:.2},{y0:.2}" fill="none" stroke="black"/>"#
    );
    let label = |v: f64| match kind {
        AxisKind::Linear => format!("{v:.3e}"),
        AxisKind::LogLog => format!("1e{v:.2}"),
    };
    for i in 0..TICKS {
        let f = i as f64 / (TICKS - 1) as f64;
        let xv = xr.0 + f * (xr.1 - xr.0);
        let yv = yr.0 + f * (yr.1 - yr.0);
        let (px, _) = to_pixel(xv, yr.0, xr, yr);
        let (_, py) = to_pixel(xr.0, yv, xr, yr);
        let _ = writeln!(
            s,
            r#"<line x1="{px:.2}" y1="{y0:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" font-size="10" text-anchor="middle">{}</text>"#,
            y0 + 5.0,
            y0 + 18.0,
            label(xv)
        );
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{x0:.2}" y2="{py:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" font-size="10" text-anchor="end">{}</text>"#,
            x0 - 5.0,
            x0 - 8.0,
            py + 3.0,
            label(yv)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">{}</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 10.0,
        escape(&series.columns()[0])
    );
    for (idx, (k, pts)) in lines.iter().enumerate() {
        if pts.is_empty() {
            continue;
        }
        let color = COLORS[idx % COLORS.len()];
        let coords: Vec<String> = pts
            .iter()
            .map(|&(x, y)| {
                let (px, py) = to_pixel(x, y, xr, yr);
                format!("{px:.2},{py:.2}")
            })
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            coords.join(" ")
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="10" fill="{color}">{}</text>"#,
            x1 - 120.0,
            TOP + 12.0 * (idx as f64 + 1.0),
            escape(&series.columns()[*k])
        );
    }
    s.push_str("</svg>\n");
    Ok(Plot { svg: s, dropped, kind, x_range: xr, y_range: yr })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn polylines(svg: &str) -> Vec<Vec<(f64, f64)>> {
        svg.lines()
            .filter(|l| l.starts_with("<polyline"))
            .map(|l| {
                let start = l.find("points=\"").unwrap() + 8;
                let end = start + l[start..].find('"').unwrap();
                l[start..end]
                    .split(' ')
                    .map(|p| {
                        let (x, y) = p.split_once(',').unwrap();
                        (x.parse().unwrap(), y.parse().unwrap())
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn two_point_series() {
        let mut s = TimeSeries::new(["t", "y"]);
        s.push(vec![0.0, 1.0]).unwrap();
        s.push(vec![1.0, 3.0]).unwrap();
        let plot = render(&s, AxisKind::Linear, "two").unwrap();
        let lines = polylines(&plot.svg);
        assert_eq!(lines.len(), 1);
        assert_eq!(lines[0].len(), 2);
        assert_eq!(plot.dropped, 0);
    }

    #[test]
    fn empty_series_is_an_error() {
        assert!(render(&TimeSeries::new(["t", "y"]), AxisKind::Linear, "").is_err());
    }

    #[test]
    fn output_is_deterministic_and_drops_non_finite() {
        let mut s = TimeSeries::new(["t", "a", "b"]);
        for k in 0..50 {
            let t = k as f64 * 0.01;
            s.push(vec![t, (3.0 * t).sin(), if k == 7 { f64::NAN } else { t * t }]).unwrap();
        }
        let p1 = render(&s, AxisKind::Linear, "x").unwrap();
        let p2 = render(&s, AxisKind::Linear, "x").unwrap();
        assert_eq!(p1.svg, p2.svg);
        assert_eq!(p1.dropped, 1);
        assert_eq!(polylines(&p1.svg).len(), 2);
    }

    #[test]
    fn polyline_parses_back_to_data() {
        // blow-up-like history: increasing, steep at the end
        let mut s = TimeSeries::new(["t", "grad"]);
        for k in 0..200 {
            let t = k as f64 * 0.0015;
            s.push(vec![t, 2.0 / ((0.3 - t) / 3.0).powi(3)]).unwrap();
        }
        for kind in [AxisKind::Linear, AxisKind::LogLog] {
            let plot = render(&s, kind, "gradient").unwrap();
            let line = &polylines(&plot.svg)[0];
            let kept: Vec<&Vec<f64>> = s.rows().iter().filter(|r| kind == AxisKind::Linear || r[0] > 0.0).collect();
            assert_eq!(line.len(), kept.len());
            for (px, row) in line.iter().zip(kept) {
                let (ex, ey) = plot.pixel(row[0], row[1]);
                assert!((px.0 - ex).abs() <= 0.5 && (px.1 - ey).abs() <= 0.5);
            }
            let tail = &line[line.len() * 4 / 5..];
            // screen y grows downwards: a rising history never moves down
            assert!(tail.windows(2).all(|w| w[1].1 <= w[0].1), "final segment is monotone");
            assert!(tail.last().unwrap().1 < tail[0].1);
        }
    }
}
