//! Minimal deterministic SVG line charts.
//!
//! Fixed 640×480 canvas split into equal panels.  Every coordinate is
//! written with three decimals and no volatile state (times, ids), so
//! identical inputs produce identical bytes.

use std::fmt::Write;

pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

pub struct Panel {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    /// Plot `log10(y)`; non-positive values are skipped.
    pub log_y: bool,
    /// Use the same scale on both axes (for curve overlays).
    pub equal_aspect: bool,
    pub series: Vec<Series>,
}

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];
const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 62.0;
const MARGIN_RIGHT: f64 = 14.0;
const MARGIN_TOP: f64 = 34.0;
const MARGIN_BOTTOM: f64 = 46.0;

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn fmt_coord(v: f64) -> String {
    format!("{v:.3}")
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else if v.abs() >= 0.01 && v.abs() < 10000.0 {
        format!("{v:.3}")
    } else {
        format!("{v:.2e}")
    }
}

struct Range {
    lo: f64,
    hi: f64,
}

impl Range {
    fn of(values: impl Iterator<Item = f64>) -> Range {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for v in values {
            if v.is_finite() {
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        if !lo.is_finite() || !hi.is_finite() {
            return Range { lo: 0.0, hi: 1.0 };
        }
        if hi - lo < 1e-300 {
            let pad = 0.5 + lo.abs() * 0.05;
            return Range {
                lo: lo - pad,
                hi: hi + pad,
            };
        }
        let pad = 0.04 * (hi - lo);
        Range {
            lo: lo - pad,
            hi: hi + pad,
        }
    }

    fn span(&self) -> f64 {
        self.hi - self.lo
    }
}

pub fn render(panels: &[Panel]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH:.0} {HEIGHT:.0}\" \
         font-family=\"monospace\" font-size=\"11\">"
    );
    let _ = writeln!(
        out,
        "<rect x=\"0\" y=\"0\" width=\"{WIDTH:.0}\" height=\"{HEIGHT:.0}\" fill=\"white\"/>"
    );
    let slot = WIDTH / panels.len().max(1) as f64;
    for (pi, panel) in panels.iter().enumerate() {
        render_panel(&mut out, panel, pi as f64 * slot, slot);
    }
    out.push_str("</svg>\n");
    out
}

fn render_panel(out: &mut String, panel: &Panel, x0: f64, slot: f64) {
    let plot_x = x0 + MARGIN_LEFT;
    let plot_y = MARGIN_TOP;
    let plot_w = slot - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;

    // Transformed data (log scale applied up front).
    let data: Vec<Vec<(f64, f64)>> = panel
        .series
        .iter()
        .map(|s| {
            s.points
                .iter()
                .filter(|(x, y)| x.is_finite() && y.is_finite() && (!panel.log_y || *y > 0.0))
                .map(|&(x, y)| (x, if panel.log_y { y.log10() } else { y }))
                .collect()
        })
        .collect();
    let mut xr = Range::of(data.iter().flatten().map(|p| p.0));
    let mut yr = Range::of(data.iter().flatten().map(|p| p.1));
    if panel.equal_aspect {
        // Grow the narrower range so one data unit spans the same number
        // of pixels on both axes.
        let per_x = plot_w / xr.span();
        let per_y = plot_h / yr.span();
        if per_x < per_y {
            let need = plot_h / per_x;
            let mid = 0.5 * (yr.lo + yr.hi);
            yr = Range {
                lo: mid - 0.5 * need,
                hi: mid + 0.5 * need,
            };
        } else {
            let need = plot_w / per_y;
            let mid = 0.5 * (xr.lo + xr.hi);
            xr = Range {
                lo: mid - 0.5 * need,
                hi: mid + 0.5 * need,
            };
        }
    }
    let to_px = |x: f64, y: f64| -> (f64, f64) {
        (
            plot_x + (x - xr.lo) / xr.span() * plot_w,
            plot_y + plot_h - (y - yr.lo) / yr.span() * plot_h,
        )
    };

    // Frame, grid, ticks.
    let _ = writeln!(
        out,
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#444444\"/>",
        fmt_coord(plot_x),
        fmt_coord(plot_y),
        fmt_coord(plot_w),
        fmt_coord(plot_h)
    );
    for i in 0..5 {
        let frac = i as f64 / 4.0;
        let xv = xr.lo + frac * xr.span();
        let yv = yr.lo + frac * yr.span();
        let (gx, _) = to_px(xv, yr.lo);
        let (_, gy) = to_px(xr.lo, yv);
        let _ = writeln!(
            out,
            "<line x1=\"{x}\" y1=\"{}\" x2=\"{x}\" y2=\"{}\" stroke=\"#dddddd\"/>",
            fmt_coord(plot_y),
            fmt_coord(plot_y + plot_h),
            x = fmt_coord(gx)
        );
        let _ = writeln!(
            out,
            "<line x1=\"{}\" y1=\"{y}\" x2=\"{}\" y2=\"{y}\" stroke=\"#dddddd\"/>",
            fmt_coord(plot_x),
            fmt_coord(plot_x + plot_w),
            y = fmt_coord(gy)
        );
        let xlabel = fmt_tick(xv);
        let ylabel = if panel.log_y {
            format!("{:.1e}", 10f64.powf(yv))
        } else {
            fmt_tick(yv)
        };
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>",
            fmt_coord(gx),
            fmt_coord(plot_y + plot_h + 16.0),
            xml_escape(&xlabel)
        );
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>",
            fmt_coord(plot_x - 5.0),
            fmt_coord(gy + 4.0),
            xml_escape(&ylabel)
        );
    }

    // Title and axis labels.
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"20\" text-anchor=\"middle\" font-size=\"13\">{}</text>",
        fmt_coord(plot_x + 0.5 * plot_w),
        xml_escape(&panel.title)
    );
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>",
        fmt_coord(plot_x + 0.5 * plot_w),
        fmt_coord(HEIGHT - 10.0),
        xml_escape(&panel.x_label)
    );
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 {} {})\">{}</text>",
        fmt_coord(x0 + 14.0),
        fmt_coord(plot_y + 0.5 * plot_h),
        fmt_coord(x0 + 14.0),
        fmt_coord(plot_y + 0.5 * plot_h),
        xml_escape(&panel.y_label)
    );

    // Series polylines, clipped to the frame by construction of the range.
    for (si, pts) in data.iter().enumerate() {
        if pts.is_empty() {
            continue;
        }
        let color = PALETTE[si % PALETTE.len()];
        let mut coords = String::new();
        for &(x, y) in pts {
            let (px, py) = to_px(x, y);
            let _ = write!(coords, "{},{} ", fmt_coord(px), fmt_coord(py));
        }
        let _ = writeln!(
            out,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>",
            coords.trim_end(),
            color
        );
    }

    // Legend in the top-right corner of the plot area.
    for (si, s) in panel.series.iter().enumerate() {
        let color = PALETTE[si % PALETTE.len()];
        let ly = plot_y + 14.0 + 14.0 * si as f64;
        let lx = plot_x + plot_w - 6.0;
        let _ = writeln!(
            out,
            "<rect x=\"{}\" y=\"{}\" width=\"9\" height=\"9\" fill=\"{}\"/>",
            fmt_coord(lx - 9.0),
            fmt_coord(ly - 8.0),
            color
        );
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>",
            fmt_coord(lx - 13.0),
            fmt_coord(ly),
            xml_escape(&s.name)
        );
    }
}
