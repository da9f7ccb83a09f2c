//! Static SVG renderings of sweep results, one polyline per curve.
//!
//! These are inspection artifacts, not an interactive UI: fixed canvas,
//! deterministic text output. Fidelity-vs-τ and detuning figures use a
//! log x-axis, collection-angle and n̄ figures a linear one, matching how
//! the results are usually presented. Infeasible points break the line.

use hybridlink::{FigureId, PointStatus, SweepResult};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 80.0;
const MARGIN_R: f64 = 24.0;
const MARGIN_T: f64 = 24.0;
const MARGIN_B: f64 = 56.0;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Scale {
    Linear,
    Log,
}

struct Axis {
    min: f64,
    max: f64,
    scale: Scale,
}

impl Axis {
    fn fit(values: impl Iterator<Item = f64>, scale: Scale) -> Axis {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for v in values {
            if v.is_finite() && (scale == Scale::Linear || v > 0.0) {
                min = min.min(v);
                max = max.max(v);
            }
        }
        if !min.is_finite() || !max.is_finite() {
            min = 0.0;
            max = 1.0;
        }
        if min == max {
            // degenerate span; widen symmetrically
            match scale {
                Scale::Linear => {
                    min -= 0.5;
                    max += 0.5;
                }
                Scale::Log => {
                    min /= 2.0;
                    max *= 2.0;
                }
            }
        }
        Axis { min, max, scale }
    }

    fn frac(&self, v: f64) -> f64 {
        match self.scale {
            Scale::Linear => (v - self.min) / (self.max - self.min),
            Scale::Log => (v.ln() - self.min.ln()) / (self.max.ln() - self.min.ln()),
        }
    }

    fn ticks(&self) -> Vec<f64> {
        match self.scale {
            Scale::Log => {
                let lo = self.min.log10().floor() as i32;
                let hi = self.max.log10().ceil() as i32;
                (lo..=hi)
                    .map(|e| 10f64.powi(e))
                    .filter(|t| *t >= self.min * 0.999 && *t <= self.max * 1.001)
                    .collect()
            }
            Scale::Linear => {
                let span = self.max - self.min;
                let raw = span / 5.0;
                let mag = 10f64.powf(raw.log10().floor());
                let step = [1.0, 2.0, 5.0, 10.0]
                    .iter()
                    .map(|m| m * mag)
                    .find(|s| span / s <= 6.0)
                    .unwrap_or(mag * 10.0);
                let first = (self.min / step).ceil();
                let mut ticks = Vec::new();
                let mut k = first;
                while k * step <= self.max + step * 1e-9 {
                    ticks.push(k * step);
                    k += 1.0;
                }
                ticks
            }
        }
    }
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let a = v.abs();
    if (1e-3..1e4).contains(&a) {
        let s = format!("{v:.6}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        s.to_string()
    } else {
        format!("{v:.0e}")
    }
}

fn coord(v: f64) -> String {
    format!("{v:.2}")
}

/// Figure-specific presentation: axis columns, grouping column, scales.
struct Layout {
    x_col: &'static str,
    y_col: &'static str,
    group_col: Option<&'static str>,
    x_scale: Scale,
    y_scale: Scale,
    x_label: &'static str,
    y_label: &'static str,
    /// Extra series plotted from another column against the same x.
    second_y: Option<(&'static str, &'static str)>,
}

fn layout(figure: FigureId) -> Layout {
    match figure {
        FigureId::Fig3 => Layout {
            x_col: "tau_ns",
            y_col: "fidelity",
            group_col: Some("delta_a_ghz"),
            x_scale: Scale::Log,
            y_scale: Scale::Linear,
            x_label: "pulse duration tau (ns)",
            y_label: "entanglement fidelity",
            second_y: None,
        },
        FigureId::Fig4 => Layout {
            x_col: "delta_a_ghz",
            y_col: "tau_ns",
            group_col: None,
            x_scale: Scale::Log,
            y_scale: Scale::Log,
            x_label: "atomic detuning delta_a (GHz)",
            y_label: "tau (ns) / intensity (W/cm^2)",
            second_y: Some(("intensity_w_cm2", "intensity @ N_s target")),
        },
        FigureId::Fig5 => Layout {
            x_col: "delta_rad",
            y_col: "fidelity",
            group_col: Some("nbar"),
            x_scale: Scale::Linear,
            y_scale: Scale::Linear,
            x_label: "collection half-angle (rad)",
            y_label: "entanglement fidelity",
            second_y: None,
        },
        FigureId::Fig6 => Layout {
            x_col: "delta_rad",
            y_col: "p_success",
            group_col: Some("nbar"),
            x_scale: Scale::Linear,
            y_scale: Scale::Linear,
            x_label: "collection half-angle (rad)",
            y_label: "success probability",
            second_y: None,
        },
        FigureId::Fig7 => Layout {
            x_col: "nbar",
            y_col: "p_star",
            group_col: None,
            x_scale: Scale::Linear,
            y_scale: Scale::Linear,
            x_label: "mean vibrational occupation nbar",
            y_label: "optimal success probability",
            second_y: None,
        },
    }
}

struct Series {
    label: String,
    dashed: bool,
    points: Vec<(f64, f64, bool)>, // x, y, feasible
}

fn split_series(result: &SweepResult, l: &Layout) -> Vec<Series> {
    let xs = result.column(l.x_col).unwrap_or(&[]);
    let ys = result.column(l.y_col).unwrap_or(&[]);
    let mut series = Vec::new();

    match l.group_col.and_then(|g| result.column(g)) {
        Some(groups) => {
            let mut current: Option<(f64, Series)> = None;
            for i in 0..xs.len() {
                let feasible = result.status[i] == PointStatus::Ok;
                let g = groups[i];
                let is_new = match &current {
                    Some((val, _)) => *val != g,
                    None => true,
                };
                if is_new {
                    if let Some((_, s)) = current.take() {
                        series.push(s);
                    }
                    current = Some((
                        g,
                        Series {
                            label: format!("{} = {}", l.group_col.unwrap(), tick_label(g)),
                            dashed: false,
                            points: Vec::new(),
                        },
                    ));
                }
                if let Some((_, s)) = current.as_mut() {
                    s.points.push((xs[i], ys[i], feasible));
                }
            }
            if let Some((_, s)) = current.take() {
                series.push(s);
            }
        }
        None => {
            let collect = |name: &str, label: &str, dashed: bool| Series {
                label: label.to_string(),
                dashed,
                points: (0..xs.len())
                    .map(|i| {
                        (
                            xs[i],
                            result.column(name).unwrap()[i],
                            result.status[i] == PointStatus::Ok,
                        )
                    })
                    .collect(),
            };
            series.push(collect(l.y_col, l.y_col, false));
            if let Some((col, label)) = l.second_y {
                if result.column(col).is_some() {
                    series.push(collect(col, label, true));
                }
            }
        }
    }
    series
}

/// Renders the sweep result as a standalone SVG document.
pub fn to_svg(result: &SweepResult, figure: FigureId) -> String {
    let l = layout(figure);
    let series = split_series(result, &l);

    let x_axis = Axis::fit(
        series
            .iter()
            .flat_map(|s| s.points.iter().filter(|p| p.2).map(|p| p.0)),
        l.x_scale,
    );
    let y_axis = Axis::fit(
        series
            .iter()
            .flat_map(|s| s.points.iter().filter(|p| p.2).map(|p| p.1)),
        l.y_scale,
    );

    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let px = |x: f64| MARGIN_L + x_axis.frac(x).clamp(0.0, 1.0) * plot_w;
    let py = |y: f64| MARGIN_T + (1.0 - y_axis.frac(y).clamp(0.0, 1.0)) * plot_h;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    // frame
    svg.push_str(&format!(
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#333\" stroke-width=\"1\"/>\n",
        coord(MARGIN_L),
        coord(MARGIN_T),
        coord(plot_w),
        coord(plot_h)
    ));

    // ticks and grid
    for t in x_axis.ticks() {
        let x = px(t);
        svg.push_str(&format!(
            "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#ddd\" stroke-width=\"0.5\"/>\n",
            coord(x),
            coord(MARGIN_T),
            coord(MARGIN_T + plot_h)
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\" fill=\"#333\">{}</text>\n",
            coord(x),
            coord(MARGIN_T + plot_h + 18.0),
            tick_label(t)
        ));
    }
    for t in y_axis.ticks() {
        let y = py(t);
        svg.push_str(&format!(
            "<line x1=\"{1}\" y1=\"{0}\" x2=\"{2}\" y2=\"{0}\" stroke=\"#ddd\" stroke-width=\"0.5\"/>\n",
            coord(y),
            coord(MARGIN_L),
            coord(MARGIN_L + plot_w)
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"end\" fill=\"#333\">{}</text>\n",
            coord(MARGIN_L - 6.0),
            coord(y + 4.0),
            tick_label(t)
        ));
    }

    // axis labels
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\" fill=\"#000\">{}</text>\n",
        coord(MARGIN_L + plot_w / 2.0),
        coord(HEIGHT - 12.0),
        l.x_label
    ));
    svg.push_str(&format!(
        "<text x=\"16\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\" \
         transform=\"rotate(-90 16 {0})\" fill=\"#000\">{1}</text>\n",
        coord(MARGIN_T + plot_h / 2.0),
        l.y_label
    ));

    // series polylines, broken at infeasible points
    for (idx, s) in series.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        let dash = if s.dashed {
            " stroke-dasharray=\"6,4\""
        } else {
            ""
        };
        let mut segment: Vec<String> = Vec::new();
        let flush = |seg: &mut Vec<String>, svg: &mut String| {
            if seg.len() >= 2 {
                svg.push_str(&format!(
                    "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.8\"{}/>\n",
                    seg.join(" "),
                    color,
                    dash
                ));
            }
            seg.clear();
        };
        for &(x, y, feasible) in &s.points {
            let usable = feasible
                && y.is_finite()
                && (l.y_scale == Scale::Linear || y > 0.0)
                && (l.x_scale == Scale::Linear || x > 0.0);
            if usable {
                segment.push(format!("{},{}", coord(px(x)), coord(py(y))));
            } else {
                flush(&mut segment, &mut svg);
            }
        }
        flush(&mut segment, &mut svg);

        // legend entry
        let ly = MARGIN_T + 16.0 + 18.0 * idx as f64;
        svg.push_str(&format!(
            "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"{3}\" stroke-width=\"2\"{4}/>\n",
            coord(MARGIN_L + plot_w - 150.0),
            coord(ly - 4.0),
            coord(MARGIN_L + plot_w - 126.0),
            color,
            dash
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" fill=\"#333\">{}</text>\n",
            coord(MARGIN_L + plot_w - 120.0),
            coord(ly),
            s.label
        ));
    }

    svg.push_str("</svg>\n");
    svg
}
