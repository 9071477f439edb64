//! Minimal SVG line charts for trace inspection.
//!
//! Output is a plain standalone SVG built from polylines: no external
//! renderer, and byte-identical output for identical input.

use trackctl::sim::StepDiag;
use trackctl::{ControllerChoice, RunTrace};

use crate::CliError;

pub const KINDS: &[&str] = &["path", "errors", "commands", "surfaces"];

const PALETTE: &[&str] = &["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

struct Series {
    label: String,
    points: Vec<(f64, f64)>,
}

struct Panel {
    title: String,
    x_label: String,
    y_label: String,
    series: Vec<Series>,
    /// Force identical x/y scaling (for XY path views).
    equal_aspect: bool,
}

/// Render one plot kind from a trace.
pub fn render(trace: &RunTrace, kind: &str) -> Result<String, CliError> {
    let panels = match kind {
        "path" => vec![Panel {
            title: "desired and tracked path".into(),
            x_label: "x [m]".into(),
            y_label: "y [m]".into(),
            series: vec![
                Series {
                    label: "desired".into(),
                    points: trace.steps.iter().map(|s| (s.xd, s.yd)).collect(),
                },
                Series {
                    label: "tracked".into(),
                    points: trace.steps.iter().map(|s| (s.x, s.y)).collect(),
                },
            ],
            equal_aspect: true,
        }],
        "errors" => {
            let t = |f: fn(&trackctl::TraceStep) -> f64| -> Vec<(f64, f64)> {
                trace.steps.iter().map(|s| (s.t, f(s))).collect()
            };
            vec![
                panel_t("longitudinal error", "xe [m]", t(|s| s.xe)),
                panel_t("lateral error", "ye [m]", t(|s| s.ye)),
                panel_t("orientation error", "theta_e [rad]", t(|s| s.thetae)),
            ]
        }
        "commands" => {
            let t = |f: fn(&trackctl::TraceStep) -> f64| -> Vec<(f64, f64)> {
                trace.steps.iter().map(|s| (s.t, f(s))).collect()
            };
            vec![
                panel_t("speed command", "v [m/s]", t(|s| s.v_cmd)),
                panel_t("steering command", "phi [rad]", t(|s| s.phi_cmd)),
            ]
        }
        "surfaces" => {
            if trace.controller != ControllerChoice::Smc {
                return Err(CliError::config(
                    "trace has no surface columns (surfaces exist only for smc traces)".into(),
                ));
            }
            let surf = |first: bool| -> Vec<(f64, f64)> {
                trace
                    .steps
                    .iter()
                    .map(|s| match s.diag {
                        StepDiag::Smc { s1, s2 } => (s.t, if first { s1 } else { s2 }),
                        _ => unreachable!(),
                    })
                    .collect()
            };
            vec![
                panel_t("sliding surface s1", "s1", surf(true)),
                panel_t("sliding surface s2", "s2", surf(false)),
            ]
        }
        other => {
            return Err(CliError::config(format!(
                "unknown plot kind {other:?}; valid kinds: {}",
                KINDS.join(", ")
            )))
        }
    };
    Ok(render_panels(&panels))
}

fn panel_t(title: &str, y_label: &str, points: Vec<(f64, f64)>) -> Panel {
    Panel {
        title: title.into(),
        x_label: "t [s]".into(),
        y_label: y_label.into(),
        series: vec![Series { label: String::new(), points }],
        equal_aspect: false,
    }
}

fn nice_range(lo: f64, hi: f64) -> (f64, f64) {
    if !(hi > lo) {
        return (lo - 1.0, hi + 1.0);
    }
    let pad = (hi - lo) * 0.05;
    (lo - pad, hi + pad)
}

fn fmt_tick(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let a = x.abs();
    if a >= 1000.0 || a < 0.01 {
        format!("{x:.1e}")
    } else if a < 1.0 {
        format!("{x:.3}")
    } else {
        format!("{x:.1}")
    }
}

fn render_panels(panels: &[Panel]) -> String {
    const W: f64 = 760.0;
    const PANEL_H: f64 = 300.0;
    const ML: f64 = 70.0;
    const MR: f64 = 20.0;
    const MT: f64 = 36.0;
    const MB: f64 = 46.0;

    let total_h = PANEL_H * panels.len() as f64;
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{total_h}\" \
         viewBox=\"0 0 {W} {total_h}\" font-family=\"monospace\" font-size=\"12\">\n\
         <rect width=\"{W}\" height=\"{total_h}\" fill=\"white\"/>\n"
    ));

    for (pi, p) in panels.iter().enumerate() {
        let oy = pi as f64 * PANEL_H;
        let plot_w = W - ML - MR;
        let plot_h = PANEL_H - MT - MB;

        let (mut x_lo, mut x_hi) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut y_lo, mut y_hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for s in &p.series {
            for &(x, y) in &s.points {
                x_lo = x_lo.min(x);
                x_hi = x_hi.max(x);
                y_lo = y_lo.min(y);
                y_hi = y_hi.max(y);
            }
        }
        let (mut x_lo, mut x_hi) = nice_range(x_lo, x_hi);
        let (mut y_lo, mut y_hi) = nice_range(y_lo, y_hi);
        if p.equal_aspect {
            let x_scale = plot_w / (x_hi - x_lo);
            let y_scale = plot_h / (y_hi - y_lo);
            if x_scale < y_scale {
                let extra = plot_h / x_scale - (y_hi - y_lo);
                y_lo -= extra / 2.0;
                y_hi += extra / 2.0;
            } else {
                let extra = plot_w / y_scale - (x_hi - x_lo);
                x_lo -= extra / 2.0;
                x_hi += extra / 2.0;
            }
        }
        let sx = |x: f64| ML + (x - x_lo) / (x_hi - x_lo) * plot_w;
        let sy = |y: f64| oy + MT + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h;

        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
            ML + plot_w / 2.0,
            oy + 18.0,
            p.title
        ));
        svg.push_str(&format!(
            "<rect x=\"{ML}\" y=\"{}\" width=\"{plot_w}\" height=\"{plot_h}\" fill=\"none\" stroke=\"#444\"/>\n",
            oy + MT
        ));

        // Ticks and grid.
        for i in 0..=4 {
            let fx = x_lo + (x_hi - x_lo) * i as f64 / 4.0;
            let px = sx(fx);
            svg.push_str(&format!(
                "<line x1=\"{px:.2}\" y1=\"{:.2}\" x2=\"{px:.2}\" y2=\"{:.2}\" stroke=\"#ddd\"/>\n",
                oy + MT,
                oy + MT + plot_h
            ));
            svg.push_str(&format!(
                "<text x=\"{px:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>\n",
                oy + MT + plot_h + 16.0,
                fmt_tick(fx)
            ));
            let fy = y_lo + (y_hi - y_lo) * i as f64 / 4.0;
            let py = sy(fy);
            svg.push_str(&format!(
                "<line x1=\"{ML}\" y1=\"{py:.2}\" x2=\"{:.2}\" y2=\"{py:.2}\" stroke=\"#ddd\"/>\n",
                ML + plot_w
            ));
            svg.push_str(&format!(
                "<text x=\"{:.2}\" y=\"{py:.2}\" text-anchor=\"end\" dominant-baseline=\"middle\">{}</text>\n",
                ML - 6.0,
                fmt_tick(fy)
            ));
        }
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
            ML + plot_w / 2.0,
            oy + PANEL_H - 10.0,
            p.x_label
        ));
        svg.push_str(&format!(
            "<text x=\"14\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 14 {})\">{}</text>\n",
            oy + MT + plot_h / 2.0,
            oy + MT + plot_h / 2.0,
            p.y_label
        ));

        for (si, s) in p.series.iter().enumerate() {
            let color = PALETTE[si % PALETTE.len()];
            let pts: Vec<String> = s
                .points
                .iter()
                .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect();
            svg.push_str(&format!(
                "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.2\" points=\"{}\"/>\n",
                pts.join(" ")
            ));
            if !s.label.is_empty() {
                let ly = oy + MT + 16.0 + 16.0 * si as f64;
                svg.push_str(&format!(
                    "<line x1=\"{:.2}\" y1=\"{ly:.2}\" x2=\"{:.2}\" y2=\"{ly:.2}\" stroke=\"{color}\" stroke-width=\"2\"/>\n",
                    ML + plot_w - 120.0,
                    ML + plot_w - 96.0
                ));
                svg.push_str(&format!(
                    "<text x=\"{:.2}\" y=\"{:.2}\">{}</text>\n",
                    ML + plot_w - 90.0,
                    ly + 4.0,
                    s.label
                ));
            }
        }
    }
    svg.push_str("</svg>\n");
    svg
}

/// XY overlay of two traces against the shared desired path.
pub fn render_overlay(a: &RunTrace, b: &RunTrace, label_a: &str, label_b: &str) -> String {
    let panel = Panel {
        title: "desired and tracked paths".into(),
        x_label: "x [m]".into(),
        y_label: "y [m]".into(),
        series: vec![
            Series {
                label: "desired".into(),
                points: a.steps.iter().map(|s| (s.xd, s.yd)).collect(),
            },
            Series {
                label: label_a.into(),
                points: a.steps.iter().map(|s| (s.x, s.y)).collect(),
            },
            Series {
                label: label_b.into(),
                points: b.steps.iter().map(|s| (s.x, s.y)).collect(),
            },
        ],
        equal_aspect: true,
    };
    render_panels(&[panel])
}

/// Steering command comparison over time.
pub fn render_steering_overlay(a: &RunTrace, b: &RunTrace, label_a: &str, label_b: &str) -> String {
    let panel = Panel {
        title: "steering commands".into(),
        x_label: "t [s]".into(),
        y_label: "phi [rad]".into(),
        series: vec![
            Series {
                label: label_a.into(),
                points: a.steps.iter().map(|s| (s.t, s.phi_cmd)).collect(),
            },
            Series {
                label: label_b.into(),
                points: b.steps.iter().map(|s| (s.t, s.phi_cmd)).collect(),
            },
        ],
        equal_aspect: false,
    };
    render_panels(&[panel])
}
