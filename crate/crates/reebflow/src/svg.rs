//! Static SVG line charts, enough for trajectory and profile figures.

const PALETTE: [&str; 5] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct Panel {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

const PANEL_W: f64 = 640.0;
const PANEL_H: f64 = 300.0;
const MARGIN_L: f64 = 72.0;
const MARGIN_R: f64 = 150.0;
const MARGIN_T: f64 = 36.0;
const MARGIN_B: f64 = 44.0;

fn bounds(series: &[Series]) -> (f64, f64, f64, f64) {
    let mut xmin = f64::INFINITY;
    let mut xmax = f64::NEG_INFINITY;
    let mut ymin = f64::INFINITY;
    let mut ymax = f64::NEG_INFINITY;
    for s in series {
        for &(x, y) in &s.points {
            xmin = xmin.min(x);
            xmax = xmax.max(x);
            ymin = ymin.min(y);
            ymax = ymax.max(y);
        }
    }
    if !xmin.is_finite() {
        (0.0, 1.0, 0.0, 1.0)
    } else {
        // avoid a degenerate scale for constant series
        if xmax - xmin < 1e-300 {
            xmax = xmin + 1.0;
        }
        if ymax - ymin < 1e-12 * ymax.abs().max(1.0) {
            let pad = ymax.abs().max(1.0) * 1e-3;
            ymin -= pad;
            ymax += pad;
        }
        (xmin, xmax, ymin, ymax)
    }
}

fn render_panel(out: &mut String, panel: &Panel, y_offset: f64) {
    let (xmin, xmax, ymin, ymax) = bounds(&panel.series);
    let plot_w = PANEL_W - MARGIN_L - MARGIN_R;
    let plot_h = PANEL_H - MARGIN_T - MARGIN_B;
    let sx = |x: f64| MARGIN_L + (x - xmin) / (xmax - xmin) * plot_w;
    let sy = |y: f64| y_offset + MARGIN_T + plot_h - (y - ymin) / (ymax - ymin) * plot_h;

    out.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"14\" text-anchor=\"middle\">{}</text>\n",
        MARGIN_L + plot_w / 2.0,
        y_offset + 18.0,
        panel.title
    ));
    // frame
    out.push_str(&format!(
        "<rect x=\"{:.1}\" y=\"{:.1}\" width=\"{:.1}\" height=\"{:.1}\" fill=\"none\" stroke=\"#333\"/>\n",
        MARGIN_L,
        y_offset + MARGIN_T,
        plot_w,
        plot_h
    ));
    // ticks
    for k in 0..=4 {
        let fx = xmin + (xmax - xmin) * k as f64 / 4.0;
        let px = sx(fx);
        out.push_str(&format!(
            "<line x1=\"{px:.1}\" y1=\"{:.1}\" x2=\"{px:.1}\" y2=\"{:.1}\" stroke=\"#999\" stroke-dasharray=\"2,4\"/>\n",
            y_offset + MARGIN_T,
            y_offset + MARGIN_T + plot_h
        ));
        out.push_str(&format!(
            "<text x=\"{px:.1}\" y=\"{:.1}\" font-size=\"10\" text-anchor=\"middle\">{:.4}</text>\n",
            y_offset + MARGIN_T + plot_h + 14.0,
            fx
        ));
        let fy = ymin + (ymax - ymin) * k as f64 / 4.0;
        let py = sy(fy);
        out.push_str(&format!(
            "<line x1=\"{:.1}\" y1=\"{py:.1}\" x2=\"{:.1}\" y2=\"{py:.1}\" stroke=\"#999\" stroke-dasharray=\"2,4\"/>\n",
            MARGIN_L,
            MARGIN_L + plot_w
        ));
        out.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"10\" text-anchor=\"end\">{:.6}</text>\n",
            MARGIN_L - 6.0,
            py + 3.0,
            fy
        ));
    }
    // axis labels
    out.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n",
        MARGIN_L + plot_w / 2.0,
        y_offset + PANEL_H - 8.0,
        panel.x_label
    ));
    out.push_str(&format!(
        "<text x=\"14\" y=\"{:.1}\" font-size=\"11\" text-anchor=\"middle\" transform=\"rotate(-90 14 {:.1})\">{}</text>\n",
        y_offset + MARGIN_T + plot_h / 2.0,
        y_offset + MARGIN_T + plot_h / 2.0,
        panel.y_label
    ));
    // series + legend
    for (i, s) in panel.series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        out.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
            pts.join(" ")
        ));
        let ly = y_offset + MARGIN_T + 14.0 * (i as f64 + 1.0);
        out.push_str(&format!(
            "<line x1=\"{:.1}\" y1=\"{ly:.1}\" x2=\"{:.1}\" y2=\"{ly:.1}\" stroke=\"{color}\" stroke-width=\"2\"/>\n",
            MARGIN_L + plot_w + 8.0,
            MARGIN_L + plot_w + 28.0
        ));
        out.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"10\">{}</text>\n",
            MARGIN_L + plot_w + 32.0,
            ly + 3.0,
            s.label
        ));
    }
}

/// Render stacked panels into one standalone SVG document.
pub fn render(panels: &[Panel]) -> String {
    let height = PANEL_H * panels.len() as f64;
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{PANEL_W}\" height=\"{height}\" \
         viewBox=\"0 0 {PANEL_W} {height}\" font-family=\"sans-serif\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    );
    for (i, panel) in panels.iter().enumerate() {
        render_panel(&mut out, panel, PANEL_H * i as f64);
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_is_deterministic_and_well_formed() {
        let panels = vec![Panel {
            title: "volume".into(),
            x_label: "t".into(),
            y_label: "Vol".into(),
            series: vec![Series {
                label: "volume".into(),
                points: vec![(0.0, 2.0), (1.0, 1.5), (2.0, 1.2)],
            }],
        }];
        let a = render(&panels);
        let b = render(&panels);
        assert_eq!(a, b);
        assert!(a.starts_with("<svg"));
        assert!(a.trim_end().ends_with("</svg>"));
        assert!(a.contains("polyline"));
    }

    #[test]
    fn constant_series_does_not_collapse_the_scale() {
        let panels = vec![Panel {
            title: "flat".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            series: vec![Series {
                label: "c".into(),
                points: vec![(0.0, 1.0), (1.0, 1.0)],
            }],
        }];
        let svg = render(&panels);
        assert!(!svg.contains("NaN"));
    }
}
