//! Minimal self-contained SVG rendering for scatter plots.
//!
//! Output is deterministic: coordinates are formatted with fixed
//! precision and colors come from a fixed palette keyed by class.

use std::collections::BTreeSet;

use eigenrnn::analysis::ScatterPlot;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 54.0;

/// One color per class, cycled for class ids beyond the palette.
const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];
const UNLABELED: &str = "#888888";

fn color_for(label: Option<usize>) -> &'static str {
    match label {
        Some(c) => PALETTE[c % PALETTE.len()],
        None => UNLABELED,
    }
}

/// Render the projected hidden states as an SVG scatter.
pub fn scatter_svg(plot: &ScatterPlot<f64>) -> String {
    let points = plot.points();
    let n = points.rows();
    let (mut x_min, mut x_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_min, mut y_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..n {
        x_min = x_min.min(points[(i, 0)]);
        x_max = x_max.max(points[(i, 0)]);
        y_min = y_min.min(points[(i, 1)]);
        y_max = y_max.max(points[(i, 1)]);
    }
    // Degenerate spans (single point, all-identical coordinates) get a
    // unit box so the projection stays visible at the center.
    if !x_min.is_finite() || x_max - x_min < 1e-12 {
        let c = if x_min.is_finite() { x_min } else { 0.0 };
        x_min = c - 0.5;
        x_max = c + 0.5;
    }
    if !y_min.is_finite() || y_max - y_min < 1e-12 {
        let c = if y_min.is_finite() { y_min } else { 0.0 };
        y_min = c - 0.5;
        y_max = c + 0.5;
    }
    let sx = (WIDTH - 2.0 * MARGIN) / (x_max - x_min);
    let sy = (HEIGHT - 2.0 * MARGIN) / (y_max - y_min);
    let px = |x: f64| MARGIN + (x - x_min) * sx;
    let py = |y: f64| HEIGHT - MARGIN - (y - y_min) * sy;

    let ev = plot.explained_variances();
    let mut out = String::with_capacity(64 * n + 1024);
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH:.0}\" height=\"{HEIGHT:.0}\" \
         viewBox=\"0 0 {WIDTH:.0} {HEIGHT:.0}\">\n"
    ));
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    out.push_str(&format!(
        "<rect x=\"{MARGIN:.0}\" y=\"{MARGIN:.0}\" width=\"{:.0}\" height=\"{:.0}\" \
         fill=\"none\" stroke=\"#333\" stroke-width=\"1\"/>\n",
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    ));
    for i in 0..n {
        out.push_str(&format!(
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2\" fill=\"{}\" fill-opacity=\"0.6\"/>\n",
            px(points[(i, 0)]),
            py(points[(i, 1)]),
            color_for(plot.labels()[i])
        ));
    }
    out.push_str(&format!(
        "<text x=\"{:.0}\" y=\"{:.0}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"14\">pc1 (variance {:.4})</text>\n",
        WIDTH / 2.0,
        HEIGHT - MARGIN / 3.0,
        ev.first().copied().unwrap_or(0.0)
    ));
    out.push_str(&format!(
        "<text x=\"{:.0}\" y=\"{:.0}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"14\" transform=\"rotate(-90 {:.0} {:.0})\">pc2 (variance {:.4})</text>\n",
        MARGIN / 3.0,
        HEIGHT / 2.0,
        MARGIN / 3.0,
        HEIGHT / 2.0,
        ev.get(1).copied().unwrap_or(0.0)
    ));
    let classes: BTreeSet<usize> = plot.labels().iter().flatten().copied().collect();
    for (row, class) in classes.iter().enumerate() {
        let y = MARGIN + 14.0 * row as f64 + 4.0;
        out.push_str(&format!(
            "<circle cx=\"{:.0}\" cy=\"{:.0}\" r=\"4\" fill=\"{}\"/>\n",
            WIDTH - MARGIN - 52.0,
            y,
            color_for(Some(*class))
        ));
        out.push_str(&format!(
            "<text x=\"{:.0}\" y=\"{:.0}\" font-family=\"sans-serif\" font-size=\"12\">class {class}</text>\n",
            WIDTH - MARGIN - 44.0,
            y + 4.0
        ));
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use eigenrnn::analysis::hidden_scatter;
    use eigenrnn::data::tomita_dataset;
    use eigenrnn::initializers::InitializerKind;
    use eigenrnn::linalg::Rng;
    use eigenrnn::nets::{CellKind, CellParams};

    #[test]
    fn rendering_is_deterministic_and_well_formed() {
        let mut rng = Rng::new(3);
        let dataset =
            tomita_dataset::<f64>(eigenrnn::data::GrammarId::new(4).unwrap(), 8, 12, &mut rng)
                .unwrap();
        let model = CellParams::<f64>::init(
            CellKind::TanhRnn,
            2,
            6,
            2,
            InitializerKind::Eigen { lambda: 0.9 },
            InitializerKind::XavierUniform,
            &mut rng,
        )
        .unwrap();
        let plot = hidden_scatter(&model, &dataset, 24).unwrap();
        let a = scatter_svg(&plot);
        let b = scatter_svg(&plot);
        assert_eq!(a, b);
        assert!(a.starts_with("<svg "));
        assert!(a.trim_end().ends_with("</svg>"));
        assert_eq!(a.matches("<circle").count(), plot.len() + 2, "legend dots");
        assert!(a.contains("pc1"));
        assert!(a.contains("class 0"));
        assert!(a.contains("class 1"));
    }

    #[test]
    fn identical_points_still_produce_a_finite_viewport() {
        // A zero model visits the origin only; spans degenerate.
        let mut rng = Rng::new(5);
        let dataset =
            tomita_dataset::<f64>(eigenrnn::data::GrammarId::new(1).unwrap(), 6, 6, &mut rng)
                .unwrap();
        let model = CellParams::<f64>::zeros(CellKind::TanhRnn, 2, 4, 2);
        let plot = hidden_scatter(&model, &dataset, 12).unwrap();
        let svg = scatter_svg(&plot);
        assert!(!svg.contains("NaN"));
        assert!(!svg.contains("inf"));
    }
}
