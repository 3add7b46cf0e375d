//! Standalone SVG scatter plots of clusterings, with optional radius
//! circles. Higher-dimensional data plots its first two coordinates.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::io::write_file;
use crate::model::{Dataset, OUTLIER_LABEL};

const PALETTE: [&str; 12] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
    "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#aec7e8", "#ffbb78",
];

fn color_for(label: usize) -> &'static str {
    if label == OUTLIER_LABEL {
        "#000000"
    } else {
        PALETTE[label % PALETTE.len()]
    }
}

/// Renders the plot as an SVG document string. `circles` are stroked
/// (center, radius) pairs, typically cluster footprints.
pub fn svg_string(dataset: &Dataset, labels: &[usize], circles: &[(Vec<f64>, f64)]) -> Result<String> {
    if labels.len() != dataset.n() {
        return Err(Error::contract("labels length does not match dataset"));
    }
    // Viewport covers points and circles with a 5% margin.
    let (mut lo, mut hi) = {
        let (l, h) = dataset.bounding_box();
        ([l[0], *l.get(1).unwrap_or(&0.0)], [h[0], *h.get(1).unwrap_or(&0.0)])
    };
    for (c, r) in circles {
        for a in 0..2 {
            let ca = *c.get(a).unwrap_or(&0.0);
            lo[a] = lo[a].min(ca - r);
            hi[a] = hi[a].max(ca + r);
        }
    }
    let span = ((hi[0] - lo[0]).max(hi[1] - lo[1])).max(1e-9);
    let margin = span * 0.05;
    let width = hi[0] - lo[0] + 2.0 * margin;
    let height = hi[1] - lo[1] + 2.0 * margin;
    // SVG y grows downward; flip so the plot reads like a math scatter plot.
    let tx = |x: f64| x - lo[0] + margin;
    let ty = |y: f64| hi[1] - y + margin;
    let dot_r = span * 0.008;
    let stroke_w = span * 0.003;

    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"0 0 {:.6} {:.6}\">",
        width, height
    );
    for (p, &l) in dataset.iter_points().zip(labels) {
        let y = if dataset.dim() > 1 { p[1] } else { 0.0 };
        let _ = writeln!(
            out,
            "  <circle cx=\"{:.6}\" cy=\"{:.6}\" r=\"{:.6}\" fill=\"{}\"/>",
            tx(p[0]),
            ty(y),
            dot_r,
            color_for(l)
        );
    }
    for (c, r) in circles {
        let y = if c.len() > 1 { c[1] } else { 0.0 };
        let _ = writeln!(
            out,
            "  <circle cx=\"{:.6}\" cy=\"{:.6}\" r=\"{:.6}\" fill=\"none\" stroke=\"#333333\" stroke-width=\"{:.6}\"/>",
            tx(c[0]),
            ty(y),
            r,
            stroke_w
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Writes the plot to `path`.
pub fn render_svg(
    dataset: &Dataset,
    labels: &[usize],
    circles: &[(Vec<f64>, f64)],
    path: &Path,
) -> Result<()> {
    write_file(path, &svg_string(dataset, labels, circles)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle_count(svg: &str) -> usize {
        svg.matches("<circle").count()
    }

    #[test]
    fn scatter_only_has_one_circle_per_point() {
        let ds = Dataset::from_rows(vec![vec![0.0, 0.0], vec![1.0, 2.0], vec![-1.0, 0.5]]).unwrap();
        let svg = svg_string(&ds, &[0, 1, 0], &[]).unwrap();
        assert_eq!(circle_count(&svg), 3);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn degenerate_single_point_with_zero_radius_circle() {
        let ds = Dataset::from_rows(vec![vec![5.0, 5.0]]).unwrap();
        let svg = svg_string(&ds, &[0], &[(vec![5.0, 5.0], 0.0)]).unwrap();
        assert_eq!(circle_count(&svg), 2);
    }

    #[test]
    fn expected_element_counts_for_demo_plot() {
        let data = crate::synth::two_circles(20, 1.0, 2.0, 0.0, 1).unwrap();
        let circles: Vec<(Vec<f64>, f64)> = (0..5).map(|i| (vec![i as f64, 0.0], 0.3)).collect();
        let svg = svg_string(&data.dataset, data.truth.as_ref().unwrap(), &circles).unwrap();
        assert_eq!(circle_count(&svg), 40 + 5);
    }

    #[test]
    fn labels_length_mismatch_rejected() {
        let ds = Dataset::from_rows(vec![vec![0.0, 0.0]]).unwrap();
        assert!(svg_string(&ds, &[0, 1], &[]).is_err());
    }
}
