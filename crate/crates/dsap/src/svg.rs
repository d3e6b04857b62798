//! Minimal static SVG: similarity heatmaps and dendrograms.

use std::fmt::Write;

use dsap_core::{ClusterAssignment, Dendrogram, SimilarityMatrix};

const CELL: f64 = 32.0;
const LABEL: f64 = 140.0;
const DENDRO: f64 = 160.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// White at 0 to dark blue at 1.
fn color(v: f64) -> String {
    let v = v.clamp(0.0, 1.0);
    let mix = |lo: f64, hi: f64| (lo + (hi - lo) * v).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(255.0, 8.0), mix(255.0, 48.0), mix(255.0, 107.0))
}

/// One heatmap block for `matrix` with rows and columns in `order`, drawn
/// at vertical offset `top`. Returns the block height.
fn heatmap(
    out: &mut String,
    matrix: &SimilarityMatrix,
    order: &[usize],
    left: f64,
    top: f64,
    labels: Option<&ClusterAssignment>,
) -> f64 {
    let n = order.len() as f64;
    let _ = writeln!(
        out,
        r#"<text x="{left}" y="{:.1}" font-size="14" font-weight="bold">{}</text>"#,
        top + 16.0,
        escape(&matrix.axis_id)
    );
    let grid_top = top + 28.0;
    let grid_left = left + LABEL;
    let cluster_col = if labels.is_some() { CELL } else { 0.0 };
    for (r, &i) in order.iter().enumerate() {
        let y = grid_top + r as f64 * CELL;
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="end">{}</text>"#,
            grid_left - 6.0,
            y + CELL * 0.6,
            escape(&matrix.dataset_ids[i])
        );
        if let Some(a) = labels {
            let _ = writeln!(
                out,
                r#"<text x="{:.1}" y="{:.1}" font-size="12" text-anchor="middle" font-weight="bold">{}</text>"#,
                grid_left + CELL / 2.0,
                y + CELL * 0.6,
                escape(&a.labels[i])
            );
        }
        for (c, &j) in order.iter().enumerate() {
            let v = matrix.values[i][j];
            let x = grid_left + cluster_col + c as f64 * CELL;
            let ink = if v > 0.55 { "#ffffff" } else { "#000000" };
            let _ = writeln!(
                out,
                r##"<rect x="{x:.1}" y="{y:.1}" width="{CELL}" height="{CELL}" fill="{}" stroke="#cccccc"/><text x="{:.1}" y="{:.1}" font-size="9" text-anchor="middle" fill="{ink}">{v:.2}</text>"##,
                color(v),
                x + CELL / 2.0,
                y + CELL * 0.6
            );
        }
    }
    for (c, &j) in order.iter().enumerate() {
        let x = grid_left + cluster_col + c as f64 * CELL + CELL / 2.0;
        let y = grid_top + n * CELL + 8.0;
        let _ = writeln!(
            out,
            r#"<text x="{x:.1}" y="{y:.1}" font-size="11" transform="rotate(60 {x:.1} {y:.1})">{}</text>"#,
            escape(&matrix.dataset_ids[j])
        );
    }
    28.0 + n * CELL + LABEL
}

fn document(width: f64, height: f64, body: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" viewBox=\"0 0 {width:.0} {height:.0}\" font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n{body}</svg>\n"
    )
}

/// Stacked heatmaps, one per axis, in input order.
pub fn heatmaps(matrices: &[SimilarityMatrix]) -> String {
    let mut body = String::new();
    let mut top = 10.0;
    let mut width: f64 = 0.0;
    for m in matrices {
        let order: Vec<usize> = (0..m.len()).collect();
        top += heatmap(&mut body, m, &order, 10.0, top, None);
        width = width.max(20.0 + LABEL + m.len() as f64 * CELL);
    }
    document(width, top, &body)
}

/// Dendrogram on the left, leaf-ordered heatmap with a cluster column on the right.
pub fn cluster_view(items: &[(SimilarityMatrix, Dendrogram, ClusterAssignment)]) -> String {
    let mut body = String::new();
    let mut top = 10.0;
    let mut width: f64 = 0.0;
    for (m, d, a) in items {
        let order = d.leaf_order();
        let grid_top = top + 28.0;
        dendrogram(&mut body, d, &order, 10.0, grid_top, a.threshold);
        top += heatmap(&mut body, m, &order, 10.0 + DENDRO, top, Some(a));
        width = width.max(30.0 + DENDRO + LABEL + (m.len() + 1) as f64 * CELL);
    }
    document(width, top, &body)
}

/// Horizontal dendrogram: height 0 at the right edge, 1 at the left.
fn dendrogram(out: &mut String, d: &Dendrogram, order: &[usize], left: f64, top: f64, threshold: f64) {
    let n = d.leaves();
    let x_of = |h: f64| left + (1.0 - h.clamp(0.0, 1.0)) * (DENDRO - 10.0);
    let mut pos: Vec<(f64, f64)> = vec![(0.0, 0.0); n + d.merges.len()];
    for (row, &leaf) in order.iter().enumerate() {
        pos[leaf] = (x_of(0.0), top + row as f64 * CELL + CELL / 2.0);
    }
    for (k, m) in d.merges.iter().enumerate() {
        let (xl, yl) = pos[m.left];
        let (xr, yr) = pos[m.right];
        let x = x_of(m.height);
        let _ = writeln!(
            out,
            r##"<path d="M{xl:.1},{yl:.1} H{x:.1} V{yr:.1} H{xr:.1}" fill="none" stroke="#333333" stroke-width="1.2"/>"##
        );
        pos[n + k] = (x, (yl + yr) / 2.0);
    }
    let x = x_of(threshold);
    let _ = writeln!(
        out,
        r##"<line x1="{x:.1}" y1="{:.1}" x2="{x:.1}" y2="{:.1}" stroke="#c0392b" stroke-dasharray="4 3"/>"##,
        top - 6.0,
        top + n as f64 * CELL + 6.0
    );
}
