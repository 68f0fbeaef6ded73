//! Static SVG rendering of triangulations.
//!
//! The renderer emits one polygon per triangle, so element shapes and
//! grading stay inspectable in any browser. A vertex field can be draped
//! over the mesh as a blue-white-red map of per-triangle mean values.

use std::fmt::Write;

use crate::fields::ScalarField;
use crate::mesh::TriMesh;

const CONTENT_WIDTH: f64 = 800.0;
const MARGIN: f64 = 10.0;
const UNIFORM_FILL: &str = "#e8eaf0";

/// Render a mesh as standalone SVG text.
///
/// The viewport is fitted to the mesh bounding box. With a field, each
/// triangle is filled according to the mean of its three vertex values,
/// mapped linearly from blue (minimum) through white to red (maximum).
/// Without a field, or when the field has no spread to map (constant,
/// non-finite, or not one value per vertex), every triangle gets the
/// same fill. Output is deterministic for a given mesh and field.
pub fn render_svg(mesh: &TriMesh, field: Option<&ScalarField>) -> String {
    let vertices = mesh.vertices();
    let (mut min_x, mut min_y) = (f64::INFINITY, f64::INFINITY);
    let (mut max_x, mut max_y) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in vertices {
        min_x = min_x.min(p[0]);
        max_x = max_x.max(p[0]);
        min_y = min_y.min(p[1]);
        max_y = max_y.max(p[1]);
    }
    let scale = CONTENT_WIDTH / (max_x - min_x).max(max_y - min_y);
    let width = (max_x - min_x) * scale + 2.0 * MARGIN;
    let height = (max_y - min_y) * scale + 2.0 * MARGIN;
    let map = |p: &[f64; 2]| {
        (
            MARGIN + (p[0] - min_x) * scale,
            MARGIN + (max_y - p[1]) * scale,
        )
    };

    let means = triangle_means(mesh, field);
    let range = means.as_deref().and_then(spread);

    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {width:.2} {height:.2}\" width=\"{width:.2}\" height=\"{height:.2}\">",
    );
    let _ = writeln!(
        out,
        "<g stroke=\"#40414f\" stroke-width=\"0.4\" stroke-linejoin=\"round\">"
    );
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let fill = match (&means, range) {
            (Some(m), Some((lo, hi))) => diverging_color((m[t] - lo) / (hi - lo)),
            _ => UNIFORM_FILL.to_string(),
        };
        let _ = write!(out, "<polygon points=\"");
        for (k, &v) in tri.iter().enumerate() {
            let (x, y) = map(&vertices[v]);
            let sep = if k == 0 { "" } else { " " };
            let _ = write!(out, "{sep}{x:.2},{y:.2}");
        }
        let _ = writeln!(out, "\" fill=\"{fill}\"/>");
    }
    out.push_str("</g>\n</svg>\n");
    out
}

fn triangle_means(mesh: &TriMesh, field: Option<&ScalarField>) -> Option<Vec<f64>> {
    let f = field?;
    if f.len() != mesh.n_vertices() {
        return None;
    }
    Some(
        mesh.triangles()
            .iter()
            .map(|t| (f.values[t[0]] + f.values[t[1]] + f.values[t[2]]) / 3.0)
            .collect(),
    )
}

fn spread(means: &[f64]) -> Option<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &m in means {
        if !m.is_finite() {
            return None;
        }
        lo = lo.min(m);
        hi = hi.max(m);
    }
    (hi > lo).then_some((lo, hi))
}

/// Hex fill for a normalized value, blue through white to red.
fn diverging_color(t: f64) -> String {
    let t = t.clamp(0.0, 1.0);
    let (r, g, b) = if t < 0.5 {
        let s = 2.0 * t;
        (
            lerp(48.0, 255.0, s),
            lerp(86.0, 255.0, s),
            lerp(196.0, 255.0, s),
        )
    } else {
        let s = 2.0 * t - 1.0;
        (
            lerp(255.0, 196.0, s),
            lerp(255.0, 48.0, s),
            lerp(255.0, 42.0, s),
        )
    };
    format!(
        "#{:02x}{:02x}{:02x}",
        r.round() as u8,
        g.round() as u8,
        b.round() as u8
    )
}

fn lerp(a: f64, b: f64, t: f64) -> f64 {
    a + (b - a) * t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::structured_unit_square;

    #[test]
    fn two_triangle_square_renders_two_polygons() {
        let mesh = structured_unit_square(1);
        let svg = render_svg(&mesh, None);
        assert!(svg.starts_with("<svg "));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polygon").count(), 2);
    }

    #[test]
    fn absent_and_constant_fields_fill_uniformly() {
        let mesh = structured_unit_square(3);
        let flat = ScalarField::constant(7.5, mesh.n_vertices());
        let plain = render_svg(&mesh, None);
        assert_eq!(render_svg(&mesh, Some(&flat)), plain);
        let fills: std::collections::BTreeSet<&str> = plain
            .lines()
            .filter_map(|l| l.split("fill=\"").nth(1))
            .filter_map(|l| l.split('"').next())
            .collect();
        assert_eq!(fills.len(), 1);
    }

    #[test]
    fn a_varying_field_spans_the_color_map() {
        let mesh = structured_unit_square(4);
        let ramp = ScalarField::from_fn(&mesh, |x, _| x);
        let svg = render_svg(&mesh, Some(&ramp));
        let fills: std::collections::BTreeSet<&str> = svg
            .lines()
            .filter_map(|l| l.split("fill=\"").nth(1))
            .filter_map(|l| l.split('"').next())
            .collect();
        assert!(fills.len() > 2, "expected a range of fills, got {fills:?}");
        assert!(svg.contains(&diverging_color(0.0)));
        assert!(svg.contains(&diverging_color(1.0)));
    }

    #[test]
    fn rendering_is_deterministic() {
        let mesh = structured_unit_square(5);
        let field = ScalarField::from_fn(&mesh, |x, y| (x - 0.3) * y);
        let first = render_svg(&mesh, Some(&field));
        let second = render_svg(&mesh, Some(&field));
        assert_eq!(first, second);
    }
}
