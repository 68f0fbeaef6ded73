//! Solution transfer between meshes of the same domain.

use super::locate::LOCATE_TOL;
use super::TriMesh;
use crate::fields::ScalarField;
use crate::geom::{self, Pt};
use crate::{Error, Result};

/// Interpolate a vertex field from `old_mesh` onto the vertices of
/// `new_mesh`. New vertices that fall marginally outside the old mesh by
/// boundary round-off are projected onto the nearest old boundary edge; the
/// projection distance may not exceed the location tolerance.
pub fn transfer_field(
    field: &ScalarField,
    old_mesh: &TriMesh,
    new_mesh: &TriMesh,
) -> Result<ScalarField> {
    field.check_bound(old_mesh)?;
    let mut values = Vec::with_capacity(new_mesh.n_vertices());
    let mut hint = None;
    for &p in new_mesh.vertices() {
        let loc = match old_mesh.locate(p, hint) {
            Ok(loc) => loc,
            Err(Error::PointOutsideDomain(..)) => {
                let q = project_to_boundary(old_mesh, p)?;
                old_mesh.locate(q, hint)?
            }
            Err(e) => return Err(e),
        };
        let tri = old_mesh.triangle(loc.triangle);
        let l = loc.barycentric;
        values.push(
            l[0] * field.values[tri[0]] + l[1] * field.values[tri[1]] + l[2] * field.values[tri[2]],
        );
        hint = Some(loc.triangle);
    }
    Ok(ScalarField::new(values))
}

/// Project `p` onto the closest boundary edge of `mesh`, failing when the
/// distance exceeds the location tolerance scaled by the mesh diameter.
pub(crate) fn project_to_boundary(mesh: &TriMesh, p: Pt) -> Result<Pt> {
    let mut best: Option<(f64, Pt)> = None;
    for &([a, b], _) in mesh.boundary_edges() {
        let q = geom::project_to_segment(p, mesh.vertex(a), mesh.vertex(b));
        let d = geom::dist(p, q);
        if best.map_or(true, |(bd, _)| d < bd) {
            best = Some((d, q));
        }
    }
    match best {
        Some((d, q)) if d <= LOCATE_TOL * mesh.diameter() => Ok(q),
        _ => Err(Error::PointOutsideDomain(p[0], p[1])),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::structured_unit_square;
    use approx::assert_relative_eq;

    #[test]
    fn transfer_is_exact_for_linear_fields() {
        let coarse = structured_unit_square(3);
        let fine = structured_unit_square(7);
        let f = ScalarField::from_fn(&coarse, |x, y| 2.0 * x - 0.5 * y + 1.0);
        let g = transfer_field(&f, &coarse, &fine).unwrap();
        for (v, &p) in fine.vertices().iter().enumerate() {
            assert_relative_eq!(
                g.values[v],
                2.0 * p[0] - 0.5 * p[1] + 1.0,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn transfer_error_is_second_order_for_quadratics() {
        // u = x² on a mesh of element diameter h interpolates with error at
        // most h²/4 at the midpoints introduced by uniform refinement.
        let coarse = structured_unit_square(4);
        let fine = structured_unit_square(8);
        let h = (0..coarse.n_triangles())
            .map(|t| coarse.element_geometry(t).diameter())
            .fold(0.0, f64::max);
        let f = ScalarField::from_fn(&coarse, |x, _| x * x);
        let g = transfer_field(&f, &coarse, &fine).unwrap();
        for (v, &p) in fine.vertices().iter().enumerate() {
            let err = (g.values[v] - p[0] * p[0]).abs();
            assert!(
                err <= h * h / 4.0 + 1e-14,
                "error {err} exceeds bound at {p:?}"
            );
        }
    }

    #[test]
    fn transfer_rejects_size_mismatch() {
        let coarse = structured_unit_square(2);
        let fine = structured_unit_square(3);
        let bad = ScalarField::constant(1.0, 5);
        assert!(matches!(
            transfer_field(&bad, &coarse, &fine),
            Err(Error::FieldSizeMismatch { .. })
        ));
    }

    #[test]
    fn boundary_roundoff_is_projected() {
        let mesh = structured_unit_square(2);
        let p = [0.5, 1.0 + 0.5e-10 * mesh.diameter()];
        let q = project_to_boundary(&mesh, p).unwrap();
        assert_relative_eq!(q[1], 1.0);
        assert!(project_to_boundary(&mesh, [0.5, 1.1]).is_err());
    }
}
