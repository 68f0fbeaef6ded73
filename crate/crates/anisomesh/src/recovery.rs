//! Nodal derivative recovery from piecewise linear fields.
//!
//! The gradient of a P1 field is constant per element; averaging those
//! constants over each vertex patch, weighted by element area, yields a
//! nodal gradient that is one order more accurate at interior vertices of
//! reasonably structured patches. Applying the same averaging to each
//! recovered gradient component produces a nodal Hessian, the input for
//! the metric construction and for the H² error measure.

use crate::fem::element_gradient;
use crate::fem::ProblemSpec;
use crate::fields::{ScalarField, TensorField, TensorRole, VectorField};
use crate::mesh::TriMesh;
use crate::quadrature::TriRule;
use crate::tensor::SymTensor2;
use crate::{Error, Result};

/// Recover a nodal gradient by area-weighted averaging of the element
/// gradients incident to each vertex. Boundary vertices use their one-sided
/// patch unchanged.
pub fn zz_gradient(field: &ScalarField, mesh: &TriMesh) -> Result<VectorField> {
    field.check_bound(mesh)?;
    let grads: Vec<[f64; 2]> = (0..mesh.n_triangles())
        .map(|t| element_gradient(field, mesh, t))
        .collect();
    let areas: Vec<f64> = (0..mesh.n_triangles())
        .map(|t| mesh.element_geometry(t).area)
        .collect();

    let mut values = vec![[0.0; 2]; mesh.n_vertices()];
    for (v, patch) in mesh.vertex_incidence().iter().enumerate() {
        let mut sum = [0.0, 0.0];
        let mut weight = 0.0;
        for &t in patch {
            sum[0] += areas[t] * grads[t][0];
            sum[1] += areas[t] * grads[t][1];
            weight += areas[t];
        }
        values[v] = [sum[0] / weight, sum[1] / weight];
    }
    Ok(VectorField { values })
}

/// Recover a nodal Hessian by applying gradient recovery twice and
/// symmetrizing the mixed derivative.
pub fn recover_hessian(field: &ScalarField, mesh: &TriMesh) -> Result<TensorField> {
    let (gx, gy) = zz_gradient(field, mesh)?.components();
    let hx = zz_gradient(&gx, mesh)?;
    let hy = zz_gradient(&gy, mesh)?;
    let values = hx
        .values
        .iter()
        .zip(&hy.values)
        .map(|(rx, ry)| SymTensor2::new(rx[0], 0.5 * (rx[1] + ry[0]), ry[1]))
        .collect();
    Ok(TensorField {
        values,
        role: TensorRole::Hessian,
    })
}

/// H² seminorm distance between the exact Hessian of the problem and a
/// recovered nodal Hessian, interpolated linearly per element and integrated
/// with the degree-4 rule.
pub fn h2_error(recovered: &TensorField, problem: &ProblemSpec, mesh: &TriMesh) -> Result<f64> {
    recovered.check_bound(mesh)?;
    let exact = problem
        .exact_hessian
        .as_ref()
        .ok_or(Error::MissingExact("hessian"))?;
    let rule = TriRule::degree4();
    let mut total = 0.0;
    for t in 0..mesh.n_triangles() {
        let tri = mesh.triangle(t);
        let [a, b, c] = mesh.triangle_points(t);
        let h = [
            recovered.values[tri[0]],
            recovered.values[tri[1]],
            recovered.values[tri[2]],
        ];
        total += rule.integrate(a, b, c, |x, bary| {
            let hr = h[0]
                .scale(bary[0])
                .add(&h[1].scale(bary[1]))
                .add(&h[2].scale(bary[2]));
            exact(x[0], x[1]).add(&hr.scale(-1.0)).frobenius_sq()
        });
    }
    Ok(total.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::structured_unit_square;
    use approx::assert_relative_eq;

    fn deviation(t: &SymTensor2, hxx: f64, hxy: f64, hyy: f64) -> f64 {
        (t.a11 - hxx)
            .abs()
            .max((t.a12 - hxy).abs())
            .max((t.a22 - hyy).abs())
    }

    #[test]
    fn gradient_of_affine_field_is_exact() {
        let mesh = structured_unit_square(5);
        let u = ScalarField::from_fn(&mesh, |x, y| x + 2.0 * y);
        let g = zz_gradient(&u, &mesh).unwrap();
        for v in &g.values {
            assert_relative_eq!(v[0], 1.0, epsilon = 1e-13);
            assert_relative_eq!(v[1], 2.0, epsilon = 1e-13);
        }
        let c = ScalarField::constant(7.5, mesh.n_vertices());
        for v in &zz_gradient(&c, &mesh).unwrap().values {
            assert_eq!(*v, [0.0, 0.0]);
        }
    }

    #[test]
    fn gradient_of_quadratic_is_exact_at_symmetric_interior_vertices() {
        let mesh = structured_unit_square(4);
        let u = ScalarField::from_fn(&mesh, |x, _| x * x);
        let g = zz_gradient(&u, &mesh).unwrap();
        for (v, p) in mesh.vertices().iter().enumerate() {
            if mesh.vertex_kind(v).is_boundary() {
                continue;
            }
            assert_relative_eq!(g.values[v][0], 2.0 * p[0], epsilon = 1e-12);
            assert_relative_eq!(g.values[v][1], 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn recovery_is_linear_in_the_field() {
        let mesh = structured_unit_square(6);
        let u = ScalarField::from_fn(&mesh, |x, y| (3.0 * x).sin() * y);
        let v = ScalarField::from_fn(&mesh, |x, y| x * x - y.exp());
        let combo = ScalarField::new(
            u.values
                .iter()
                .zip(&v.values)
                .map(|(a, b)| 2.5 * a - 0.75 * b)
                .collect(),
        );
        let gu = zz_gradient(&u, &mesh).unwrap();
        let gv = zz_gradient(&v, &mesh).unwrap();
        let gc = zz_gradient(&combo, &mesh).unwrap();
        for i in 0..gc.values.len() {
            for d in 0..2 {
                let expect = 2.5 * gu.values[i][d] - 0.75 * gv.values[i][d];
                assert_relative_eq!(gc.values[i][d], expect, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn hessian_of_affine_field_vanishes() {
        let mesh = structured_unit_square(4);
        let u = ScalarField::from_fn(&mesh, |x, y| 4.0 * x - y + 2.0);
        let h = recover_hessian(&u, &mesh).unwrap();
        assert!(matches!(h.role, TensorRole::Hessian));
        for t in &h.values {
            assert!(t.spectral_radius() < 1e-12);
        }
    }

    #[test]
    fn hessian_of_quadratic_converges_at_interior_vertices() {
        // Recovered curvature of x² + 3y² is exact two layers inside the
        // boundary. The first interior ring inherits an order-one bias from
        // the one-sided boundary patches, but that ring thins out under
        // refinement, so the mean interior deviation decays at first order.
        let mut means = Vec::new();
        for n in [8_usize, 16, 32] {
            let mesh = structured_unit_square(n);
            let u = ScalarField::from_fn(&mesh, |x, y| x * x + 3.0 * y * y);
            let h = recover_hessian(&u, &mesh).unwrap();
            let spacing = 1.0 / n as f64;
            let mut sum = 0.0;
            let mut count = 0usize;
            for (v, p) in mesh.vertices().iter().enumerate() {
                if mesh.vertex_kind(v).is_boundary() {
                    continue;
                }
                let d = deviation(&h.values[v], 2.0, 0.0, 6.0);
                sum += d;
                count += 1;
                let margin = p[0]
                    .min(p[1])
                    .min(1.0 - p[0])
                    .min(1.0 - p[1]);
                if margin > 1.5 * spacing {
                    assert!(d < 1e-10, "second-ring vertex {v} deviates by {d}");
                }
            }
            means.push(sum / count as f64);
        }
        for w in means.windows(2) {
            assert!(
                w[1] <= w[0] / 1.8,
                "mean deviations {means:?} do not shrink at first order"
            );
        }
    }

    #[test]
    fn h2_error_measures_constant_offsets_exactly() {
        let mesh = structured_unit_square(3);
        let mut problem = ProblemSpec::new(1.0, [0.0, 0.0], |_, _| 0.0);
        problem.exact_hessian = Some(Box::new(|_, _| SymTensor2::diag(2.0, 6.0)));

        let exact_field = TensorField {
            values: vec![SymTensor2::diag(2.0, 6.0); mesh.n_vertices()],
            role: TensorRole::Hessian,
        };
        assert_relative_eq!(
            h2_error(&exact_field, &problem, &mesh).unwrap(),
            0.0,
            epsilon = 1e-13
        );

        // Offset by E = [[1, 2], [2, 0]]: ‖E‖_F = 3 on the unit square.
        let offset_field = TensorField {
            values: vec![SymTensor2::new(3.0, 2.0, 6.0); mesh.n_vertices()],
            role: TensorRole::Hessian,
        };
        assert_relative_eq!(
            h2_error(&offset_field, &problem, &mesh).unwrap(),
            3.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn h2_error_requires_exact_hessian() {
        let mesh = structured_unit_square(2);
        let problem = ProblemSpec::new(1.0, [0.0, 0.0], |_, _| 0.0);
        let field = TensorField {
            values: vec![SymTensor2::zero(); mesh.n_vertices()],
            role: TensorRole::Hessian,
        };
        assert!(matches!(
            h2_error(&field, &problem, &mesh),
            Err(Error::MissingExact("hessian"))
        ));
    }
}
