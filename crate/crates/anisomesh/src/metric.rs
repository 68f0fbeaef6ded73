//! Monitor functions and metric normalization.
//!
//! A monitor function maps a vertex Hessian field to an SPD tensor field
//! whose shape encodes the desired element anisotropy. Normalization then
//! rescales the field so that its metric density integrates to the target
//! element budget. All monitors regularize |H| to 𝓗 = αI + |H| first, with
//! a flooring α that defaults to a small fraction of the field's largest
//! curvature.

use crate::fields::{TensorField, TensorRole};
use crate::geom::{self, Pt};
use crate::mesh::TriMesh;
use crate::tensor::SymTensor2;
use crate::{Error, Result};

/// The monitor families: the trace-weighted H¹ and det-weighted L² forms,
/// the same expressions without the anisotropy weight, and the classical
/// interpolation-theory shapes built on I + |H|/α.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MetricKind {
    NewH1,
    NewL2,
    ModifiedHessian,
    HuangH1,
    HuangL2,
}

impl MetricKind {
    pub const ALL: [MetricKind; 5] = [
        MetricKind::NewH1,
        MetricKind::NewL2,
        MetricKind::ModifiedHessian,
        MetricKind::HuangH1,
        MetricKind::HuangL2,
    ];

    /// The flooring parameter this kind consumes: α₀ for the L² family,
    /// α₁ otherwise.
    pub fn uses_alpha0(&self) -> bool {
        matches!(self, MetricKind::NewL2 | MetricKind::HuangL2)
    }
}

impl std::fmt::Display for MetricKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            MetricKind::NewH1 => "new-h1",
            MetricKind::NewL2 => "new-l2",
            MetricKind::ModifiedHessian => "mod-hessian",
            MetricKind::HuangH1 => "huang-h1",
            MetricKind::HuangL2 => "huang-l2",
        };
        f.write_str(name)
    }
}

impl std::str::FromStr for MetricKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "new-h1" => Ok(MetricKind::NewH1),
            "new-l2" => Ok(MetricKind::NewL2),
            "mod-hessian" => Ok(MetricKind::ModifiedHessian),
            "huang-h1" => Ok(MetricKind::HuangH1),
            "huang-l2" => Ok(MetricKind::HuangL2),
            other => Err(format!(
                "unknown metric kind {other:?}, expected one of new-h1, new-l2, mod-hessian, huang-h1, huang-l2"
            )),
        }
    }
}

/// Metric construction parameters. Flooring values left as `None` default to
/// `default_flooring` of the Hessian field at hand.
#[derive(Clone, Copy, Debug)]
pub struct MetricParams {
    pub kind: MetricKind,
    pub n_target: usize,
    pub alpha0: Option<f64>,
    pub alpha1: Option<f64>,
}

impl MetricParams {
    pub fn new(kind: MetricKind, n_target: usize) -> Self {
        Self {
            kind,
            n_target,
            alpha0: None,
            alpha1: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_target == 0 {
            return Err(Error::InvalidMesh("n_target must be at least 1".into()));
        }
        for alpha in [self.alpha0, self.alpha1].into_iter().flatten() {
            if !(alpha > 0.0) {
                return Err(Error::NonPositiveAlpha(alpha));
            }
        }
        Ok(())
    }

    /// The flooring value for this kind, explicit or derived from the field.
    pub fn resolve_alpha(&self, hessian: &TensorField) -> Result<f64> {
        let chosen = if self.kind.uses_alpha0() {
            self.alpha0
        } else {
            self.alpha1
        };
        match chosen {
            Some(alpha) if alpha > 0.0 => Ok(alpha),
            Some(alpha) => Err(Error::NonPositiveAlpha(alpha)),
            None => Ok(default_flooring(hessian)),
        }
    }
}

/// Default flooring: a millionth of the largest curvature magnitude in the
/// field, bounded away from zero. The floor only has to make degenerate
/// directions positive; anything larger inflates the metric density of flat
/// regions and starves the sharp features of their element share.
pub fn default_flooring(hessian: &TensorField) -> f64 {
    (1e-6 * hessian.max_spectral_radius()).max(1e-10)
}

/// Monitor with the anisotropy weight for the H¹ seminorm:
/// [tr(𝓗)/√det(𝓗)]^{1/2} 𝓗 with 𝓗 = α₁I + |H|.
pub fn monitor_new_h1(hessian: &TensorField, alpha1: f64) -> Result<TensorField> {
    map_monitor(hessian, alpha1, |reg| {
        let w = reg.anisotropy_factor()?;
        Ok(reg.scale(w))
    })
}

/// Monitor with the determinant weight for the L² norm:
/// det(𝓗)^{-1/6} 𝓗 with 𝓗 = α₀I + |H|.
pub fn monitor_new_l2(hessian: &TensorField, alpha0: f64) -> Result<TensorField> {
    map_monitor(hessian, alpha0, |reg| Ok(reg.scale(reg.det().powf(-1.0 / 6.0))))
}

/// The floored Hessian itself, the baseline without any anisotropy weight.
pub fn monitor_modified_hessian(hessian: &TensorField, alpha1: f64) -> Result<TensorField> {
    map_monitor(hessian, alpha1, Ok)
}

/// Classical H¹ shape I + |H|/α.
pub fn monitor_huang_h1(hessian: &TensorField, alpha: f64) -> Result<TensorField> {
    map_monitor(hessian, alpha, move |reg| Ok(reg.scale(1.0 / alpha)))
}

/// Classical L² shape det(I + |H|/α)^{-1/6} (I + |H|/α).
pub fn monitor_huang_l2(hessian: &TensorField, alpha: f64) -> Result<TensorField> {
    map_monitor(hessian, alpha, move |reg| {
        let shape = reg.scale(1.0 / alpha);
        Ok(shape.scale(shape.det().powf(-1.0 / 6.0)))
    })
}

/// Dispatch over the monitor kinds.
pub fn build_monitor(hessian: &TensorField, kind: MetricKind, alpha: f64) -> Result<TensorField> {
    match kind {
        MetricKind::NewH1 => monitor_new_h1(hessian, alpha),
        MetricKind::NewL2 => monitor_new_l2(hessian, alpha),
        MetricKind::ModifiedHessian => monitor_modified_hessian(hessian, alpha),
        MetricKind::HuangH1 => monitor_huang_h1(hessian, alpha),
        MetricKind::HuangL2 => monitor_huang_l2(hessian, alpha),
    }
}

fn map_monitor(
    hessian: &TensorField,
    alpha: f64,
    f: impl Fn(SymTensor2) -> Result<SymTensor2>,
) -> Result<TensorField> {
    let mut values = Vec::with_capacity(hessian.len());
    for h in &hessian.values {
        values.push(f(h.floor_regularize(alpha)?)?);
    }
    Ok(TensorField::new(values, TensorRole::Metric))
}

/// Rescale an SPD monitor field so its metric density integrates to
/// `n_target`: metric = (N/σ) M with σ = ∫ √det M, evaluated by the
/// vertex-averaged midpoint rule Σ_K |K| mean(√det M at the corners).
pub fn normalize_metric(monitor: &TensorField, mesh: &TriMesh, n_target: f64) -> Result<TensorField> {
    monitor.check_bound(mesh)?;
    if !(n_target > 0.0) {
        return Err(Error::InvalidMesh(format!(
            "normalization target must be positive, got {n_target}"
        )));
    }
    let mut density = Vec::with_capacity(monitor.len());
    for t in &monitor.values {
        if !t.is_spd() {
            let (l1, l2, _) = t.eig();
            return Err(Error::NotSpd(l1, l2));
        }
        density.push(t.det().sqrt());
    }
    let mut sigma = 0.0;
    for t in 0..mesh.n_triangles() {
        let [a, b, c] = mesh.triangle(t);
        let area = mesh.element_geometry(t).area;
        sigma += area * (density[a] + density[b] + density[c]) / 3.0;
    }
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::ZeroSigma);
    }
    let scale = n_target / sigma;
    Ok(TensorField::new(
        monitor.values.iter().map(|t| t.scale(scale)).collect(),
        TensorRole::Metric,
    ))
}

/// Evaluate a vertex tensor field at an arbitrary point by locating it and
/// interpolating entrywise; eigenvalues are clamped to a small positive
/// fraction of the local spectral radius to shield against round-off.
pub fn interpolate_metric(
    mesh: &TriMesh,
    field: &TensorField,
    p: Pt,
    hint: Option<usize>,
) -> Result<(SymTensor2, usize)> {
    field.check_bound(mesh)?;
    let loc = mesh.locate(p, hint)?;
    let tri = mesh.triangle(loc.triangle);
    let l = loc.barycentric;
    let mut t = SymTensor2::zero();
    for k in 0..3 {
        t = t.add(&field.values[tri[k]].scale(l[k]));
    }
    Ok((clamp_spd(t), loc.triangle))
}

/// Clamp eigenvalues from below at 1e-12 times the spectral radius.
fn clamp_spd(t: SymTensor2) -> SymTensor2 {
    let (l1, l2, angle) = t.eig();
    let floor = 1e-12 * l1.abs().max(l2.abs());
    if l2 >= floor {
        return t;
    }
    SymTensor2::from_eigen(l1.max(floor), l2.max(floor), angle)
}

/// Length of the segment [a, b] in the metric, by the endpoint average
/// ½(√(eᵀM(a)e) + √(eᵀM(b)e)).
pub fn metric_edge_length(mesh: &TriMesh, field: &TensorField, a: Pt, b: Pt) -> Result<f64> {
    let (ma, hint) = interpolate_metric(mesh, field, a, None)?;
    let (mb, _) = interpolate_metric(mesh, field, b, Some(hint))?;
    Ok(edge_length_between(&ma, &mb, a, b))
}

/// Endpoint-averaged metric length from already evaluated tensors.
pub fn edge_length_between(ma: &SymTensor2, mb: &SymTensor2, a: Pt, b: Pt) -> f64 {
    let e = geom::sub(b, a);
    0.5 * (ma.length(e) + mb.length(e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::structured_unit_square;
    use approx::assert_relative_eq;

    fn tensor_eq(a: &SymTensor2, b: &SymTensor2, tol: f64) {
        assert_relative_eq!(a.a11, b.a11, epsilon = tol, max_relative = tol);
        assert_relative_eq!(a.a12, b.a12, epsilon = tol, max_relative = tol);
        assert_relative_eq!(a.a22, b.a22, epsilon = tol, max_relative = tol);
    }

    fn single_tensor_field(h: SymTensor2) -> TensorField {
        TensorField::new(vec![h], TensorRole::Hessian)
    }

    #[test]
    fn new_h1_monitor_weights_by_anisotropy() {
        // H = diag(4, 1), α₁ = 1: 𝓗 = diag(5, 2), weight (7/√10)^{1/2}.
        let field = single_tensor_field(SymTensor2::diag(4.0, 1.0));
        let m = monitor_new_h1(&field, 1.0).unwrap();
        let w = (7.0 / 10f64.sqrt()).sqrt();
        tensor_eq(&m.values[0], &SymTensor2::diag(5.0 * w, 2.0 * w), 1e-14);
        assert_eq!(m.role, TensorRole::Metric);
    }

    #[test]
    fn new_l2_monitor_weights_by_determinant() {
        // 𝓗 = 4I: det^{-1/6} · 4I = 4^{2/3} I.
        let field = single_tensor_field(SymTensor2::diag(3.0, 3.0));
        let m = monitor_new_l2(&field, 1.0).unwrap();
        let expected = 4f64.powf(2.0 / 3.0);
        tensor_eq(&m.values[0], &SymTensor2::diag(expected, expected), 1e-14);
    }

    #[test]
    fn huang_monitors_match_closed_forms() {
        // |H| = α diag(3, 1): I + |H|/α = diag(4, 2).
        let alpha = 0.25;
        let field = single_tensor_field(SymTensor2::diag(3.0 * alpha, alpha));
        let h1 = monitor_huang_h1(&field, alpha).unwrap();
        tensor_eq(&h1.values[0], &SymTensor2::diag(4.0, 2.0), 1e-13);
        // det(diag(4, 2))^{-1/6} = 8^{-1/6} = 2^{-1/2}.
        let l2 = monitor_huang_l2(&field, alpha).unwrap();
        let w = 2f64.powf(-0.5);
        tensor_eq(&l2.values[0], &SymTensor2::diag(4.0 * w, 2.0 * w), 1e-13);
    }

    #[test]
    fn monitors_are_spd_for_indefinite_hessians() {
        let field = single_tensor_field(SymTensor2::new(2.0, 3.0, -1.0));
        for kind in MetricKind::ALL {
            let m = build_monitor(&field, kind, 0.5).unwrap();
            assert!(m.values[0].is_spd(), "{kind} produced a non-SPD monitor");
        }
        for kind in MetricKind::ALL {
            assert!(build_monitor(&field, kind, 0.0).is_err());
        }
    }

    #[test]
    fn default_flooring_tracks_field_magnitude() {
        let field = TensorField::new(
            vec![SymTensor2::diag(2.0, -1.0), SymTensor2::diag(0.0, 1e9)],
            TensorRole::Hessian,
        );
        assert_relative_eq!(default_flooring(&field), 1e3);
        let tiny = single_tensor_field(SymTensor2::diag(1e-9, 0.0));
        assert_relative_eq!(default_flooring(&tiny), 1e-10);
    }

    #[test]
    fn normalize_identity_on_unit_square() {
        let mesh = structured_unit_square(4);
        let monitor = TensorField::new(
            vec![SymTensor2::identity(); mesh.n_vertices()],
            TensorRole::Metric,
        );
        let metric = normalize_metric(&monitor, &mesh, 100.0).unwrap();
        for t in &metric.values {
            tensor_eq(t, &SymTensor2::diag(100.0, 100.0), 1e-12);
        }
    }

    #[test]
    fn normalize_is_scale_invariant() {
        let mesh = structured_unit_square(3);
        let base = TensorField::from_fn(&mesh, TensorRole::Metric, |x, y| {
            SymTensor2::new(1.0 + x, 0.2 * x * y, 2.0 + y)
        });
        let reference = normalize_metric(&base, &mesh, 500.0).unwrap();
        for c in [1e-3, 7.3, 1e3] {
            let scaled = TensorField::new(
                base.values.iter().map(|t| t.scale(c)).collect(),
                TensorRole::Metric,
            );
            let metric = normalize_metric(&scaled, &mesh, 500.0).unwrap();
            for (a, b) in metric.values.iter().zip(&reference.values) {
                tensor_eq(a, b, 1e-10);
            }
        }
    }

    #[test]
    fn normalize_rejects_bad_input() {
        let mesh = structured_unit_square(2);
        let indefinite = TensorField::new(
            vec![SymTensor2::diag(1.0, -1.0); mesh.n_vertices()],
            TensorRole::Metric,
        );
        assert!(matches!(
            normalize_metric(&indefinite, &mesh, 100.0),
            Err(Error::NotSpd(..))
        ));
        // Determinant underflow reads as loss of definiteness, overflow as a
        // density the midpoint rule cannot integrate.
        let underflow = TensorField::new(
            vec![SymTensor2::diag(1e-300, 1e-300); mesh.n_vertices()],
            TensorRole::Metric,
        );
        assert!(matches!(
            normalize_metric(&underflow, &mesh, 100.0),
            Err(Error::NotSpd(..))
        ));
        let overflow = TensorField::new(
            vec![SymTensor2::diag(1e200, 1e200); mesh.n_vertices()],
            TensorRole::Metric,
        );
        assert!(matches!(
            normalize_metric(&overflow, &mesh, 100.0),
            Err(Error::ZeroSigma)
        ));
        let short = TensorField::new(vec![SymTensor2::identity()], TensorRole::Metric);
        assert!(matches!(
            normalize_metric(&short, &mesh, 100.0),
            Err(Error::FieldSizeMismatch { .. })
        ));
    }

    #[test]
    fn interpolation_is_entrywise_linear() {
        let mesh = structured_unit_square(2);
        let field = TensorField::from_fn(&mesh, TensorRole::Metric, |x, y| {
            SymTensor2::new(1.0 + x + 2.0 * y, 0.5 * x, 3.0 - y)
        });
        let p = [0.3, 0.4];
        let (t, _) = interpolate_metric(&mesh, &field, p, None).unwrap();
        tensor_eq(
            &t,
            &SymTensor2::new(1.0 + 0.3 + 0.8, 0.15, 2.6),
            1e-12,
        );
        assert!(interpolate_metric(&mesh, &field, [3.0, 0.0], None).is_err());
    }

    #[test]
    fn edge_length_endpoint_average() {
        let mesh = structured_unit_square(1);
        let mut values = vec![SymTensor2::identity(); mesh.n_vertices()];
        // Vertex 1 sits at (1, 0).
        values[1] = SymTensor2::diag(9.0, 9.0);
        let field = TensorField::new(values, TensorRole::Metric);
        let l = metric_edge_length(&mesh, &field, [0.0, 0.0], [1.0, 0.0]).unwrap();
        assert_relative_eq!(l, 2.0, max_relative = 1e-12);
    }
}
