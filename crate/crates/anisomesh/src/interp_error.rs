//! Exact interpolation error of quadratics on a triangle.
//!
//! For u with constant Hessian H and its linear vertex interpolant u_I, the
//! L² norm and H¹ seminorm of u - u_I on a triangle have closed forms in the
//! edge vectors alone. Two independent H¹ expressions and one L² expression
//! are implemented, together with a brute-force quadrature oracle used to
//! cross-check all of them on random inputs.

use crate::fields::TensorField;
use crate::geom::{self, Pt};
use crate::mesh::{ElementGeometry, TriMesh, DEGENERATE_REL};
use crate::quadrature::TriRule;
use crate::tensor::SymTensor2;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Which norm of the interpolation error to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorNorm {
    L2,
    H1,
}

/// Brute-force reference value: builds u(x) = ½ xᵀHx around the centroid,
/// interpolates it linearly through the vertex values, and integrates the
/// squared error (or squared gradient error) with a symmetric rule exact to
/// degree 6. Entirely independent of the closed forms below.
pub fn oracle_interp_error(h: &SymTensor2, tri: [Pt; 3], norm: ErrorNorm) -> f64 {
    let centroid = [
        (tri[0][0] + tri[1][0] + tri[2][0]) / 3.0,
        (tri[0][1] + tri[1][1] + tri[2][1]) / 3.0,
    ];
    let u = |p: Pt| 0.5 * h.quad_form(geom::sub(p, centroid));
    let vals = [u(tri[0]), u(tri[1]), u(tri[2])];

    let rule = TriRule::degree6_symmetric();
    let sq = match norm {
        ErrorNorm::L2 => rule.integrate(tri[0], tri[1], tri[2], |p, bary| {
            let ui = bary[0] * vals[0] + bary[1] * vals[1] + bary[2] * vals[2];
            let e = u(p) - ui;
            e * e
        }),
        ErrorNorm::H1 => {
            // Constant interpolant gradient from the P1 basis gradients.
            let area2 = 2.0 * geom::signed_area(tri[0], tri[1], tri[2]);
            let mut gi = [0.0, 0.0];
            for i in 0..3 {
                let j = (i + 1) % 3;
                let k = (i + 2) % 3;
                gi[0] += vals[i] * (tri[j][1] - tri[k][1]) / area2;
                gi[1] += vals[i] * (tri[k][0] - tri[j][0]) / area2;
            }
            rule.integrate(tri[0], tri[1], tri[2], |p, _| {
                let g = h.apply(geom::sub(p, centroid));
                let dx = g[0] - gi[0];
                let dy = g[1] - gi[1];
                dx * dx + dy * dy
            })
        }
    };
    sq.max(0.0).sqrt()
}

fn check_not_degenerate(geo: &ElementGeometry) -> Result<f64> {
    let area = geo.area.abs();
    let diam = geo.diameter();
    if area <= DEGENERATE_REL * diam * diam {
        return Err(Error::DegenerateTriangle {
            index: 0,
            area: geo.area,
        });
    }
    Ok(area)
}

/// Exact H¹ seminorm of the linear interpolation error of a quadratic with
/// Hessian `h`: the edge-sum form
/// |e|² = 1/(48|K|) Σᵢ (ℓᵢ₊₁ᵀ H ℓᵢ₊₂)² |ℓᵢ|².
pub fn h1_error_thm21(h: &SymTensor2, geo: &ElementGeometry) -> Result<f64> {
    let area = check_not_degenerate(geo)?;
    let l = &geo.edges;
    let mut sum = 0.0;
    for i in 0..3 {
        let cross = geom::dot(l[(i + 1) % 3], h.apply(l[(i + 2) % 3]));
        sum += cross * cross * geom::dot(l[i], l[i]);
    }
    Ok((sum / (48.0 * area)).sqrt())
}

/// The same H¹ seminorm in quadratic-form shape: ¼ vᵀBv with
/// vᵢ = ℓᵢᵀHℓᵢ, B = 1/(48|K|) [S on the diagonal, 2ℓᵢ·ℓⱼ off it],
/// S = Σ|ℓⱼ|². Algebraically identical to the edge-sum form; kept as an
/// independent implementation path.
pub fn h1_error_bank_smith(h: &SymTensor2, geo: &ElementGeometry) -> Result<f64> {
    let area = check_not_degenerate(geo)?;
    let l = &geo.edges;
    let d = [
        h.quad_form(l[0]),
        h.quad_form(l[1]),
        h.quad_form(l[2]),
    ];
    let s: f64 = geo.edge_lengths.iter().map(|x| x * x).sum();
    let mut quad = 0.0;
    for i in 0..3 {
        quad += s * d[i] * d[i];
        for j in 0..3 {
            if i != j {
                quad += 2.0 * geom::dot(l[i], l[j]) * d[i] * d[j];
            }
        }
    }
    Ok((quad / (4.0 * 48.0 * area)).sqrt())
}

/// Exact L² norm of the linear interpolation error of a quadratic with
/// Hessian `h`: with dᵢ = ½ ℓᵢᵀHℓᵢ,
/// ‖e‖² = |K|/180 [ (Σdᵢ)² + Σdᵢ² ].
pub fn l2_error_nadler(h: &SymTensor2, geo: &ElementGeometry) -> Result<f64> {
    let area = check_not_degenerate(geo)?;
    let d = [
        0.5 * h.quad_form(geo.edges[0]),
        0.5 * h.quad_form(geo.edges[1]),
        0.5 * h.quad_form(geo.edges[2]),
    ];
    let sum = d[0] + d[1] + d[2];
    let sq = area / 180.0 * (sum * sum + d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
    Ok(sq.max(0.0).sqrt())
}

/// Global a posteriori H¹ error estimate driven by a vertex Hessian field:
/// η² = Σ_K e_K² where e_K uses the vertex-averaged Hessian on K. Returns η
/// and the per-element contributions e_K².
pub fn eta_global(hessian: &TensorField, mesh: &TriMesh) -> Result<(f64, Vec<f64>)> {
    hessian.check_bound(mesh)?;
    let mut per_element = Vec::with_capacity(mesh.n_triangles());
    let mut total = 0.0;
    for t in 0..mesh.n_triangles() {
        let [a, b, c] = mesh.triangle(t);
        let h = hessian.values[a]
            .add(&hessian.values[b])
            .add(&hessian.values[c])
            .scale(1.0 / 3.0);
        let geo = mesh.element_geometry(t);
        let e = h1_error_thm21(&h, &geo).map_err(|err| match err {
            Error::DegenerateTriangle { area, .. } => Error::DegenerateTriangle { index: t, area },
            other => other,
        })?;
        per_element.push(e * e);
        total += e * e;
    }
    Ok((total.sqrt(), per_element))
}

/// Worst relative deviations between the closed forms and the oracle over
/// random (Hessian, triangle) pairs with aspect ratios up to 10³.
#[derive(Clone, Copy, Debug, Default)]
pub struct FormulaDeviation {
    /// Edge-sum form against quadratic-form shape, H¹.
    pub h1_forms: f64,
    /// Edge-sum form against the quadrature oracle, H¹.
    pub h1_oracle: f64,
    /// L² closed form against the quadrature oracle.
    pub l2_oracle: f64,
}

impl FormulaDeviation {
    pub fn max(&self) -> f64 {
        self.h1_forms.max(self.h1_oracle).max(self.l2_oracle)
    }
}

/// Run `trials` random cross-checks of all error formulas; deterministic in
/// `seed`. Triangles are anisotropically scaled, rotated and translated
/// copies of the unit equilateral triangle with aspect ratio up to 10³.
pub fn equivalence_check(trials: usize, seed: u64) -> FormulaDeviation {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dev = FormulaDeviation::default();
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
    for _ in 0..trials {
        let (h, tri) = random_trial(&mut rng);
        let geo = ElementGeometry::new(tri[0], tri[1], tri[2]);
        let thm = h1_error_thm21(&h, &geo).expect("sampled triangles are non-degenerate");
        let bs = h1_error_bank_smith(&h, &geo).expect("sampled triangles are non-degenerate");
        let nad = l2_error_nadler(&h, &geo).expect("sampled triangles are non-degenerate");
        let oh1 = oracle_interp_error(&h, tri, ErrorNorm::H1);
        let ol2 = oracle_interp_error(&h, tri, ErrorNorm::L2);
        dev.h1_forms = dev.h1_forms.max(rel(thm, bs));
        dev.h1_oracle = dev.h1_oracle.max(rel(thm, oh1));
        dev.l2_oracle = dev.l2_oracle.max(rel(nad, ol2));
    }
    dev
}

fn random_trial(rng: &mut ChaCha8Rng) -> (SymTensor2, [Pt; 3]) {
    let h = SymTensor2::new(
        rng.gen_range(-5.0..5.0),
        rng.gen_range(-5.0..5.0),
        rng.gen_range(-5.0..5.0),
    );
    // Unit equilateral triangle, squeezed to the sampled aspect ratio,
    // scaled, rotated, translated.
    let aspect = 10f64.powf(rng.gen_range(0.0..3.0));
    let size = 10f64.powf(rng.gen_range(-2.0..1.0));
    let (s, c) = rng.gen_range(0.0..std::f64::consts::TAU).sin_cos();
    let shift = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
    let base = [
        [0.0, 0.0],
        [1.0, 0.0],
        [0.5, 3f64.sqrt() / 2.0],
    ];
    let mut tri = [[0.0; 2]; 3];
    for (out, p) in tri.iter_mut().zip(base) {
        let q = [p[0] * size, p[1] * size / aspect];
        *out = [
            c * q[0] - s * q[1] + shift[0],
            s * q[0] + c * q[1] + shift[1],
        ];
    }
    (h, tri)
}
