//! Gaussian quadrature on triangles via the Duffy transform.
//!
//! A tensor-product Gauss-Legendre rule on the unit square is mapped onto the
//! reference triangle by (x, y) = (s, t(1-s)) with Jacobian (1-s). An n-by-n
//! product rule integrates the transformed integrand exactly when 2n-1 covers
//! its degree, which is one higher in s than the original polynomial degree,
//! so n points per axis give triangle exactness of degree 2n-2.

use crate::geom::Pt;
use std::sync::OnceLock;

/// A fixed quadrature rule on the reference triangle, stored in barycentric
/// coordinates with weights normalized to sum to one.
#[derive(Clone, Debug)]
pub struct TriRule {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

/// Gauss-Legendre nodes and weights on [0, 1], in closed form.
fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    match n {
        3 => {
            let r = (0.6f64).sqrt();
            let nodes = vec![0.5 * (1.0 - r), 0.5, 0.5 * (1.0 + r)];
            let weights = vec![5.0 / 18.0, 4.0 / 9.0, 5.0 / 18.0];
            (nodes, weights)
        }
        4 => {
            let q = 2.0 * (1.2f64).sqrt();
            let r_in = ((3.0 - q) / 7.0).sqrt();
            let r_out = ((3.0 + q) / 7.0).sqrt();
            let s30 = (30.0f64).sqrt();
            let w_in = (18.0 + s30) / 72.0;
            let w_out = (18.0 - s30) / 72.0;
            let nodes = vec![
                0.5 * (1.0 - r_out),
                0.5 * (1.0 - r_in),
                0.5 * (1.0 + r_in),
                0.5 * (1.0 + r_out),
            ];
            let weights = vec![w_out, w_in, w_in, w_out];
            (nodes, weights)
        }
        _ => unreachable!("only the 3 and 4 point axes are used"),
    }
}

fn duffy_rule(n: usize) -> TriRule {
    let (nodes, weights) = gauss_legendre_unit(n);
    let mut points = Vec::with_capacity(n * n);
    let mut w = Vec::with_capacity(n * n);
    for (i, &s) in nodes.iter().enumerate() {
        for (j, &t) in nodes.iter().enumerate() {
            let x = s;
            let y = t * (1.0 - s);
            points.push([1.0 - x - y, x, y]);
            w.push(2.0 * weights[i] * weights[j] * (1.0 - s));
        }
    }
    TriRule { points, weights: w }
}

/// Symmetrize a rule over the six barycentric permutations.
fn symmetrize(rule: &TriRule) -> TriRule {
    const PERMS: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let mut points = Vec::with_capacity(6 * rule.points.len());
    let mut weights = Vec::with_capacity(6 * rule.points.len());
    for (p, &w) in rule.points.iter().zip(&rule.weights) {
        for perm in PERMS {
            points.push([p[perm[0]], p[perm[1]], p[perm[2]]]);
            weights.push(w / 6.0);
        }
    }
    TriRule { points, weights }
}

impl TriRule {
    /// 9-point rule, exact for polynomials of degree 4.
    pub fn degree4() -> &'static TriRule {
        static RULE: OnceLock<TriRule> = OnceLock::new();
        RULE.get_or_init(|| duffy_rule(3))
    }

    /// 16-point rule, exact for polynomials of degree 6.
    pub fn degree6() -> &'static TriRule {
        static RULE: OnceLock<TriRule> = OnceLock::new();
        RULE.get_or_init(|| duffy_rule(4))
    }

    /// 96-point fully symmetric rule of degree 6, used as the independent
    /// reference rule when cross-checking closed-form error expressions.
    pub fn degree6_symmetric() -> &'static TriRule {
        static RULE: OnceLock<TriRule> = OnceLock::new();
        RULE.get_or_init(|| symmetrize(&duffy_rule(4)))
    }

    /// Integrate `f` over the triangle (a, b, c); `f` receives the physical
    /// point and its barycentric coordinates.
    pub fn integrate(&self, a: Pt, b: Pt, c: Pt, mut f: impl FnMut(Pt, [f64; 3]) -> f64) -> f64 {
        let area = crate::geom::signed_area(a, b, c).abs();
        let mut sum = 0.0;
        for (p, &w) in self.points.iter().zip(&self.weights) {
            let x = [
                p[0] * a[0] + p[1] * b[0] + p[2] * c[0],
                p[0] * a[1] + p[1] * b[1] + p[2] * c[1],
            ];
            sum += w * f(x, *p);
        }
        area * sum
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Exact integral of x^a y^b over the reference triangle.
    fn monomial_exact(a: u32, b: u32) -> f64 {
        let fact = |n: u32| (1..=n).map(|k| k as f64).product::<f64>();
        fact(a) * fact(b) / fact(a + b + 2)
    }

    fn check_exactness(rule: &TriRule, degree: u32) {
        let o = [0.0, 0.0];
        let ex = [1.0, 0.0];
        let ey = [0.0, 1.0];
        for a in 0..=degree {
            for b in 0..=(degree - a) {
                let got = rule.integrate(o, ex, ey, |p, _| p[0].powi(a as i32) * p[1].powi(b as i32));
                assert_relative_eq!(got, monomial_exact(a, b), max_relative = 1e-13);
            }
        }
    }

    #[test]
    fn weights_are_positive_and_normalized() {
        for rule in [TriRule::degree4(), TriRule::degree6(), TriRule::degree6_symmetric()] {
            assert!(rule.weights.iter().all(|&w| w > 0.0));
            let total: f64 = rule.weights.iter().sum();
            assert_relative_eq!(total, 1.0, epsilon = 1e-14);
            for p in &rule.points {
                assert_relative_eq!(p[0] + p[1] + p[2], 1.0, epsilon = 1e-14);
                assert!(p.iter().all(|&l| l >= 0.0));
            }
        }
    }

    #[test]
    fn degree4_rule_is_exact_to_degree4() {
        check_exactness(TriRule::degree4(), 4);
    }

    #[test]
    fn degree6_rules_are_exact_to_degree6() {
        check_exactness(TriRule::degree6(), 6);
        check_exactness(TriRule::degree6_symmetric(), 6);
    }

    #[test]
    fn integrates_on_mapped_triangles() {
        // Affine invariance: degree-2 polynomial on a skewed triangle.
        let a = [1.0, 2.0];
        let b = [4.0, 2.5];
        let c = [2.0, 5.0];
        let got = TriRule::degree4().integrate(a, b, c, |p, _| p[0] * p[0] + p[0] * p[1]);
        // Reference: integrate via barycentric expansion with the exact
        // monomial table, mapping x = sum l_i x_i.
        let exact = TriRule::degree6().integrate(a, b, c, |p, _| p[0] * p[0] + p[0] * p[1]);
        assert_relative_eq!(got, exact, max_relative = 1e-13);
    }

    #[test]
    fn symmetric_rule_is_permutation_invariant() {
        let rule = TriRule::degree6_symmetric();
        let a = [0.0, 0.0];
        let b = [2.0, 0.3];
        let c = [0.5, 1.7];
        let f = |p: Pt, _: [f64; 3]| (1.3 * p[0] - 0.2 * p[1]).powi(5);
        let i1 = rule.integrate(a, b, c, f);
        let i2 = rule.integrate(b, c, a, f);
        let i3 = rule.integrate(c, b, a, f);
        assert_relative_eq!(i1, i2, max_relative = 1e-14);
        assert_relative_eq!(i1, i3, max_relative = 1e-14);
    }
}
