//! The three benchmark problems on the unit square, with their exact
//! solutions, gradients, and Hessians.
//!
//! All three solutions form boundary layers whose width is set by a single
//! parameter, which makes them the standard stress tests for anisotropic
//! adaptation: the first is a one-dimensional convection-diffusion layer,
//! the second an exponential layer of a Poisson solution, the third a pair
//! of corner layers of different strengths.

use crate::fem::ProblemSpec;
use crate::tensor::SymTensor2;
use crate::{Error, Result};

/// Convection-diffusion layer: -κΔu + ∂u/∂x = 0 with u = 0 on the left
/// side, u = 1 on the right, and zero flux through top and bottom. The
/// solution depends on x alone and climbs from 0 to 1 inside a layer of
/// width κ at x = 1.
///
/// The textbook closed form (1 - e^{x/κ})/(1 - e^{1/κ}) overflows for small
/// κ; multiplying through by e^{-1/κ} gives the stable equivalent used here.
pub fn convection_layer(kappa: f64) -> Result<ProblemSpec> {
    if !(kappa > 0.0) {
        return Err(Error::InvalidProblem(format!(
            "layer width must be positive, got {kappa}"
        )));
    }
    let denom = 1.0 - (-1.0 / kappa).exp();
    let mut p = ProblemSpec::new(kappa, [1.0, 0.0], |_, _| 0.0)
        .with_dirichlet(4, |_, _| 0.0)
        .with_dirichlet(2, |_, _| 1.0)
        .with_neumann(1)
        .with_neumann(3);
    p.exact = Some(Box::new(move |x, _| {
        (((x - 1.0) / kappa).exp() - (-1.0 / kappa).exp()) / denom
    }));
    p.exact_gradient = Some(Box::new(move |x, _| {
        [((x - 1.0) / kappa).exp() / (kappa * denom), 0.0]
    }));
    p.exact_hessian = Some(Box::new(move |x, _| {
        SymTensor2::new(
            ((x - 1.0) / kappa).exp() / (kappa * kappa * denom),
            0.0,
            0.0,
        )
    }));
    Ok(p)
}

/// Poisson problem -Δu = f with u = 0 on the whole boundary and the exact
/// solution [1 - e^{-αx} - (1 - e^{-α})x]·4y(1-y): an exponential layer of
/// initial slope α along the side x = 0.
pub fn exponential_layer(alpha: f64) -> Result<ProblemSpec> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidProblem(format!(
            "layer slope must be positive, got {alpha}"
        )));
    }
    let slope = 1.0 - (-alpha).exp();
    let p_of = move |x: f64| 1.0 - (-alpha * x).exp() - slope * x;
    let dp_of = move |x: f64| alpha * (-alpha * x).exp() - slope;
    let q_of = |y: f64| 4.0 * y * (1.0 - y);
    let dq_of = |y: f64| 4.0 - 8.0 * y;

    let mut p = ProblemSpec::new(1.0, [0.0, 0.0], move |x, y| {
        alpha * alpha * (-alpha * x).exp() * q_of(y) + 8.0 * p_of(x)
    })
    .with_dirichlet(1, |_, _| 0.0)
    .with_dirichlet(2, |_, _| 0.0)
    .with_dirichlet(3, |_, _| 0.0)
    .with_dirichlet(4, |_, _| 0.0);
    p.exact = Some(Box::new(move |x, y| p_of(x) * q_of(y)));
    p.exact_gradient = Some(Box::new(move |x, y| {
        [dp_of(x) * q_of(y), p_of(x) * dq_of(y)]
    }));
    p.exact_hessian = Some(Box::new(move |x, y| {
        SymTensor2::new(
            -alpha * alpha * (-alpha * x).exp() * q_of(y),
            dp_of(x) * dq_of(y),
            -8.0 * p_of(x),
        )
    }));
    Ok(p)
}

/// Poisson problem with the exact solution (1 - x^β)(1 - y^{2β}): boundary
/// layers along the right and top sides, the top one stronger. Zero
/// Dirichlet data on those two sides, zero flux on the other two.
pub fn corner_layers(beta: f64) -> Result<ProblemSpec> {
    if !(beta >= 2.0) {
        return Err(Error::InvalidProblem(format!(
            "layer exponent must be at least 2, got {beta}"
        )));
    }
    let mut p = ProblemSpec::new(1.0, [0.0, 0.0], move |x, y| {
        beta * (beta - 1.0) * x.powf(beta - 2.0) * (1.0 - y.powf(2.0 * beta))
            + 2.0 * beta * (2.0 * beta - 1.0) * y.powf(2.0 * beta - 2.0) * (1.0 - x.powf(beta))
    })
    .with_dirichlet(2, |_, _| 0.0)
    .with_dirichlet(3, |_, _| 0.0)
    .with_neumann(1)
    .with_neumann(4);
    p.exact = Some(Box::new(move |x, y| {
        (1.0 - x.powf(beta)) * (1.0 - y.powf(2.0 * beta))
    }));
    p.exact_gradient = Some(Box::new(move |x, y| {
        [
            -beta * x.powf(beta - 1.0) * (1.0 - y.powf(2.0 * beta)),
            -2.0 * beta * y.powf(2.0 * beta - 1.0) * (1.0 - x.powf(beta)),
        ]
    }));
    p.exact_hessian = Some(Box::new(move |x, y| {
        SymTensor2::new(
            -beta * (beta - 1.0) * x.powf(beta - 2.0) * (1.0 - y.powf(2.0 * beta)),
            2.0 * beta * beta * x.powf(beta - 1.0) * y.powf(2.0 * beta - 1.0),
            -2.0 * beta * (2.0 * beta - 1.0) * y.powf(2.0 * beta - 2.0) * (1.0 - x.powf(beta)),
        )
    }));
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Central differences of the exact solution validate the hard-coded
    /// gradient, Hessian, and source at points away from boundary layers
    /// steep enough to defeat finite differencing.
    fn check_derivatives(p: &ProblemSpec, points: &[[f64; 2]], tol: f64) {
        let convection = p.convection;
        let u = p.exact.as_ref().unwrap();
        let grad = p.exact_gradient.as_ref().unwrap();
        let hess = p.exact_hessian.as_ref().unwrap();
        let h = 1e-5;
        for &[x, y] in points {
            let gx = (u(x + h, y) - u(x - h, y)) / (2.0 * h);
            let gy = (u(x, y + h) - u(x, y - h)) / (2.0 * h);
            let g = grad(x, y);
            assert_relative_eq!(g[0], gx, epsilon = tol, max_relative = tol);
            assert_relative_eq!(g[1], gy, epsilon = tol, max_relative = tol);

            let hxx = (u(x + h, y) - 2.0 * u(x, y) + u(x - h, y)) / (h * h);
            let hyy = (u(x, y + h) - 2.0 * u(x, y) + u(x, y - h)) / (h * h);
            let hxy = (u(x + h, y + h) - u(x + h, y - h) - u(x - h, y + h) + u(x - h, y - h))
                / (4.0 * h * h);
            let hs = hess(x, y);
            let scale = hs.spectral_radius().max(1.0);
            assert!((hs.a11 - hxx).abs() <= tol * scale, "hxx at ({x},{y})");
            assert!((hs.a22 - hyy).abs() <= tol * scale, "hyy at ({x},{y})");
            assert!((hs.a12 - hxy).abs() <= tol * scale, "hxy at ({x},{y})");

            // The stored source must close the PDE -κΔu + b·∇u = f.
            let f = (p.source)(x, y);
            let residual = -p.kappa * (hxx + hyy) + convection[0] * gx + convection[1] * gy - f;
            assert!(
                residual.abs() <= tol * f.abs().max(1.0),
                "PDE residual {residual} at ({x},{y})"
            );
        }
    }

    #[test]
    fn convection_layer_matches_its_derivatives() {
        // A gentle κ keeps finite differences meaningful.
        let p = convection_layer(0.05).unwrap();
        let points = [[0.2, 0.3], [0.5, 0.9], [0.8, 0.1], [0.9, 0.5]];
        check_derivatives(&p, &points, 1e-5);
    }

    #[test]
    fn convection_layer_hits_its_boundary_values() {
        let p = convection_layer(0.0015).unwrap();
        let u = p.exact.as_ref().unwrap();
        for y in [0.0, 0.3, 1.0] {
            assert_relative_eq!(u(0.0, y), 0.0, epsilon = 1e-14);
            assert_relative_eq!(u(1.0, y), 1.0, epsilon = 1e-14);
        }
        // The layer is thin: u is still tiny at x = 1 - 10κ.
        assert!(u(1.0 - 0.015, 0.5) < 1e-4);
        assert!(u(1.0, 0.5) - u(1.0 - 0.0015, 0.5) > 0.5);
    }

    #[test]
    fn exponential_layer_matches_its_derivatives() {
        let p = exponential_layer(30.0).unwrap();
        let points = [[0.3, 0.3], [0.6, 0.8], [0.9, 0.2], [0.5, 0.5]];
        check_derivatives(&p, &points, 1e-5);
    }

    #[test]
    fn exponential_layer_vanishes_on_the_boundary() {
        let p = exponential_layer(1000.0).unwrap();
        let u = p.exact.as_ref().unwrap();
        for t in [0.0, 0.25, 0.5, 0.75, 1.0] {
            assert_relative_eq!(u(t, 0.0), 0.0, epsilon = 1e-12);
            assert_relative_eq!(u(t, 1.0), 0.0, epsilon = 1e-12);
            assert_relative_eq!(u(0.0, t), 0.0, epsilon = 1e-12);
            assert_relative_eq!(u(1.0, t), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn corner_layers_match_their_derivatives() {
        let p = corner_layers(5.0).unwrap();
        let points = [[0.3, 0.3], [0.7, 0.5], [0.5, 0.7], [0.85, 0.85]];
        check_derivatives(&p, &points, 1e-4);
    }

    #[test]
    fn corner_layers_respect_their_boundary_conditions() {
        let p = corner_layers(40.0).unwrap();
        let u = p.exact.as_ref().unwrap();
        let grad = p.exact_gradient.as_ref().unwrap();
        for t in [0.1, 0.5, 0.9] {
            assert_relative_eq!(u(1.0, t), 0.0, epsilon = 1e-14);
            assert_relative_eq!(u(t, 1.0), 0.0, epsilon = 1e-14);
            assert_relative_eq!(grad(0.0, t)[0], 0.0, epsilon = 1e-14);
            assert_relative_eq!(grad(t, 0.0)[1], 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(convection_layer(0.0).is_err());
        assert!(convection_layer(-1.0).is_err());
        assert!(exponential_layer(0.0).is_err());
        assert!(corner_layers(1.0).is_err());
    }
}
