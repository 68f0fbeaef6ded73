//! Symmetric 2x2 tensors: the algebra behind Hessians and metrics.

use crate::geom::Pt;
use crate::{Error, Result};

/// A symmetric 2x2 tensor stored as its three independent entries.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct SymTensor2 {
    pub a11: f64,
    pub a12: f64,
    pub a22: f64,
}

impl SymTensor2 {
    pub fn new(a11: f64, a12: f64, a22: f64) -> Self {
        Self { a11, a12, a22 }
    }

    pub fn identity() -> Self {
        Self::new(1.0, 0.0, 1.0)
    }

    pub fn zero() -> Self {
        Self::new(0.0, 0.0, 0.0)
    }

    /// Diagonal tensor diag(a, b).
    pub fn diag(a: f64, b: f64) -> Self {
        Self::new(a, 0.0, b)
    }

    /// Tensor with eigenpairs (l1, direction `angle`) and (l2, orthogonal).
    pub fn from_eigen(l1: f64, l2: f64, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(
            l1 * c * c + l2 * s * s,
            (l1 - l2) * s * c,
            l1 * s * s + l2 * c * c,
        )
    }

    pub fn trace(&self) -> f64 {
        self.a11 + self.a22
    }

    pub fn det(&self) -> f64 {
        self.a11 * self.a22 - self.a12 * self.a12
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(
            self.a11 + other.a11,
            self.a12 + other.a12,
            self.a22 + other.a22,
        )
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(s * self.a11, s * self.a12, s * self.a22)
    }

    /// Quadratic form vᵀ T v.
    pub fn quad_form(&self, v: Pt) -> f64 {
        self.a11 * v[0] * v[0] + 2.0 * self.a12 * v[0] * v[1] + self.a22 * v[1] * v[1]
    }

    /// Matrix-vector product T v.
    pub fn apply(&self, v: Pt) -> Pt {
        [
            self.a11 * v[0] + self.a12 * v[1],
            self.a12 * v[0] + self.a22 * v[1],
        ]
    }

    /// Squared Frobenius norm, counting the off-diagonal entry twice.
    pub fn frobenius_sq(&self) -> f64 {
        self.a11 * self.a11 + 2.0 * self.a12 * self.a12 + self.a22 * self.a22
    }

    /// Eigenvalues and principal direction, as (l1, l2, angle) with l1 >= l2.
    ///
    /// The unit vector (cos angle, sin angle) spans the eigenspace of l1.
    /// The closed form is exact for symmetric 2x2 matrices: the eigenvalues
    /// are mean ± radius of the (trace/2, deviator) pair.
    pub fn eig(&self) -> (f64, f64, f64) {
        let mean = 0.5 * (self.a11 + self.a22);
        let half_diff = 0.5 * (self.a11 - self.a22);
        let radius = half_diff.hypot(self.a12);
        let angle = if radius == 0.0 {
            0.0
        } else {
            0.5 * (2.0 * self.a12).atan2(self.a11 - self.a22)
        };
        (mean + radius, mean - radius, angle)
    }

    /// Spectral radius, the largest absolute eigenvalue.
    pub fn spectral_radius(&self) -> f64 {
        let (l1, l2, _) = self.eig();
        l1.abs().max(l2.abs())
    }

    /// Spectral absolute value |T|: eigenvalues replaced by their magnitudes.
    pub fn abs(&self) -> Self {
        let (l1, l2, angle) = self.eig();
        Self::from_eigen(l1.abs(), l2.abs(), angle)
    }

    /// Eigenvalue flooring alpha*I + |T|, positive definite for alpha > 0.
    pub fn floor_regularize(&self, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::NonPositiveAlpha(alpha));
        }
        let abs = self.abs();
        Ok(Self::new(abs.a11 + alpha, abs.a12, abs.a22 + alpha))
    }

    pub fn is_spd(&self) -> bool {
        self.a11 > 0.0 && self.det() > 0.0
    }

    /// Aspect-ratio measure sqrt(trace / sqrt(det)) of an SPD tensor.
    ///
    /// Writing r = sqrt(l1 / l2) for the eigenvalue ratio, the value equals
    /// sqrt(r + 1/r), so it is at least sqrt(2) with equality exactly for
    /// multiples of the identity, and it is invariant under scaling.
    pub fn anisotropy_factor(&self) -> Result<f64> {
        let (l1, l2, _) = self.eig();
        if !(l2 > 0.0) {
            return Err(Error::NotSpd(l1, l2));
        }
        Ok((self.trace() / self.det().sqrt()).sqrt())
    }

    /// Lower Cholesky factor L with T = L Lᵀ, for SPD tensors.
    pub fn cholesky(&self) -> Result<[[f64; 2]; 2]> {
        if !self.is_spd() {
            let (l1, l2, _) = self.eig();
            return Err(Error::NotSpd(l1, l2));
        }
        let l11 = self.a11.sqrt();
        let l21 = self.a12 / l11;
        let l22 = (self.a22 - l21 * l21).sqrt();
        Ok([[l11, 0.0], [l21, l22]])
    }

    /// Metric length of the vector v, sqrt(vᵀ T v), clamped at zero.
    pub fn length(&self, v: Pt) -> f64 {
        self.quad_form(v).max(0.0).sqrt()
    }

    /// Metric intersection by simultaneous reduction: the returned tensor
    /// dominates both operands, and its unit ball lies inside both unit
    /// balls. For commuting tensors this is the eigenvalue-wise maximum.
    /// Both operands must be SPD.
    pub fn intersect(&self, other: &Self) -> Result<Self> {
        let l = self.cholesky()?;
        if !other.is_spd() {
            let (l1, l2, _) = other.eig();
            return Err(Error::NotSpd(l1, l2));
        }
        let i00 = 1.0 / l[0][0];
        let i10 = -l[1][0] / (l[0][0] * l[1][1]);
        let i11 = 1.0 / l[1][1];
        // c = L⁻¹ other L⁻ᵀ expresses the other tensor in the basis where
        // self is the identity; capping its eigenvalues below at 1 takes
        // the per-axis maximum of the two.
        let c = Self::new(
            i00 * other.a11 * i00,
            i00 * (other.a11 * i10 + other.a12 * i11),
            i10 * (i10 * other.a11 + i11 * other.a12)
                + i11 * (i10 * other.a12 + i11 * other.a22),
        );
        let (mu1, mu2, angle) = c.eig();
        let s = Self::from_eigen(mu1.max(1.0), mu2.max(1.0), angle);
        let r00 = l[0][0] * s.a11 * l[0][0];
        let r01 = l[0][0] * (s.a11 * l[1][0] + s.a12 * l[1][1]);
        let r11 = l[1][0] * (s.a11 * l[1][0] + s.a12 * l[1][1])
            + l[1][1] * (s.a12 * l[1][0] + s.a22 * l[1][1]);
        Ok(Self::new(r00, r01, r11))
    }
}
