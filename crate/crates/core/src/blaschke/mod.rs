//! Finite Blaschke products on the closed unit disc.
//!
//! A degree-n product is `T(z) = θ₀ ∏ (z − aᵢ)/(1 − āᵢ z)` with `|θ₀| = 1`
//! and every zero strictly inside the disc. `T` maps the disc to itself and
//! the circle to itself, and on the circle
//!
//! ```text
//! |T'(z)| = Σ (1 − |aᵢ|²) / |z − aᵢ|²
//! ```
//!
//! which is what every downstream estimator actually consumes.

mod fixed_points;
mod poisson;
pub(crate) mod poly;

pub(crate) use poisson::poisson_raw;

pub use fixed_points::{classify_fixed_points, CircleFixedPoint, FixedPointCase, FixedPointClassification};
pub use poisson::{
    harmonic_extension, mobius_transport_check, poisson_density, poisson_grid_sup_diff, poisson_supnorm_diff_bound,
    pushforward_identity_residual, PoissonKernel,
};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{Error, Result};

/// Zeros and poles closer than this to the circle are rejected.
pub const EPS_BOUNDARY: f64 = 1e-9;
/// `|1 − āz|` below this counts as hitting a pole.
pub const EPS_POLE: f64 = 1e-14;
/// Residual tolerance for claimed roots of `T(z) = z` and `T(w) = z`.
pub const TOL_ROOT: f64 = 1e-10;
/// Multiplier distance from 1 below which a circle fixed point is indifferent.
pub const TOL_INDIFF: f64 = 1e-8;

/// A point of the unit circle, renormalized on construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitComplex(Complex64);

impl UnitComplex {
    pub const ONE: UnitComplex = UnitComplex(Complex64::new(1.0, 0.0));

    /// Projects a nonzero complex number radially onto the circle.
    pub fn new(value: Complex64) -> Result<Self> {
        let r = value.norm();
        if !r.is_finite() || r == 0.0 {
            return Err(Error::InvalidInput(format!("cannot normalize {value} onto the circle")));
        }
        Ok(UnitComplex(value / r))
    }

    /// `e^{2πit}` for `t` measured in turns.
    pub fn from_turns(t: f64) -> Self {
        let (s, c) = (TAU * t).sin_cos();
        UnitComplex(Complex64::new(c, s))
    }

    pub fn value(self) -> Complex64 {
        self.0
    }

    /// Angle in turns, in `[0, 1)`.
    pub fn turns(self) -> f64 {
        let t = self.0.im.atan2(self.0.re) / TAU;
        if t < 0.0 {
            // -0.0 and tiny negatives wrap to 1.0 otherwise
            let w = t + 1.0;
            if w >= 1.0 {
                0.0
            } else {
                w
            }
        } else {
            t
        }
    }

    pub fn conj(self) -> UnitComplex {
        UnitComplex(self.0.conj())
    }
}

impl std::ops::Mul for UnitComplex {
    type Output = UnitComplex;

    fn mul(self, other: UnitComplex) -> UnitComplex {
        let v = self.0 * other.0;
        UnitComplex(v / v.norm())
    }
}

/// A point strictly inside the unit disc, at least [`EPS_BOUNDARY`] from the circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscPoint(Complex64);

impl DiscPoint {
    pub const ORIGIN: DiscPoint = DiscPoint(Complex64::new(0.0, 0.0));

    pub fn new(value: Complex64) -> Result<Self> {
        let m = value.norm();
        if !m.is_finite() || m >= 1.0 - EPS_BOUNDARY {
            return Err(Error::NotInDisc { modulus: m });
        }
        Ok(DiscPoint(value))
    }

    pub fn real(x: f64) -> Result<Self> {
        Self::new(Complex64::new(x, 0.0))
    }

    pub fn value(self) -> Complex64 {
        self.0
    }

    pub fn norm(self) -> f64 {
        self.0.norm()
    }
}

/// A finite Blaschke product `θ₀ ∏ (z − aᵢ)/(1 − āᵢ z)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlaschkeProduct {
    rotation: UnitComplex,
    zeros: Vec<DiscPoint>,
}

impl BlaschkeProduct {
    pub fn new(rotation: UnitComplex, zeros: Vec<DiscPoint>) -> Result<Self> {
        if zeros.is_empty() {
            return Err(Error::EmptyProduct);
        }
        Ok(BlaschkeProduct { rotation, zeros })
    }

    /// Builds a product from a rotation angle in turns and raw zeros.
    pub fn from_parts(rotation_turns: f64, zeros: &[Complex64]) -> Result<Self> {
        let zeros = zeros.iter().map(|&a| DiscPoint::new(a)).collect::<Result<Vec<_>>>()?;
        Self::new(UnitComplex::from_turns(rotation_turns), zeros)
    }

    /// `z ↦ zⁿ`.
    pub fn monomial(degree: usize) -> Result<Self> {
        Self::new(UnitComplex::ONE, vec![DiscPoint::ORIGIN; degree])
    }

    /// The rigid rotation `z ↦ e^{2πit} z`.
    pub fn rotation_map(turns: f64) -> Self {
        BlaschkeProduct { rotation: UnitComplex::from_turns(turns), zeros: vec![DiscPoint::ORIGIN] }
    }

    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    pub fn rotation(&self) -> UnitComplex {
        self.rotation
    }

    pub fn zeros(&self) -> &[DiscPoint] {
        &self.zeros
    }

    /// `θ·T`, the same zeros with the prefactor multiplied by `θ`.
    pub fn rotated(&self, theta: UnitComplex) -> Self {
        BlaschkeProduct { rotation: theta * self.rotation, zeros: self.zeros.clone() }
    }

    /// Evaluates `T(z)` anywhere off the poles `1/āᵢ`.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let mut acc = self.rotation.0;
        for (i, a) in self.zeros.iter().enumerate() {
            let den = Complex64::new(1.0, 0.0) - a.0.conj() * z;
            if den.norm() < EPS_POLE {
                return Err(Error::PoleHit { re: z.re, im: z.im, factor: i });
            }
            acc *= (z - a.0) / den;
        }
        Ok(acc)
    }

    /// Evaluates `T(z)` for `|z| ≤ 1`, where no pole can be hit.
    #[inline]
    pub fn apply(&self, z: Complex64) -> Complex64 {
        debug_assert!(z.norm() <= 1.0 + 1e-9, "apply() called outside the closed disc");
        let mut acc = self.rotation.0;
        for a in &self.zeros {
            acc *= (z - a.0) / (1.0 - a.0.conj() * z);
        }
        acc
    }

    /// `T` restricted to the circle.
    pub fn map_circle(&self, z: UnitComplex) -> UnitComplex {
        let w = self.apply(z.0);
        UnitComplex(w / w.norm())
    }

    /// Complex derivative `T'(z)` by the product rule.
    pub fn derivative(&self, z: Complex64) -> Result<Complex64> {
        let n = self.zeros.len();
        let mut factors = Vec::with_capacity(n);
        let mut dfactors = Vec::with_capacity(n);
        for (i, a) in self.zeros.iter().enumerate() {
            let den = 1.0 - a.0.conj() * z;
            if den.norm() < EPS_POLE {
                return Err(Error::PoleHit { re: z.re, im: z.im, factor: i });
            }
            factors.push((z - a.0) / den);
            dfactors.push((1.0 - a.0.norm_sqr()) / (den * den));
        }
        // prefix[i] = ∏_{j<i} B_j
        let mut prefix = vec![Complex64::new(1.0, 0.0); n + 1];
        for i in 0..n {
            prefix[i + 1] = prefix[i] * factors[i];
        }
        let mut suffix = Complex64::new(1.0, 0.0);
        let mut total = Complex64::new(0.0, 0.0);
        for i in (0..n).rev() {
            total += prefix[i] * dfactors[i] * suffix;
            suffix *= factors[i];
        }
        Ok(self.rotation.0 * total)
    }

    /// `|T'(z)| = Σ (1 − |aᵢ|²)/|z − aᵢ|²` for `z` on the circle.
    #[inline]
    pub fn deriv_modulus_on_circle(&self, z: UnitComplex) -> f64 {
        self.zeros.iter().map(|a| (1.0 - a.0.norm_sqr()) / (z.0 - a.0).norm_sqr()).sum()
    }

    /// `log|T'(z)|` on the circle.
    pub fn log_deriv_on_circle(&self, z: UnitComplex) -> f64 {
        self.deriv_modulus_on_circle(z).ln()
    }

    /// `|T''(z) / T'(z)²|` on the circle, from the logarithmic derivative
    /// `L = T'/T = Σ (1 − |a|²)/((z − a)(1 − āz))`. Since `|T| = 1` there,
    /// `|T''/T'²| = |L² + L'| / |L|²`.
    pub fn distortion_on_circle(&self, z: UnitComplex) -> f64 {
        let z = z.0;
        let mut l = Complex64::new(0.0, 0.0);
        let mut dl = Complex64::new(0.0, 0.0);
        for a in &self.zeros {
            let a = a.0;
            let w = 1.0 - a.norm_sqr();
            let p = (z - a) * (1.0 - a.conj() * z);
            l += w / p;
            dl -= w * (1.0 - 2.0 * a.conj() * z + a.norm_sqr()) / (p * p);
        }
        (l * l + dl).norm() / l.norm_sqr()
    }

    /// Lower bound `Σ (1 − |aᵢ|)/(1 + |aᵢ|)` on `inf |T'|` over the circle.
    pub fn martin_bound(&self) -> f64 {
        self.zeros.iter().map(|a| (1.0 - a.norm()) / (1.0 + a.norm())).sum()
    }

    /// `true` when `T(z) = z` up to rounding.
    pub fn fixes(&self, z: Complex64) -> bool {
        match self.eval(z) {
            Ok(w) => (w - z).norm() <= 1e-15 * (1.0 + z.norm()),
            Err(_) => false,
        }
    }
}

/// Named maps used throughout the examples and tests.
pub mod presets {
    use super::*;

    /// `z ↦ z²`, uniformly expanding with `|T'| ≡ 2`.
    pub fn squaring() -> BlaschkeProduct {
        BlaschkeProduct::monomial(2).expect("degree 2")
    }

    /// `z ↦ −((z − 0.4)/(1 − 0.4z))²`, which has an attracting fixed point at
    /// `−1` on the circle and `inf |T'| = 6/7`.
    pub fn boundary_attractor() -> BlaschkeProduct {
        let a = Complex64::new(0.4, 0.0);
        BlaschkeProduct::from_parts(0.5, &[a, a]).expect("valid zeros")
    }

    /// The two-map table `[squaring, boundary_attractor]`.
    pub fn mixed_table() -> Vec<BlaschkeProduct> {
        vec![squaring(), boundary_attractor()]
    }
}

#[cfg(test)]
mod tests {
    use super::presets::*;
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn squaring_at_i() {
        let w = squaring().eval(c(0.0, 1.0)).unwrap();
        assert!((w - c(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn boundary_attractor_values() {
        let t = boundary_attractor();
        assert!((t.eval(c(-1.0, 0.0)).unwrap() - c(-1.0, 0.0)).norm() < 1e-14);
        assert!((t.eval(c(1.0, 0.0)).unwrap() - c(-1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn derivative_modulus_values() {
        let one = UnitComplex::ONE;
        let minus = UnitComplex::from_turns(0.5);
        assert!((squaring().deriv_modulus_on_circle(UnitComplex::from_turns(0.123)) - 2.0).abs() < 1e-14);
        let t = boundary_attractor();
        assert!((t.deriv_modulus_on_circle(minus) - 6.0 / 7.0).abs() < 1e-14);
        assert!((t.deriv_modulus_on_circle(one) - 14.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn complex_derivative_matches_circle_modulus() {
        let t = BlaschkeProduct::from_parts(0.17, &[c(0.3, -0.2), c(-0.5, 0.1), c(0.0, 0.6)]).unwrap();
        for k in 0..16 {
            let z = UnitComplex::from_turns(k as f64 / 16.0 + 0.01);
            let d = t.derivative(z.value()).unwrap().norm();
            assert!((d - t.deriv_modulus_on_circle(z)).abs() < 1e-12);
        }
    }

    #[test]
    fn pole_is_reported() {
        let t = BlaschkeProduct::from_parts(0.0, &[c(0.5, 0.0)]).unwrap();
        assert!(matches!(t.eval(c(2.0, 0.0)), Err(Error::PoleHit { factor: 0, .. })));
    }

    #[test]
    fn zeros_near_boundary_rejected() {
        assert!(DiscPoint::new(c(1.0 - 1e-10, 0.0)).is_err());
        assert!(DiscPoint::new(c(0.999, 0.0)).is_ok());
        assert!(BlaschkeProduct::new(UnitComplex::ONE, vec![]).is_err());
    }

    #[test]
    fn distortion_of_squaring_is_half() {
        for k in 0..8 {
            let z = UnitComplex::from_turns(k as f64 / 8.0);
            assert!((squaring().distortion_on_circle(z) - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn martin_bound_values() {
        assert!((squaring().martin_bound() - 2.0).abs() < 1e-15);
        assert!((boundary_attractor().martin_bound() - 6.0 / 7.0).abs() < 1e-15);
        let t = BlaschkeProduct::from_parts(0.0, &[c(0.0, 0.0), c(0.5, 0.0)]).unwrap();
        assert!((t.martin_bound() - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn unit_turns_round_trip() {
        for &t in &[0.0, 0.25, 0.5, 0.999] {
            assert!((UnitComplex::from_turns(t).turns() - t).abs() < 1e-12);
        }
    }

    #[test]
    fn rotation_keeps_derivative_modulus() {
        let t = boundary_attractor();
        let r = t.rotated(UnitComplex::from_turns(0.3));
        let z = UnitComplex::from_turns(0.77);
        assert_eq!(t.deriv_modulus_on_circle(z), r.deriv_modulus_on_circle(z));
    }
}
