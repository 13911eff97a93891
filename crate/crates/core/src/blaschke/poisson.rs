//! Poisson kernels of the disc and the pushforward identity
//! `∫ f∘T · P_x dm = ∫ f · P_{T(x)} dm`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{BlaschkeProduct, DiscPoint, UnitComplex};
use crate::circle::{quadrature_complex, CircleGrid};
use crate::error::Result;

/// `P_x(z) = (1 − |x|²)/|z − x|²`.
#[inline]
pub fn poisson_density(x: DiscPoint, z: UnitComplex) -> f64 {
    poisson_raw(x.value(), z.value())
}

#[inline]
pub(crate) fn poisson_raw(x: Complex64, z: Complex64) -> f64 {
    (1.0 - x.norm_sqr()) / (z - x).norm_sqr()
}

/// The probability density `P_x dm` on the circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoissonKernel {
    pub pole: DiscPoint,
}

impl PoissonKernel {
    pub fn new(pole: DiscPoint) -> Self {
        PoissonKernel { pole }
    }

    pub fn density(&self, z: UnitComplex) -> f64 {
        poisson_density(self.pole, z)
    }

    /// `‖P_x‖_∞ = (1 + |x|)/(1 − |x|)`, attained at `z = x/|x|`.
    pub fn sup_norm(&self) -> f64 {
        let r = self.pole.norm();
        (1.0 + r) / (1.0 - r)
    }

    /// `inf P_x = (1 − |x|)/(1 + |x|)`.
    pub fn inf(&self) -> f64 {
        1.0 / self.sup_norm()
    }

    pub fn integrate(&self, grid: &CircleGrid, f: impl Fn(UnitComplex) -> f64) -> f64 {
        grid.integrate(|z| f(z) * self.density(z))
    }
}

/// `12|x − y| / ((1 − |x|)²(1 − |y|)²)`, a bound on `‖P_x − P_y‖_∞`.
pub fn poisson_supnorm_diff_bound(x: DiscPoint, y: DiscPoint) -> f64 {
    let (rx, ry) = (x.norm(), y.norm());
    12.0 * (x.value() - y.value()).norm() / ((1.0 - rx).powi(2) * (1.0 - ry).powi(2))
}

/// `max_j |P_x(z_j) − P_y(z_j)|` over the grid.
pub fn poisson_grid_sup_diff(x: DiscPoint, y: DiscPoint, grid: &CircleGrid) -> f64 {
    grid.sup_diff(|z| poisson_density(x, z), |z| poisson_density(y, z))
}

/// Harmonic extension `f̃(x) = ∫ f P_x dm` of grid samples `f` to `x ∈ D`.
pub fn harmonic_extension(values: &[Complex64], x: DiscPoint) -> Result<Complex64> {
    let grid = CircleGrid::new(values.len())?;
    Ok(grid.nodes().zip(values).map(|(z, f)| f * poisson_density(x, z)).sum::<Complex64>() / grid.size() as f64)
}

/// `max_{k ≤ k_max} |∫ T(z)^k P_x(z) dm − T(x)^k|` by trapezoid quadrature.
pub fn pushforward_identity_residual(t: &BlaschkeProduct, x: DiscPoint, k_max: u32, n: usize) -> Result<f64> {
    let grid = CircleGrid::new(n)?;
    let images: Vec<Complex64> = grid.nodes().map(|z| t.apply(z.value())).collect();
    let weights: Vec<f64> = grid.nodes().map(|z| poisson_density(x, z)).collect();
    let tx = t.apply(x.value());
    let mut worst: f64 = 0.0;
    for k in 0..=k_max {
        let lhs = quadrature_complex(&images.iter().zip(&weights).map(|(w, p)| w.powu(k) * p).collect::<Vec<_>>());
        worst = worst.max((lhs - tx.powu(k)).norm());
    }
    Ok(worst)
}

/// Compares `∫ f dμ_x` (density `P_x`) with `∫ f∘φ_x dm`, where
/// `φ_x(z) = (z + x)/(1 + x̄z)`, over the monomials `z^k` and `z̄^k`, `k ≤ k_max`.
pub fn mobius_transport_check(x: DiscPoint, n: usize, k_max: u32) -> Result<f64> {
    let grid = CircleGrid::new(n)?;
    let xv = x.value();
    let phi = |z: Complex64| (z + xv) / (1.0 + xv.conj() * z);
    let mut worst: f64 = 0.0;
    for k in 0..=k_max {
        for conj in [false, true] {
            let f = |z: Complex64| {
                let p = z.powu(k);
                if conj {
                    p.conj()
                } else {
                    p
                }
            };
            let lhs = grid.integrate_complex(|z| f(z.value()) * poisson_density(x, z));
            let rhs = grid.integrate_complex(|z| f(phi(z.value())));
            worst = worst.max((lhs - rhs).norm());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::super::presets::*;
    use super::*;

    fn dp(re: f64, im: f64) -> DiscPoint {
        DiscPoint::new(Complex64::new(re, im)).unwrap()
    }

    #[test]
    fn kernel_values() {
        assert!((poisson_density(DiscPoint::ORIGIN, UnitComplex::from_turns(0.3)) - 1.0).abs() < 1e-15);
        assert!((poisson_density(dp(0.5, 0.0), UnitComplex::ONE) - 3.0).abs() < 1e-14);
    }

    #[test]
    fn kernel_normalized() {
        let g = CircleGrid::new(4096).unwrap();
        for &x in &[dp(0.0, 0.0), dp(0.5, 0.3), dp(-0.95, 0.0), dp(0.0, 0.9)] {
            let k = PoissonKernel::new(x);
            assert!((k.integrate(&g, |_| 1.0) - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn diff_bound_examples() {
        assert_eq!(poisson_supnorm_diff_bound(dp(0.3, 0.2), dp(0.3, 0.2)), 0.0);
        let b = poisson_supnorm_diff_bound(DiscPoint::ORIGIN, dp(0.1, 0.0));
        assert!((b - 12.0 * 0.1 / 0.81).abs() < 1e-12);
        let g = CircleGrid::new(4096).unwrap();
        assert!(poisson_grid_sup_diff(DiscPoint::ORIGIN, dp(0.1, 0.0), &g) <= b);
        let (x, y) = (dp(0.5, 0.0), dp(0.0, 0.5));
        let b = poisson_supnorm_diff_bound(x, y);
        assert!((b - 12.0 * Complex64::new(0.5, -0.5).norm() / 0.0625).abs() < 1e-10);
        assert!(poisson_grid_sup_diff(x, y, &g) <= b);
    }

    #[test]
    fn harmonic_extension_examples() {
        let g = CircleGrid::new(1024).unwrap();
        let one = g.sample_complex(|_| Complex64::new(1.0, 0.0));
        assert!((harmonic_extension(&one, dp(0.7, -0.1)).unwrap() - 1.0).norm() < 1e-12);
        let cube = g.sample_complex(|z| z.value().powu(3));
        assert!((harmonic_extension(&cube, dp(0.3, 0.0)).unwrap() - 0.027).norm() < 1e-14);
        let re = g.sample_complex(|z| Complex64::new(z.value().re, 0.0));
        assert!(harmonic_extension(&re, DiscPoint::ORIGIN).unwrap().norm() < 1e-15);
        assert!(harmonic_extension(&one[..4], DiscPoint::ORIGIN).is_err());
    }

    #[test]
    fn pushforward_examples() {
        assert!(pushforward_identity_residual(&squaring(), dp(0.5, 0.0), 0, 64).unwrap() < 1e-15);
        assert!(pushforward_identity_residual(&boundary_attractor(), DiscPoint::ORIGIN, 8, 2048).unwrap() < 1e-10);
        assert!(pushforward_identity_residual(&squaring(), dp(0.5, 0.0), 8, 2048).unwrap() < 1e-10);
    }

    #[test]
    fn mobius_transport_examples() {
        assert!(mobius_transport_check(DiscPoint::ORIGIN, 256, 6).unwrap() < 1e-14);
        let g = CircleGrid::new(2048).unwrap();
        let x = dp(0.4, 0.0);
        let lhs = g.integrate_complex(|z| z.value() * poisson_density(x, z));
        assert!((lhs - 0.4).norm() < 1e-12);
        assert!(mobius_transport_check(x, 2048, 6).unwrap() < 1e-10);
        let y = dp(0.0, 0.6);
        let lhs = g.integrate_complex(|z| z.value().powu(2) * poisson_density(y, z));
        assert!((lhs - Complex64::new(0.0, 0.6).powu(2)).norm() < 1e-12);
        assert!(mobius_transport_check(y, 2048, 6).unwrap() < 1e-10);
    }

    #[test]
    fn sup_norm_law() {
        for &r in &[0.5, 0.9] {
            let k = PoissonKernel::new(dp(r, 0.0));
            let g = CircleGrid::new(4096).unwrap();
            let grid_max = g.nodes().map(|z| k.density(z)).fold(0.0, f64::max);
            assert!((grid_max - k.sup_norm()).abs() / k.sup_norm() < 1e-12);
        }
    }
}
