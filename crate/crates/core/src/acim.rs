//! Random fixed points of backward compositions and the random invariant
//! densities they determine.
//!
//! The limit `x_ω = lim T_{σ⁻¹ω} ∘ … ∘ T_{σ⁻ⁿω}(z)` does not depend on
//! `z ∈ D`, and `h_ω = P_{x_ω}` is the density of the random acim. Pushing
//! forward by the transfer operator acts on poles: `𝓛_T P_x = P_{T(x)}`,
//! so in particular `𝓛⁽ⁿ⁾1 = P_{T⁽ⁿ⁾(0)}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::blaschke::poisson_raw;
use crate::blaschke::{poisson_density, BlaschkeProduct, DiscPoint, UnitComplex, EPS_BOUNDARY};
use crate::circle::{CircleGrid, CircleLift, GridFunction};
use crate::cocycle::CocyclePath;
use crate::error::{Error, Result};

pub const TOL_FP: f64 = 1e-12;
pub const MAX_ITERATIONS: usize = 10_000;
/// Iterates beyond this modulus count toward boundary divergence.
pub const BOUNDARY_RADIUS: f64 = 1.0 - 1e-6;
/// Consecutive iterates beyond [`BOUNDARY_RADIUS`] that declare divergence.
pub const BOUNDARY_STREAK: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointOptions {
    pub tol: f64,
    pub max_n: usize,
    /// Starting point `z` of the backward iteration.
    pub start: Complex64,
    /// Second starting point tracked alongside `start`. Successive
    /// differences vanish whenever the innermost map fixes `start` (the
    /// squaring map fixes 0), so convergence also requires the images of
    /// `start` and `probe` to agree.
    pub probe: Complex64,
    /// Consecutive steps on which the convergence test must hold. A single
    /// step can pass by accident when the two points reach preimage siblings
    /// of a non-injective map.
    pub window: usize,
}

impl Default for FixedPointOptions {
    fn default() -> Self {
        FixedPointOptions {
            tol: TOL_FP,
            max_n: MAX_ITERATIONS,
            start: Complex64::new(0.0, 0.0),
            probe: Complex64::new(0.3, 0.4),
            window: 5,
        }
    }
}

impl FixedPointOptions {
    pub fn starting_at(start: Complex64) -> Self {
        FixedPointOptions { start, ..Default::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FixedPointStatus {
    Converged,
    BoundaryDivergence,
    MaxIterations,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomFixedPointResult {
    pub status: FixedPointStatus,
    pub x_omega: Option<DiscPoint>,
    /// `T⁽ⁿ⁾_{σ⁻ⁿω}(z)` for `n = 0, 1, …, n_used`.
    pub iterates: Vec<Complex64>,
    /// `exp` of the least-squares slope of `log |F_n(start) − F_n(probe)|`
    /// over the whole run.
    pub fitted_rate: Option<f64>,
    pub n_used: usize,
}

impl RandomFixedPointResult {
    pub fn converged(&self) -> Option<DiscPoint> {
        match self.status {
            FixedPointStatus::Converged => self.x_omega,
            _ => None,
        }
    }

    pub fn require(&self) -> Result<DiscPoint> {
        self.converged().ok_or_else(|| Error::NotConverged(format!("{:?} after {} steps", self.status, self.n_used)))
    }

    pub fn differences(&self) -> Vec<f64> {
        self.iterates.windows(2).map(|w| (w[1] - w[0]).norm()).collect()
    }
}

fn fit_rate(gaps: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = gaps
        .iter()
        .enumerate()
        .filter(|(_, &d)| d > 4.0 * f64::EPSILON && d.is_finite())
        .map(|(i, &d)| ((i + 1) as f64, d.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some((sxy / sxx).exp())
}

/// Random fixed point of the fibre at path index `k`, from backward
/// compositions `T_{s_{k−1}} ∘ … ∘ T_{s_{k−n}}(z)`.
pub fn random_fixed_point_at(path: &CocyclePath, k: i64, opts: &FixedPointOptions) -> Result<RandomFixedPointResult> {
    let available = (k + path.n_back() as i64).max(0) as usize;
    let max_n = opts.max_n.min(available);
    let trivially_fixed = path.all_maps_fix(opts.start);

    let mut iterates = vec![opts.start];
    let mut spreads = Vec::new();
    let mut streak = 0usize;
    let mut passed = 0usize;
    let mut candidate: Option<(usize, Complex64)> = None;
    let mut status = FixedPointStatus::MaxIterations;
    for n in 1..=max_n {
        let symbols = path.symbols(k - n as i64, k)?;
        let (mut x, mut q) = (opts.start, opts.probe);
        for &s in symbols {
            let t = path.effective_map(s);
            x = t.apply(x);
            q = t.apply(q);
        }
        let diff = (x - iterates[n - 1]).norm();
        let spread = (x - q).norm();
        iterates.push(x);
        spreads.push(spread);

        if x.norm() > BOUNDARY_RADIUS {
            streak += 1;
            if streak >= BOUNDARY_STREAK {
                status = FixedPointStatus::BoundaryDivergence;
                break;
            }
        } else {
            streak = 0;
        }
        if diff < opts.tol && (spread < opts.tol || trivially_fixed) && x.norm() < 1.0 - EPS_BOUNDARY {
            passed += 1;
        } else {
            passed = 0;
        }
        if trivially_fixed && passed > 0 {
            status = FixedPointStatus::Converged;
            break;
        }
        // A candidate found at step n must be reproduced at step 2n, which
        // guards against long attracting runs deeper in the past.
        match candidate {
            Some((m, c)) if n == 2 * m => {
                if passed > 0 && (x - c).norm() < opts.tol {
                    status = FixedPointStatus::Converged;
                    break;
                }
                candidate = None;
            }
            None if passed >= opts.window.max(1) => candidate = Some((n, x)),
            _ => {}
        }
    }
    let n_used = iterates.len() - 1;
    let x_omega = match status {
        FixedPointStatus::Converged => Some(DiscPoint::new(iterates[n_used])?),
        _ => None,
    };
    Ok(RandomFixedPointResult { status, x_omega, fitted_rate: fit_rate(&spreads), iterates, n_used })
}

/// Random fixed point `x_ω` of the fibre at index 0.
pub fn random_fixed_point(path: &CocyclePath, opts: &FixedPointOptions) -> Result<RandomFixedPointResult> {
    random_fixed_point_at(path, 0, opts)
}

/// The random invariant density `h_ω = P_{x_ω}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomDensity {
    pub pole: DiscPoint,
}

impl RandomDensity {
    pub fn density(&self, z: UnitComplex) -> f64 {
        poisson_density(self.pole, z)
    }

    pub fn mass(&self, grid: &CircleGrid) -> f64 {
        grid.integrate(|z| self.density(z))
    }
}

/// `(𝓛_T f)(z) = Σ_{T(w) = z} f(w)/|T'(w)|` at a single point.
pub fn transfer_at(lift: &CircleLift, f: impl Fn(UnitComplex) -> f64, z: UnitComplex) -> Result<f64> {
    let t = lift.map();
    Ok(lift.preimages(z)?.into_iter().map(|w| f(w) / t.deriv_modulus_on_circle(w)).sum())
}

/// `𝓛_T f` on the grid of `f`, evaluating `f` at preimages through its
/// trigonometric interpolant.
pub fn transfer_apply(t: &BlaschkeProduct, f: &GridFunction) -> Result<GridFunction> {
    let ip = f.interpolant();
    let lift = CircleLift::new(t);
    let grid = f.grid();
    let values = grid.nodes().map(|z| transfer_at(&lift, |w| ip.eval(w), z)).collect::<Result<Vec<_>>>()?;
    GridFunction::from_values(values)
}

/// `𝓛_T g` on a grid for a function known in closed form.
pub fn transfer_apply_fn(
    t: &BlaschkeProduct,
    f: impl Fn(UnitComplex) -> f64,
    grid: &CircleGrid,
) -> Result<GridFunction> {
    let lift = CircleLift::new(t);
    let values = grid.nodes().map(|z| transfer_at(&lift, &f, z)).collect::<Result<Vec<_>>>()?;
    GridFunction::from_values(values)
}

/// `|T_{s₀}(x_ω) − x_{σω}|`, equivariance of the random fixed point.
pub fn pole_equivariance_residual(path: &CocyclePath, opts: &FixedPointOptions) -> Result<f64> {
    let x0 = random_fixed_point_at(path, 0, opts)?.require()?;
    let x1 = random_fixed_point_at(path, 1, opts)?.require()?;
    Ok((path.map_at(0)?.apply(x0.value()) - x1.value()).norm())
}

/// Grid sup of `𝓛_{T_{s₀}} P_{x_ω} − P_{x_{σω}}`.
pub fn density_equivariance_residual(path: &CocyclePath, grid: &CircleGrid, opts: &FixedPointOptions) -> Result<f64> {
    let x0 = random_fixed_point_at(path, 0, opts)?.require()?;
    let x1 = random_fixed_point_at(path, 1, opts)?.require()?;
    let pushed = transfer_apply_fn(path.map_at(0)?, |w| poisson_density(x0, w), grid)?;
    Ok(grid.nodes().zip(pushed.values()).map(|(z, v)| (v - poisson_density(x1, z)).abs()).fold(0.0, f64::max))
}

/// Initial density of a convergence curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialDensity {
    One,
    PoissonAt(DiscPoint),
}

/// `(n, sup_grid |𝓛⁽ⁿ⁾_{σ⁻ⁿω} h_* − h_ω|)` for `n = 1..=n_max`, using
/// `𝓛⁽ⁿ⁾ P_z = P_{T⁽ⁿ⁾(z)}` (with `1 = P_0`).
pub fn convergence_curve(
    path: &CocyclePath,
    h_star: InitialDensity,
    n_max: usize,
    grid: &CircleGrid,
    opts: &FixedPointOptions,
) -> Result<Vec<(usize, f64)>> {
    let x = random_fixed_point(path, opts)?.require()?;
    let start = match h_star {
        InitialDensity::One => Complex64::new(0.0, 0.0),
        InitialDensity::PoissonAt(z) => z.value(),
    };
    let target: Vec<f64> = grid.nodes().map(|z| poisson_density(x, z)).collect();
    (1..=n_max)
        .map(|n| {
            let pole = path.backward_compose(0, n, start)?;
            let sup =
                grid.nodes().zip(&target).map(|(z, h)| (poisson_raw(pole, z.value()) - h).abs()).fold(0.0, f64::max);
            Ok((n, sup))
        })
        .collect()
}

/// Sup-grid distance between `𝓛_{s_{−1}} ∘ … ∘ 𝓛_{s_{−n}} 1`, computed by
/// repeated [`transfer_apply`], and its closed form `P_{T⁽ⁿ⁾_{σ⁻ⁿω}(0)}`.
pub fn iterated_transfer_error(path: &CocyclePath, n: usize, grid: &CircleGrid) -> Result<f64> {
    let mut f = GridFunction::constant(*grid, 1.0);
    for j in (1..=n as i64).rev() {
        f = transfer_apply(path.map_at(-j)?, &f)?;
    }
    let pole = path.backward_compose_at_zero(n)?;
    Ok(grid.nodes().zip(f.values()).map(|(z, v)| (v - poisson_raw(pole, z.value())).abs()).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blaschke::presets;
    use crate::cocycle::{sample_path, CocycleConfig, DrivingSystem, MapTable};

    fn constant_path(t: BlaschkeProduct, n_back: usize) -> CocyclePath {
        let d = DrivingSystem::bernoulli(vec![1.0]).unwrap();
        sample_path(&d, &MapTable::new(vec![t]).unwrap(), 0, n_back, 2, UnitComplex::ONE).unwrap()
    }

    fn mixed_path(seed: u64) -> CocyclePath {
        let cfg = CocycleConfig::mixed_bernoulli(0.2).unwrap();
        sample_path(&cfg.driving, &cfg.table().unwrap(), seed, MAX_ITERATIONS + 10, 10, UnitComplex::ONE).unwrap()
    }

    #[test]
    fn origin_fixing_maps_converge_immediately() {
        let r = random_fixed_point(&constant_path(presets::squaring(), 100), &Default::default()).unwrap();
        assert_eq!(r.status, FixedPointStatus::Converged);
        assert_eq!(r.n_used, 1);
        assert_eq!(r.x_omega.unwrap().value(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn constant_boundary_attractor_diverges_to_circle() {
        let r = random_fixed_point(&constant_path(presets::boundary_attractor(), 2000), &Default::default()).unwrap();
        assert_eq!(r.status, FixedPointStatus::BoundaryDivergence);
        assert!(r.x_omega.is_none());
        assert!((r.iterates.last().unwrap() + 1.0).norm() < 1e-3);
    }

    #[test]
    fn mixed_cocycle_converges_geometrically() {
        let r = random_fixed_point(&mixed_path(1), &Default::default()).unwrap();
        assert_eq!(r.status, FixedPointStatus::Converged, "{:?}", r.n_used);
        assert!(r.fitted_rate.unwrap() < 1.0);
    }

    #[test]
    fn short_window_reports_max_iterations() {
        let cfg = CocycleConfig::mixed_bernoulli(0.2).unwrap();
        let p = sample_path(&cfg.driving, &cfg.table().unwrap(), 1, 3, 0, UnitComplex::ONE).unwrap();
        let r = random_fixed_point(&p, &Default::default()).unwrap();
        assert_eq!(r.status, FixedPointStatus::MaxIterations);
        assert!(r.require().is_err());
    }

    #[test]
    fn transfer_of_one_for_squaring() {
        let g = CircleGrid::new(64).unwrap();
        let out = transfer_apply(&presets::squaring(), &GridFunction::constant(g, 1.0)).unwrap();
        assert!(out.values().iter().all(|v| (v - 1.0).abs() < 1e-14));
    }

    #[test]
    fn transfer_of_one_is_poisson_at_image_of_origin() {
        let g = CircleGrid::new(256).unwrap();
        let t = BlaschkeProduct::from_parts(0.1, &[Complex64::new(0.3, 0.2), Complex64::new(-0.5, 0.4)]).unwrap();
        let out = transfer_apply(&t, &GridFunction::constant(g, 1.0)).unwrap();
        let x = DiscPoint::new(t.apply(Complex64::new(0.0, 0.0))).unwrap();
        let err = g.nodes().zip(out.values()).map(|(z, v)| (v - poisson_density(x, z)).abs()).fold(0.0, f64::max);
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn transfer_of_poisson_kernel() {
        let g = CircleGrid::new(512).unwrap();
        let t = presets::boundary_attractor();
        let x = DiscPoint::real(0.2).unwrap();
        let f = g.sample(|z| poisson_density(x, z));
        let out = transfer_apply(&t, &f).unwrap();
        let y = DiscPoint::new(t.apply(x.value())).unwrap();
        let err = g.nodes().zip(out.values()).map(|(z, v)| (v - poisson_density(y, z)).abs()).fold(0.0, f64::max);
        assert!(err < 1e-8, "{err}");
        assert!((out.integral() - f.integral()).abs() < 1e-8);
    }

    #[test]
    fn equivariance_for_origin_fixing_and_deterministic_maps() {
        let g = CircleGrid::new(256).unwrap();
        let opts = FixedPointOptions::default();
        let p = constant_path(presets::squaring(), 50);
        assert!(density_equivariance_residual(&p, &g, &opts).unwrap() < 1e-8);
        let t = BlaschkeProduct::from_parts(0.0, &[Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.0)]).unwrap();
        let p = constant_path(t, 50);
        assert!(density_equivariance_residual(&p, &g, &opts).unwrap() < 1e-8);
    }

    #[test]
    fn equivariance_on_mixed_cocycle() {
        let g = CircleGrid::new(512).unwrap();
        let opts = FixedPointOptions::default();
        let p = mixed_path(3);
        assert!(density_equivariance_residual(&p, &g, &opts).unwrap() < 1e-6);
        assert!(pole_equivariance_residual(&p, &opts).unwrap() < 10.0 * TOL_FP);
    }

    #[test]
    fn convergence_curves() {
        let g = CircleGrid::new(256).unwrap();
        let opts = FixedPointOptions::default();
        let flat =
            convergence_curve(&constant_path(presets::squaring(), 50), InitialDensity::One, 10, &g, &opts).unwrap();
        assert!(flat.iter().all(|&(_, d)| d == 0.0));

        let p = mixed_path(4);
        let curve = convergence_curve(&p, InitialDensity::One, 60, &g, &opts).unwrap();
        let other =
            convergence_curve(&p, InitialDensity::PoissonAt(DiscPoint::real(0.5).unwrap()), 60, &g, &opts).unwrap();
        assert!(curve[59].1 < 1e-6 && other[59].1 < 1e-6);
        assert!(curve[59].1 < curve[9].1);
    }

    #[test]
    fn iterated_transfer_matches_closed_form() {
        let g = CircleGrid::new(512).unwrap();
        let p = mixed_path(5);
        for n in [1, 3, 6] {
            assert!(iterated_transfer_error(&p, n, &g).unwrap() < 1e-6);
        }
    }

    #[test]
    fn rate_fit_recovers_geometric_sequence() {
        let d: Vec<f64> = (1..=40).map(|n| 0.7_f64.powi(n)).collect();
        assert!((fit_rate(&d).unwrap() - 0.7).abs() < 1e-12);
        assert!(fit_rate(&[0.0, 0.0]).is_none());
    }
}
