//! Fibre and base entropy estimators.
//!
//! The fibre entropy of an admissible cocycle is its Lyapunov exponent
//! `∫∫ log|T'_ω| dμ_ω dℙ`. Two estimators are provided: a Birkhoff average
//! of `log|T'|` along a forward orbit, and an average over fibres of the
//! quadrature `∫ log|T'_ω| P_{x_ω} dm` at the random fixed point. Averaged
//! over the rotation family `θ·T_ω`, the fibre entropy equals the Lebesgue
//! integral `∫∫ log|T'_ω| dm dℙ`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::acim::{random_fixed_point_at, FixedPointOptions, FixedPointStatus};
use crate::blaschke::{poisson_raw, BlaschkeProduct, UnitComplex};
use crate::circle::{CircleGrid, GridFunction};
use crate::cocycle::{sample_path, CocyclePath, DrivingSystem, MapTable};
use crate::error::{Error, Result};

pub const DEFAULT_BURN_IN: usize = 1_000;
pub const DEFAULT_THETA_POINTS: usize = 128;
const ORBIT_BATCHES: usize = 25;
const FIBRE_BATCHES: usize = 10;

/// A point estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

/// Mean and batch-means standard error of a correlated series.
pub fn batch_means(values: &[f64], batches: usize) -> Estimate {
    let n = values.len();
    let value = values.iter().sum::<f64>() / n as f64;
    let batches = batches.min(n).max(1);
    let size = n / batches;
    if batches < 2 || size == 0 {
        return Estimate { value, stderr: f64::NAN };
    }
    let means: Vec<f64> =
        (0..batches).map(|b| values[b * size..(b + 1) * size].iter().sum::<f64>() / size as f64).collect();
    let m = means.iter().sum::<f64>() / batches as f64;
    let var = means.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (batches - 1) as f64;
    Estimate { value, stderr: (var / batches as f64).sqrt() }
}

/// Kolmogorov–Sinai entropy of the base, in nats.
pub fn base_entropy(driving: &DrivingSystem) -> f64 {
    match driving {
        DrivingSystem::Bernoulli { p } => -p.iter().filter(|&&q| q > 0.0).map(|q| q * q.ln()).sum::<f64>(),
        DrivingSystem::Rotation { .. } => 0.0,
    }
}

/// `∫ log|T'| dm` by trapezoid quadrature.
pub fn lebesgue_log_deriv(t: &BlaschkeProduct, grid: &CircleGrid) -> f64 {
    grid.integrate(|z| t.log_deriv_on_circle(z))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitOptions {
    pub burn_in: usize,
    pub start: UnitComplex,
}

impl Default for OrbitOptions {
    fn default() -> Self {
        OrbitOptions { burn_in: DEFAULT_BURN_IN, start: UnitComplex::ONE }
    }
}

/// Birkhoff average of `log|T'_{s_k}(z_k)|` along `z_{k+1} = θT_{s_k}(z_k)`,
/// after discarding `burn_in` steps. Needs `burn_in + n_steps` forward symbols.
pub fn fibre_entropy_orbit(path: &CocyclePath, n_steps: usize, opts: &OrbitOptions) -> Result<Estimate> {
    if n_steps < 100 {
        return Err(Error::InvalidInput(format!("n_steps = {n_steps} must be at least 100")));
    }
    let symbols = path.symbols(0, (opts.burn_in + n_steps) as i64)?;
    let mut z = opts.start;
    let mut logs = Vec::with_capacity(n_steps);
    for (k, &s) in symbols.iter().enumerate() {
        let t = path.effective_map(s);
        if k >= opts.burn_in {
            logs.push(t.log_deriv_on_circle(z));
        }
        z = t.map_circle(z);
    }
    Ok(batch_means(&logs, ORBIT_BATCHES))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureEstimate {
    pub estimate: Estimate,
    pub fibres_used: usize,
    /// Fibres whose backward iteration ran into the circle.
    pub boundary_divergent: usize,
    /// Fibres that hit the iteration cap.
    pub unconverged: usize,
}

/// `∫ log|T'_{s_k}| P_{x_k} dm` for the fibre at index `k`.
pub fn fibre_integrand(path: &CocyclePath, k: i64, grid: &CircleGrid, opts: &FixedPointOptions) -> Result<Option<f64>> {
    let r = random_fixed_point_at(path, k, opts)?;
    let Some(x) = r.converged() else { return Ok(None) };
    let t = path.map_at(k)?;
    Ok(Some(grid.integrate(|z| t.log_deriv_on_circle(z) * poisson_raw(x.value(), z.value()))))
}

/// Average over fibres `k = 0..n_fibres` of `∫ log|T'_{s_k}| dμ_{σᵏω}`.
/// The path must reach `n_back ≥ opts.max_n` into the past.
pub fn fibre_entropy_quadrature(
    path: &CocyclePath,
    n_fibres: usize,
    grid: &CircleGrid,
    opts: &FixedPointOptions,
) -> Result<QuadratureEstimate> {
    let per_fibre: Vec<(Option<f64>, FixedPointStatus)> = (0..n_fibres as i64)
        .into_par_iter()
        .map(|k| {
            let r = random_fixed_point_at(path, k, opts)?;
            let v = match r.converged() {
                Some(x) => {
                    let t = path.map_at(k)?;
                    Some(grid.integrate(|z| t.log_deriv_on_circle(z) * poisson_raw(x.value(), z.value())))
                }
                None => None,
            };
            Ok((v, r.status))
        })
        .collect::<Result<_>>()?;
    let values: Vec<f64> = per_fibre.iter().filter_map(|p| p.0).collect();
    let boundary_divergent = per_fibre.iter().filter(|p| p.1 == FixedPointStatus::BoundaryDivergence).count();
    let unconverged = per_fibre.iter().filter(|p| p.1 == FixedPointStatus::MaxIterations).count();
    if values.is_empty() {
        return Err(Error::NotConverged(format!("no fibre converged out of {n_fibres}")));
    }
    Ok(QuadratureEstimate {
        estimate: batch_means(&values, FIBRE_BATCHES),
        fibres_used: values.len(),
        boundary_divergent,
        unconverged,
    })
}

/// Summary of entropy estimates for one cocycle and one `θ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub fibre_orbit: Estimate,
    pub fibre_quadrature: Option<QuadratureEstimate>,
    pub base_entropy: f64,
    /// `fibre_orbit + base_entropy`.
    pub total: f64,
    pub n_steps: usize,
    pub theta_turns: f64,
}

impl EntropyReport {
    pub fn new(
        path: &CocyclePath,
        n_steps: usize,
        n_fibres: Option<usize>,
        grid: &CircleGrid,
        fp: &FixedPointOptions,
    ) -> Result<Self> {
        let fibre_orbit = fibre_entropy_orbit(path, n_steps, &OrbitOptions::default())?;
        let fibre_quadrature = match n_fibres {
            Some(n) => Some(fibre_entropy_quadrature(path, n, grid, fp)?),
            None => None,
        };
        let base = base_entropy(path.driving());
        Ok(EntropyReport {
            fibre_orbit,
            fibre_quadrature,
            base_entropy: base,
            total: fibre_orbit.value + base,
            n_steps,
            theta_turns: path.theta().turns(),
        })
    }
}

/// Which fibre-entropy estimator a sweep uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Estimator {
    Orbit,
    Quadrature,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub t: f64,
    pub value: Option<f64>,
    pub stderr: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaSweep {
    pub points: Vec<SweepPoint>,
    /// Mean of the successful points.
    pub mean: f64,
    /// Standard error of `mean`, treating points as independent.
    pub stderr: f64,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOptions {
    pub n_steps: usize,
    pub seed: u64,
    pub estimator: Estimator,
    /// Fibres per point for the quadrature estimator.
    pub n_fibres: usize,
    pub grid: CircleGrid,
}

impl SweepOptions {
    pub fn orbit(n_steps: usize, seed: u64) -> Self {
        SweepOptions { n_steps, seed, estimator: Estimator::Orbit, n_fibres: 200, grid: CircleGrid::default() }
    }
}

/// `t_j = j/n`, `j = 0..n`.
pub fn uniform_theta_grid(n: usize) -> Vec<f64> {
    (0..n).map(|j| j as f64 / n as f64).collect()
}

/// SplitMix64 finalizer, used to derive one seed per sweep point.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn sweep_point(
    driving: &DrivingSystem,
    table: &MapTable,
    t: f64,
    index: usize,
    opts: &SweepOptions,
) -> Result<Estimate> {
    let theta = UnitComplex::from_turns(t);
    let seed = derive_seed(opts.seed, index as u64);
    match opts.estimator {
        Estimator::Orbit => {
            let orbit = OrbitOptions::default();
            let path = sample_path(driving, table, seed, 0, orbit.burn_in + opts.n_steps, theta)?;
            fibre_entropy_orbit(&path, opts.n_steps, &orbit)
        }
        Estimator::Quadrature => {
            let fp = FixedPointOptions::default();
            let path = sample_path(driving, table, seed, fp.max_n, opts.n_fibres, theta)?;
            Ok(fibre_entropy_quadrature(&path, opts.n_fibres, &opts.grid, &fp)?.estimate)
        }
    }
}

/// Fibre entropy of `θ·T` for `θ = e^{2πit}` over `t_grid`, in parallel.
/// Failures at individual points are recorded rather than propagated.
pub fn theta_sweep(
    driving: &DrivingSystem,
    table: &MapTable,
    t_grid: &[f64],
    opts: &SweepOptions,
) -> Result<ThetaSweep> {
    if t_grid.is_empty() {
        return Err(Error::InvalidInput("empty θ grid".into()));
    }
    let points: Vec<SweepPoint> = t_grid
        .par_iter()
        .enumerate()
        .map(|(i, &t)| match sweep_point(driving, table, t, i, opts) {
            Ok(e) => SweepPoint { t, value: Some(e.value), stderr: Some(e.stderr), error: None },
            Err(err) => SweepPoint { t, value: None, stderr: None, error: Some(err.to_string()) },
        })
        .collect();
    let ok: Vec<f64> = points.iter().filter_map(|p| p.value).collect();
    let failures = points.len() - ok.len();
    if ok.is_empty() {
        return Err(Error::NotConverged("every θ point failed".into()));
    }
    let mean = ok.iter().sum::<f64>() / ok.len() as f64;
    let stderr = if ok.len() > 1 {
        (ok.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (ok.len() - 1) as f64 / ok.len() as f64).sqrt()
    } else {
        f64::NAN
    };
    Ok(ThetaSweep { points, mean, stderr, failures })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticEntropy {
    /// `Σ_j ℙ(j) ∫ log|T_j'| dm`.
    pub fibre: f64,
    pub base: f64,
    pub total: f64,
}

/// θ-averaged entropy `Σ_j ℙ(j) ∫ log|T_j'| dm + h(σ)`.
pub fn average_entropy_analytic(
    table: &MapTable,
    driving: &DrivingSystem,
    grid: &CircleGrid,
) -> Result<AnalyticEntropy> {
    let probs = driving.symbol_probabilities();
    if probs.len() != table.len() {
        return Err(Error::InvalidInput("driving alphabet and table size differ".into()));
    }
    let fibre = table.maps().iter().zip(&probs).map(|(t, p)| p * lebesgue_log_deriv(t, grid)).sum();
    let base = base_entropy(driving);
    Ok(AnalyticEntropy { fibre, base, total: fibre + base })
}

/// `|mean_θ ∫ f∘T⁽ⁿ⁾_{σ⁻ⁿω,θ} dm − ∫ f dm|` for one sampled `ω`.
///
/// The inner integral is evaluated as `∫ f · P_{T⁽ⁿ⁾_θ(0)} dm`; direct
/// quadrature of `f∘T⁽ⁿ⁾` is only resolvable for small `n`.
pub fn lebesgue_theta_average_residual(
    driving: &DrivingSystem,
    table: &MapTable,
    f: &GridFunction,
    n: usize,
    theta_grid: &[f64],
    seed: u64,
) -> Result<f64> {
    if theta_grid.is_empty() {
        return Err(Error::InvalidInput("empty θ grid".into()));
    }
    let path = sample_path(driving, table, seed, n, 0, UnitComplex::ONE)?;
    let grid = f.grid();
    let mean = theta_grid
        .iter()
        .map(|&t| {
            let pole = path.with_theta(UnitComplex::from_turns(t)).backward_compose_at_zero(n)?;
            Ok(grid.nodes().zip(f.values()).map(|(z, v)| v * poisson_raw(pole, z.value())).sum::<f64>()
                / grid.size() as f64)
        })
        .sum::<Result<f64>>()?
        / theta_grid.len() as f64;
    Ok((mean - f.integral()).abs())
}

/// `∫ f∘T⁽ⁿ⁾_{σ⁻ⁿω,θ} dm` by direct quadrature of the composition, with `f`
/// evaluated through its trigonometric interpolant.
pub fn composed_integral_direct(path: &CocyclePath, n: usize, f: &GridFunction, quad: &CircleGrid) -> Result<f64> {
    let ip = f.interpolant();
    let mut total = 0.0;
    for z in quad.nodes() {
        let w = path.backward_compose(0, n, z.value())?;
        total += ip.eval(UnitComplex::new(w)?);
    }
    Ok(total / quad.size() as f64)
}

/// `∫ f · P_{T⁽ⁿ⁾_{σ⁻ⁿω,θ}(0)} dm`, the same integral through the pushforward identity.
pub fn composed_integral_poisson(path: &CocyclePath, n: usize, f: &GridFunction) -> Result<f64> {
    let pole: Complex64 = path.backward_compose_at_zero(n)?;
    let grid = f.grid();
    Ok(grid.nodes().zip(f.values()).map(|(z, v)| v * poisson_raw(pole, z.value())).sum::<f64>() / grid.size() as f64)
}
