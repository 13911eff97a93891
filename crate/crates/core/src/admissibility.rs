//! Checks for admissible cocycles: expansion on average, integrability of
//! `degree / inf|T'|`, and finiteness of the distortion `∫|T''/T'²| dm`.
//! Also covering times of arcs and the origin-fixing family of maps that
//! fails integrability while keeping Lebesgue measure invariant.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::acim::{random_fixed_point, FixedPointOptions};
use crate::blaschke::{BlaschkeProduct, DiscPoint, UnitComplex};
use crate::circle::{CircleGrid, CircleLift};
use crate::cocycle::{CocyclePath, DrivingSystem, MapTable};
use crate::error::{Error, Result};

pub const INF_GRID: usize = 8192;
pub const DEFAULT_J_MAX: usize = 50;
const GOLDEN: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InfDeriv {
    /// Refined minimum of `|T'|` over the circle.
    pub value: f64,
    /// Grid minimum, an upper bound for `value`.
    pub grid_value: f64,
    /// Martin's lower bound.
    pub martin_bound: f64,
    /// Location of the minimum, in turns.
    pub argmin: f64,
}

/// `inf |T'|` over the circle: grid minimum on `n` nodes, then golden-section
/// search on the lift slope between the neighbouring nodes.
pub fn inf_deriv(t: &BlaschkeProduct, n: usize) -> Result<InfDeriv> {
    let grid = CircleGrid::new(n)?;
    let (j_min, grid_value) = grid
        .nodes()
        .map(|z| t.deriv_modulus_on_circle(z))
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (j, v)| if v < acc.1 { (j, v) } else { acc });
    let slope = |s: f64| t.deriv_modulus_on_circle(UnitComplex::from_turns(s));
    let h = 1.0 / n as f64;
    let (mut a, mut b) = (grid.turns(j_min) - h, grid.turns(j_min) + h);
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let (mut fc, mut fd) = (slope(c), slope(d));
    while b - a > 1e-12 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = slope(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = slope(d);
        }
    }
    let argmin = 0.5 * (a + b);
    let value = slope(argmin).min(grid_value);
    Ok(InfDeriv { value, grid_value, martin_bound: t.martin_bound(), argmin: argmin.rem_euclid(1.0) })
}

pub fn martin_bound(t: &BlaschkeProduct) -> f64 {
    t.martin_bound()
}

/// `∫ |T''/T'²| dm` by trapezoid quadrature.
pub fn variation_one_over_deriv(t: &BlaschkeProduct, grid: &CircleGrid) -> f64 {
    grid.integrate(|z| t.distortion_on_circle(z))
}

/// Total variation of `t ↦ 1/S̃'(t)` over one turn, `∫ |S̃''|/S̃'² dt`.
/// It never exceeds `2π ∫ |T''/T'²| dm`.
pub fn inverse_slope_variation(t: &BlaschkeProduct, grid: &CircleGrid) -> f64 {
    let lift = CircleLift::new(t);
    (0..grid.size())
        .map(|j| {
            let s = grid.turns(j);
            lift.curvature(s).abs() / lift.slope(s).powi(2)
        })
        .sum::<f64>()
        / grid.size() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapAdmissibility {
    pub inf_deriv: f64,
    pub martin_bound: f64,
    pub variation: f64,
    pub degree: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Expectations {
    /// `E log inf|T'|`, positive for expansion on average.
    pub e_log_inf_deriv: f64,
    /// `E degree / inf|T'|`.
    pub e_deg_over_inf: f64,
    /// `E log⁺ ∫|T''/T'²| dm`.
    pub e_variation_log_plus: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    AdmissibleEvidence,
    /// Numbered admissibility condition that fails (2: expansion on
    /// average, 3: degree integrability, 4: distortion integrability).
    FailsCondition(u8),
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub per_map: Vec<MapAdmissibility>,
    pub probabilities: Vec<f64>,
    pub expectations: Expectations,
    pub verdict: Verdict,
    /// For two-map tables: the probability of symbol 0 at which
    /// `E log inf|T'|` changes sign.
    pub critical_probability: Option<f64>,
    /// `inf|T'| ≥ martin_bound` for every map.
    pub martin_consistent: bool,
}

/// Exact finite-sum expectations over the symbol distribution and a verdict.
pub fn check_admissible(
    table: &MapTable,
    driving: &DrivingSystem,
    inf_grid: usize,
    quad: &CircleGrid,
) -> Result<AdmissibilityReport> {
    let probs = driving.symbol_probabilities();
    if probs.len() != table.len() {
        return Err(Error::InvalidInput("driving alphabet and table size differ".into()));
    }
    let per_map = table
        .maps()
        .iter()
        .map(|t| {
            let inf = inf_deriv(t, inf_grid)?;
            Ok(MapAdmissibility {
                inf_deriv: inf.value,
                martin_bound: inf.martin_bound,
                variation: variation_one_over_deriv(t, quad),
                degree: t.degree(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let expect = |f: &dyn Fn(&MapAdmissibility) -> f64| -> f64 {
        per_map.iter().zip(&probs).filter(|(_, &p)| p > 0.0).map(|(m, p)| p * f(m)).sum()
    };
    let expectations = Expectations {
        e_log_inf_deriv: expect(&|m| m.inf_deriv.ln()),
        e_deg_over_inf: expect(&|m| m.degree as f64 / m.inf_deriv),
        e_variation_log_plus: expect(&|m| m.variation.ln().max(0.0)),
    };
    let verdict = if [expectations.e_log_inf_deriv, expectations.e_deg_over_inf, expectations.e_variation_log_plus]
        .iter()
        .any(|v| v.is_nan())
    {
        Verdict::Inconclusive
    } else if expectations.e_log_inf_deriv <= 0.0 {
        Verdict::FailsCondition(2)
    } else if !expectations.e_deg_over_inf.is_finite() {
        Verdict::FailsCondition(3)
    } else if !expectations.e_variation_log_plus.is_finite() {
        Verdict::FailsCondition(4)
    } else {
        Verdict::AdmissibleEvidence
    };
    let critical_probability = match per_map.as_slice() {
        [m0, m1] => {
            let (l0, l1) = (m0.inf_deriv.ln(), m1.inf_deriv.ln());
            (l0 * l1 < 0.0).then(|| -l1 / (l0 - l1))
        }
        _ => None,
    };
    let martin_consistent = per_map.iter().all(|m| m.inf_deriv >= m.martin_bound - 1e-9);
    Ok(AdmissibilityReport {
        per_map,
        probabilities: probs,
        expectations,
        verdict,
        critical_probability,
        martin_consistent,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoveringResult {
    /// First `n` with `m(T⁽ⁿ⁾_{σ⁻ⁿω}(A)) = 1`.
    pub n: usize,
    /// Mean of `log inf|T'|` over the `n` maps used.
    pub lambda_hat: f64,
    /// `⌈−(2/Λ̂) log m(A)⌉` when `Λ̂ > 0`.
    pub formula_bound: Option<usize>,
}

/// Covering time of the arc `[t_a, t_b]` under backward-labelled
/// compositions `T_{s_{−1}} ∘ … ∘ T_{s_{−n}}`, up to `cap` steps.
pub fn covering_time(path: &CocyclePath, (t_a, t_b): (f64, f64), cap: usize) -> Result<CoveringResult> {
    let measure = t_b - t_a;
    if !(0.0..=1.0).contains(&t_a) || !(measure > 0.0 && measure < 1.0) {
        return Err(Error::InvalidInput(format!("arc [{t_a}, {t_b}] must have measure in (0, 1)")));
    }
    let cap = cap.min(path.n_back());
    let lifts: Vec<CircleLift> = (0..path.table().len()).map(|s| CircleLift::new(path.effective_map(s))).collect();
    let log_inf =
        path.table().maps().iter().map(|t| Ok(inf_deriv(t, INF_GRID)?.value.ln())).collect::<Result<Vec<f64>>>()?;
    for n in 1..=cap {
        let symbols = path.symbols(-(n as i64), 0)?;
        let mut arc = (t_a, t_b);
        for &s in symbols {
            arc = lifts[s].image_arc(arc);
            if arc.1 - arc.0 >= 1.0 {
                break;
            }
        }
        if arc.1 - arc.0 >= 1.0 {
            let lambda_hat = symbols.iter().map(|&s| log_inf[s]).sum::<f64>() / n as f64;
            let formula_bound = (lambda_hat > 0.0).then(|| (-(2.0 / lambda_hat) * measure.ln()).ceil() as usize);
            return Ok(CoveringResult { n, lambda_hat, formula_bound });
        }
    }
    Err(Error::NotCovered(cap))
}

/// Smallest zero modulus for which a degree-`n` origin-fixing map with all
/// other zeros at that modulus on one side keeps `inf|T'| ≤ c + 1`:
/// `(n − 1 − c)/(n − 1 + c)` when `n − 1 > c`, else 0.
pub fn origin_min_zero_magnitude(c: f64, j: usize) -> f64 {
    let m = ((j + 1) * (j + 1) - 1) as f64;
    if m > c {
        (m - c) / (m + c)
    } else {
        0.0
    }
}

/// `ρ z ∏_{i=2}^{(j+1)²} (z − a)/(1 − az)` with every non-origin zero at `a = zero_magnitude`.
pub fn origin_example_map(c: f64, j: usize, zero_magnitude: f64, rho_turns: f64) -> Result<BlaschkeProduct> {
    if c.is_nan() || c <= 0.0 || j < 1 {
        return Err(Error::HypothesisViolated(format!("need c > 0 and j ≥ 1, got c = {c}, j = {j}")));
    }
    let min = origin_min_zero_magnitude(c, j);
    if !(zero_magnitude >= min - 1e-15 && zero_magnitude < 1.0) {
        return Err(Error::HypothesisViolated(format!("zero magnitude {zero_magnitude} must lie in [{min}, 1)")));
    }
    let degree = (j + 1) * (j + 1);
    let mut zeros = vec![DiscPoint::ORIGIN];
    zeros.extend(std::iter::repeat_n(DiscPoint::real(zero_magnitude)?, degree - 1));
    BlaschkeProduct::new(UnitComplex::from_turns(rho_turns), zeros)
}

/// Partial sums `(6/π²) Σ_{j ≤ J} (j + 1)²/j²` of the divergent series bounding
/// `E n/inf|T'|` from below (up to the factor `1/(c + 1)`).
pub fn origin_partial_sums(js: &[usize]) -> Vec<(usize, f64)> {
    let j_max = js.iter().copied().max().unwrap_or(0);
    let mut out = Vec::with_capacity(js.len());
    let mut acc = 0.0;
    for j in 1..=j_max {
        acc += ((j + 1) * (j + 1)) as f64 / (j * j) as f64;
        if js.contains(&j) {
            out.push((j, 6.0 / (PI * PI) * acc));
        }
    }
    out
}

/// Origin-fixing maps for `j = 1..=j_max` at minimal zero modulus, with a
/// rotation driving whose symbol `j` has probability proportional to `1/(j + 1)²`.
pub fn origin_example_cocycle(c: f64, j_max: usize, rho_turns: f64, alpha: f64) -> Result<(MapTable, DrivingSystem)> {
    let maps = (1..=j_max)
        .map(|j| origin_example_map(c, j, origin_min_zero_magnitude(c, j), rho_turns))
        .collect::<Result<Vec<_>>>()?;
    let weights: Vec<f64> = (1..=j_max).map(|j| 1.0 / ((j + 1) * (j + 1)) as f64).collect();
    let total: f64 = weights.iter().sum();
    let mut cuts = Vec::with_capacity(j_max.saturating_sub(1));
    let mut acc = 0.0;
    for w in &weights[..j_max - 1] {
        acc += w / total;
        cuts.push(acc);
    }
    Ok((MapTable::new(maps)?, DrivingSystem::rotation(alpha, cuts)?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OriginMapCheck {
    pub j: usize,
    pub degree: usize,
    pub zero_magnitude: f64,
    pub inf_deriv: f64,
    pub bound: f64,
    pub within_bound: bool,
    pub expanding: bool,
    pub fixes_origin: bool,
    /// `x_ω` from backward iteration of the constant cocycle.
    pub random_fixed_point: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OriginExampleReport {
    pub c: f64,
    pub maps: Vec<OriginMapCheck>,
    pub partial_sums: Vec<(usize, f64)>,
    /// Partial sums scaled by `1/(c + 1)`, lower bounds for `E n/inf|T'|`.
    pub admissibility_integral_lower_bounds: Vec<(usize, f64)>,
    pub partial_sums_increasing: bool,
}

pub fn check_origin_map(c: f64, j: usize, zero_magnitude: f64, rho_turns: f64) -> Result<OriginMapCheck> {
    let t = origin_example_map(c, j, zero_magnitude, rho_turns)?;
    let inf = inf_deriv(&t, INF_GRID)?.value;
    let d = DrivingSystem::bernoulli(vec![1.0])?;
    let path = crate::cocycle::sample_path(&d, &MapTable::new(vec![t.clone()])?, 0, 64, 1, UnitComplex::ONE)?;
    let x = random_fixed_point(&path, &FixedPointOptions::default())?.converged().map(|x| [x.value().re, x.value().im]);
    Ok(OriginMapCheck {
        j,
        degree: t.degree(),
        zero_magnitude,
        inf_deriv: inf,
        bound: c + 1.0,
        within_bound: inf <= c + 1.0 + 1e-9,
        expanding: inf > 1.0,
        fixes_origin: t.apply(Complex64::new(0.0, 0.0)) == Complex64::new(0.0, 0.0),
        random_fixed_point: x,
    })
}

/// Checks every `j ≤ j_max` at the minimal zero modulus and reports partial
/// sums of the divergent series at `sum_points`.
pub fn origin_example_checks(
    c: f64,
    j_max: usize,
    rho_turns: f64,
    sum_points: &[usize],
) -> Result<OriginExampleReport> {
    let maps = (1..=j_max)
        .map(|j| check_origin_map(c, j, origin_min_zero_magnitude(c, j), rho_turns))
        .collect::<Result<Vec<_>>>()?;
    let partial_sums = origin_partial_sums(sum_points);
    let partial_sums_increasing = partial_sums.windows(2).all(|w| w[1].1 > w[0].1);
    let admissibility_integral_lower_bounds = partial_sums.iter().map(|&(j, s)| (j, s / (c + 1.0))).collect();
    Ok(OriginExampleReport { c, maps, partial_sums, admissibility_integral_lower_bounds, partial_sums_increasing })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blaschke::presets;
    use crate::cocycle::{sample_path, CocycleConfig};

    #[test]
    fn inf_deriv_values() {
        assert!((inf_deriv(&presets::squaring(), INF_GRID).unwrap().value - 2.0).abs() < 1e-13);
        let t1 = inf_deriv(&presets::boundary_attractor(), INF_GRID).unwrap();
        assert!((t1.value - 6.0 / 7.0).abs() < 1e-12);
        assert!((t1.argmin - 0.5).abs() < 1e-6);
        assert!((inf_deriv(&BlaschkeProduct::rotation_map(0.4), INF_GRID).unwrap().value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn refinement_improves_on_coarse_grid() {
        let t = BlaschkeProduct::from_parts(0.0, &[Complex64::new(0.5, 0.6), Complex64::new(-0.2, 0.1)]).unwrap();
        let coarse = inf_deriv(&t, 16).unwrap();
        let fine = inf_deriv(&t, 1 << 16).unwrap();
        assert!(coarse.value <= coarse.grid_value);
        assert!((coarse.value - fine.value).abs() < 1e-10);
        assert!(fine.value >= fine.martin_bound);
    }

    #[test]
    fn variation_values() {
        let g = CircleGrid::new(4096).unwrap();
        assert!(variation_one_over_deriv(&BlaschkeProduct::rotation_map(0.3), &g).abs() < 1e-15);
        assert!((variation_one_over_deriv(&presets::squaring(), &g) - 0.5).abs() < 1e-14);
        let t1 = presets::boundary_attractor();
        let v = variation_one_over_deriv(&t1, &g);
        let reference = variation_one_over_deriv(&t1, &CircleGrid::new(1 << 15).unwrap());
        assert!((v - reference).abs() < 1e-6, "{v} vs {reference}");
    }

    #[test]
    fn inverse_slope_variation_matches_direct_sum() {
        let t = BlaschkeProduct::from_parts(0.1, &[Complex64::new(0.4, 0.3), Complex64::new(-0.6, 0.0)]).unwrap();
        let lift = CircleLift::new(&t);
        let n = 1 << 16;
        let direct: f64 = (0..n)
            .map(|j| (1.0 / lift.slope((j + 1) as f64 / n as f64) - 1.0 / lift.slope(j as f64 / n as f64)).abs())
            .sum();
        let g = CircleGrid::new(4096).unwrap();
        let v = inverse_slope_variation(&t, &g);
        assert!((v - direct).abs() < 1e-5, "{v} vs {direct}");
        assert!(v <= 2.0 * PI * variation_one_over_deriv(&t, &g));
    }

    #[test]
    fn admissibility_of_mixed_table() {
        let g = CircleGrid::new(4096).unwrap();
        let threshold = (6.0f64 / 7.0).ln() / (3.0f64 / 7.0).ln();
        let cfg = CocycleConfig::mixed_bernoulli(0.2).unwrap();
        let r = check_admissible(&cfg.table().unwrap(), &cfg.driving, INF_GRID, &g).unwrap();
        assert_eq!(r.verdict, Verdict::AdmissibleEvidence);
        assert!((r.critical_probability.unwrap() - threshold).abs() < 1e-9);
        assert!((threshold - 0.182).abs() < 1e-3);
        assert!(r.martin_consistent);
        let cfg = CocycleConfig::mixed_bernoulli(0.1).unwrap();
        let r = check_admissible(&cfg.table().unwrap(), &cfg.driving, INF_GRID, &g).unwrap();
        assert_eq!(r.verdict, Verdict::FailsCondition(2));
    }

    #[test]
    fn rotations_fail_expansion() {
        let g = CircleGrid::new(256).unwrap();
        let table =
            MapTable::new(vec![BlaschkeProduct::rotation_map(0.1), BlaschkeProduct::rotation_map(0.7)]).unwrap();
        let d = DrivingSystem::bernoulli(vec![0.5, 0.5]).unwrap();
        let r = check_admissible(&table, &d, 1024, &g).unwrap();
        assert_eq!(r.verdict, Verdict::FailsCondition(2));
        assert!(r.critical_probability.is_none());
    }

    #[test]
    fn covering_times() {
        let d = DrivingSystem::bernoulli(vec![1.0]).unwrap();
        let sq = MapTable::new(vec![presets::squaring()]).unwrap();
        let p = sample_path(&d, &sq, 0, 100, 0, UnitComplex::ONE).unwrap();
        let r = covering_time(&p, (0.3, 0.4), 100).unwrap();
        assert_eq!(r.n, 4);
        assert_eq!(r.formula_bound, Some(7));
        assert_eq!(covering_time(&p, (0.1, 0.7), 100).unwrap().n, 1);

        let cfg = CocycleConfig::mixed_bernoulli(0.2).unwrap();
        let p = sample_path(&cfg.driving, &cfg.table().unwrap(), 3, 10_000, 0, UnitComplex::ONE).unwrap();
        assert!(covering_time(&p, (0.45, 0.55), 10_000).unwrap().n >= 4);

        let t1 = MapTable::new(vec![presets::boundary_attractor()]).unwrap();
        let p = sample_path(&d, &t1, 0, 50, 0, UnitComplex::ONE).unwrap();
        // the arc around the attracting fixed point shrinks forever
        assert_eq!(covering_time(&p, (0.49, 0.51), 50), Err(Error::NotCovered(50)));
    }

    #[test]
    fn origin_map_construction() {
        let a = origin_min_zero_magnitude(3.0, 4);
        assert!((a - 21.0 / 27.0).abs() < 1e-15);
        let chk = check_origin_map(3.0, 4, a, 0.0).unwrap();
        assert_eq!(chk.degree, 25);
        assert!(chk.within_bound && chk.expanding && chk.fixes_origin);
        assert_eq!(chk.random_fixed_point, Some([0.0, 0.0]));
        assert!(origin_example_map(3.0, 4, 5.0 / 11.0, 0.0).is_err());
        assert!(origin_example_map(-1.0, 4, 0.9, 0.0).is_err());
    }

    #[test]
    fn partial_sums_grow() {
        let s = origin_partial_sums(&[10, 100, 1000]);
        assert_eq!(s.len(), 3);
        assert!(s[0].1 < s[1].1 && s[1].1 < s[2].1);
        // each term exceeds 1, so the J-th partial sum exceeds 6J/π²
        assert!(s[2].1 > 6.0 * 1000.0 / (PI * PI));
    }

    #[test]
    fn origin_cocycle_probabilities() {
        let (table, d) = origin_example_cocycle(3.0, 6, 0.0, std::f64::consts::FRAC_1_PI).unwrap();
        assert_eq!(table.len(), 6);
        let p = d.symbol_probabilities();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((p[0] / p[1] - 9.0 / 4.0).abs() < 1e-12);
    }
}
