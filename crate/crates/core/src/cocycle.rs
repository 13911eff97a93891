//! Driving systems, map tables and realized cocycle paths.
//!
//! A path realizes the two-sided symbol window `s_{−N} … s_{M−1}` of a base
//! point `ω` and applies `θ·T_{s_j}` at time `j`. Forward compositions start
//! at index `j`; backward compositions ending at index `k` are
//! `T_{s_{k−1}} ∘ … ∘ T_{s_{k−n}}`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::blaschke::{presets, BlaschkeProduct, UnitComplex};
use crate::circle::CircleGrid;
use crate::error::{Error, Result};

/// RNG stream used for forward symbols (and the rotation start point).
const FORWARD_STREAM: u64 = 0;
/// RNG stream used for backward symbols.
const BACKWARD_STREAM: u64 = 1;

/// Invertible ergodic base dynamics over a finite symbol alphabet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DrivingSystem {
    /// Two-sided Bernoulli shift with symbol probabilities `p`.
    Bernoulli { p: Vec<f64> },
    /// `ω ↦ ω + α (mod 1)`; symbol `j` on `[c_j, c_{j+1})` where the stored
    /// `thresholds` are the interior cut points `c_1 < … < c_{k−1}`.
    Rotation { alpha: f64, thresholds: Vec<f64> },
}

impl DrivingSystem {
    pub fn bernoulli(p: Vec<f64>) -> Result<Self> {
        let d = DrivingSystem::Bernoulli { p };
        d.validate()?;
        Ok(d)
    }

    /// Accepts interior cut points, optionally bracketed by 0 and 1.
    pub fn rotation(alpha: f64, thresholds: Vec<f64>) -> Result<Self> {
        let d = DrivingSystem::Rotation { alpha, thresholds }.normalized();
        d.validate()?;
        Ok(d)
    }

    fn normalized(self) -> Self {
        match self {
            DrivingSystem::Rotation { alpha, mut thresholds } => {
                if thresholds.first() == Some(&0.0) {
                    thresholds.remove(0);
                }
                if thresholds.last() == Some(&1.0) {
                    thresholds.pop();
                }
                DrivingSystem::Rotation { alpha, thresholds }
            }
            other => other,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            DrivingSystem::Bernoulli { p } => {
                if p.is_empty() || p.iter().any(|&q| !q.is_finite() || q < 0.0) {
                    return Err(Error::InvalidInput("probabilities must be nonnegative and finite".into()));
                }
                let s: f64 = p.iter().sum();
                if (s - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidInput(format!("probabilities sum to {s}, not 1")));
                }
            }
            DrivingSystem::Rotation { alpha, thresholds } => {
                if !alpha.is_finite() {
                    return Err(Error::InvalidInput("rotation angle must be finite".into()));
                }
                let mut prev = 0.0;
                for &c in thresholds {
                    if !(c > prev && c < 1.0) {
                        return Err(Error::InvalidInput("thresholds must increase strictly inside (0, 1)".into()));
                    }
                    prev = c;
                }
            }
        }
        Ok(())
    }

    pub fn alphabet_size(&self) -> usize {
        match self {
            DrivingSystem::Bernoulli { p } => p.len(),
            DrivingSystem::Rotation { thresholds, .. } => thresholds.len() + 1,
        }
    }

    /// Stationary symbol probabilities; for the rotation these are the
    /// threshold interval lengths.
    pub fn symbol_probabilities(&self) -> Vec<f64> {
        match self {
            DrivingSystem::Bernoulli { p } => p.clone(),
            DrivingSystem::Rotation { thresholds, .. } => {
                let mut cuts = Vec::with_capacity(thresholds.len() + 2);
                cuts.push(0.0);
                cuts.extend_from_slice(thresholds);
                cuts.push(1.0);
                cuts.windows(2).map(|w| w[1] - w[0]).collect()
            }
        }
    }

    fn rotation_symbol(thresholds: &[f64], omega: f64) -> usize {
        thresholds.iter().take_while(|&&c| omega >= c).count()
    }
}

fn bernoulli_symbol(cumulative: &[f64], u: f64) -> usize {
    cumulative.iter().position(|&c| u < c).unwrap_or(cumulative.len() - 1)
}

/// Maps indexed by symbol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapTable(Vec<BlaschkeProduct>);

impl MapTable {
    pub fn new(maps: Vec<BlaschkeProduct>) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::InvalidInput("map table is empty".into()));
        }
        Ok(MapTable(maps))
    }

    pub fn maps(&self) -> &[BlaschkeProduct] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Largest `sup_{|z| = R} |T(z)|` over the table, on a grid of the given size.
    pub fn uniform_contraction_radius(&self, radius: f64, grid: &CircleGrid) -> Result<f64> {
        if !(radius > 0.0 && radius < 1.0) {
            return Err(Error::InvalidInput(format!("radius {radius} must lie in (0, 1)")));
        }
        Ok(self
            .0
            .iter()
            .flat_map(|t| grid.nodes().map(move |z| t.apply(z.value() * radius).norm()))
            .fold(0.0, f64::max))
    }
}

/// A realized window of the cocycle above one base point.
#[derive(Debug, Clone, PartialEq)]
pub struct CocyclePath {
    driving: DrivingSystem,
    table: MapTable,
    seed: u64,
    n_back: usize,
    theta: UnitComplex,
    /// `symbols[i]` is `s_{i − n_back}`.
    symbols: Vec<usize>,
    /// `θ·T_j` for every table entry.
    effective: Vec<BlaschkeProduct>,
    omega0: Option<f64>,
}

/// Realizes symbols `s_{−n_back} … s_{n_fwd − 1}` deterministically from `seed`.
///
/// Symbols come from ChaCha20 seeded by `seed`: forward symbols (and the
/// rotation's start point) from stream 0, backward symbols from stream 1,
/// so enlarging one side of the window never changes the other.
pub fn sample_path(
    driving: &DrivingSystem,
    table: &MapTable,
    seed: u64,
    n_back: usize,
    n_fwd: usize,
    theta: UnitComplex,
) -> Result<CocyclePath> {
    driving.validate()?;
    if driving.alphabet_size() != table.len() {
        return Err(Error::InvalidInput(format!(
            "driving has {} symbols but the table has {} maps",
            driving.alphabet_size(),
            table.len()
        )));
    }
    let mut fwd = ChaCha20Rng::seed_from_u64(seed);
    fwd.set_stream(FORWARD_STREAM);
    let mut back = ChaCha20Rng::seed_from_u64(seed);
    back.set_stream(BACKWARD_STREAM);

    let mut symbols = vec![0usize; n_back + n_fwd];
    let mut omega0 = None;
    match driving {
        DrivingSystem::Bernoulli { p } => {
            let cumulative: Vec<f64> = p
                .iter()
                .scan(0.0, |acc, &q| {
                    *acc += q;
                    Some(*acc)
                })
                .collect();
            for j in 0..n_fwd {
                symbols[n_back + j] = bernoulli_symbol(&cumulative, fwd.random::<f64>());
            }
            for j in 1..=n_back {
                symbols[n_back - j] = bernoulli_symbol(&cumulative, back.random::<f64>());
            }
        }
        DrivingSystem::Rotation { alpha, thresholds } => {
            let w0: f64 = fwd.random();
            omega0 = Some(w0);
            for (i, s) in symbols.iter_mut().enumerate() {
                let j = i as f64 - n_back as f64;
                let omega = (w0 + j * alpha).rem_euclid(1.0);
                *s = DrivingSystem::rotation_symbol(thresholds, omega);
            }
        }
    }
    let effective = table.maps().iter().map(|t| t.rotated(theta)).collect();
    Ok(CocyclePath { driving: driving.clone(), table: table.clone(), seed, n_back, theta, symbols, effective, omega0 })
}

impl CocyclePath {
    pub fn driving(&self) -> &DrivingSystem {
        &self.driving
    }

    pub fn table(&self) -> &MapTable {
        &self.table
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn theta(&self) -> UnitComplex {
        self.theta
    }

    pub fn n_back(&self) -> usize {
        self.n_back
    }

    pub fn n_fwd(&self) -> usize {
        self.symbols.len() - self.n_back
    }

    /// Base point `ω₀` for rotation drivings.
    pub fn omega0(&self) -> Option<f64> {
        self.omega0
    }

    /// The same symbols under a different rotation parameter.
    pub fn with_theta(&self, theta: UnitComplex) -> CocyclePath {
        CocyclePath { theta, effective: self.table.maps().iter().map(|t| t.rotated(theta)).collect(), ..self.clone() }
    }

    fn slot(&self, j: i64) -> Result<usize> {
        let lo = -(self.n_back as i64);
        let hi = self.n_fwd() as i64;
        if j < lo || j >= hi {
            return Err(Error::OutOfWindow { index: j, lo, hi });
        }
        Ok((j - lo) as usize)
    }

    pub fn symbol(&self, j: i64) -> Result<usize> {
        Ok(self.symbols[self.slot(j)?])
    }

    /// The effective map `θ·T_{s_j}`.
    pub fn map_at(&self, j: i64) -> Result<&BlaschkeProduct> {
        Ok(&self.effective[self.symbol(j)?])
    }

    /// Symbols `s_j` for `j` in `[lo, hi)`.
    pub fn symbols(&self, lo: i64, hi: i64) -> Result<&[usize]> {
        if hi <= lo {
            return Ok(&[]);
        }
        let a = self.slot(lo)?;
        let b = self.slot(hi - 1)?;
        Ok(&self.symbols[a..=b])
    }

    /// `θ·T` for table entry `symbol`.
    pub fn effective_map(&self, symbol: usize) -> &BlaschkeProduct {
        &self.effective[symbol]
    }

    /// Applies `θT_{s_j}`, then `θT_{s_{j+1}}`, …, `n` maps in total.
    pub fn forward_compose(&self, j: i64, n: usize, z: Complex64) -> Result<Complex64> {
        let mut w = z;
        for &s in self.symbols(j, j + n as i64)? {
            w = self.effective[s].eval(w)?;
        }
        Ok(w)
    }

    /// `T_{s_{k−1}} ∘ … ∘ T_{s_{k−n}}(z)` for `z` in the closed disc.
    pub fn backward_compose(&self, k: i64, n: usize, z: Complex64) -> Result<Complex64> {
        let mut w = z;
        for &s in self.symbols(k - n as i64, k)? {
            w = self.effective[s].apply(w);
        }
        Ok(w)
    }

    /// `T_{s_{−1}} ∘ … ∘ T_{s_{−n}}(0)`.
    pub fn backward_compose_at_zero(&self, n: usize) -> Result<Complex64> {
        self.backward_compose(0, n, Complex64::new(0.0, 0.0))
    }

    /// `true` when every effective map fixes `z`.
    pub fn all_maps_fix(&self, z: Complex64) -> bool {
        self.effective.iter().all(|t| t.fixes(z))
    }
}

/// One map entry of the JSON configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapSpec {
    /// Prefactor `θ₀ = e^{2πi·rotation_angle}`, in turns.
    #[serde(default)]
    pub rotation_angle: f64,
    pub zeros: Vec<[f64; 2]>,
}

impl MapSpec {
    pub fn build(&self) -> Result<BlaschkeProduct> {
        let zeros: Vec<Complex64> = self.zeros.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
        BlaschkeProduct::from_parts(self.rotation_angle, &zeros)
    }

    pub fn from_map(t: &BlaschkeProduct) -> Self {
        MapSpec {
            rotation_angle: t.rotation().turns(),
            zeros: t.zeros().iter().map(|a| [a.value().re, a.value().im]).collect(),
        }
    }
}

/// JSON cocycle configuration:
/// `{ "maps": [...], "driving": {...}, "theta_turns": t, "seed": s }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CocycleConfig {
    pub maps: Vec<MapSpec>,
    pub driving: DrivingSystem,
    #[serde(default)]
    pub theta_turns: f64,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl CocycleConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let mut cfg: CocycleConfig =
            serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("config: {e}")))?;
        cfg.driving = cfg.driving.normalized();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.driving.validate()?;
        let table = self.table()?;
        if table.len() != self.driving.alphabet_size() {
            return Err(Error::InvalidInput(format!(
                "driving has {} symbols but {} maps are given",
                self.driving.alphabet_size(),
                table.len()
            )));
        }
        if !self.theta_turns.is_finite() {
            return Err(Error::InvalidInput("theta_turns must be finite".into()));
        }
        Ok(())
    }

    pub fn table(&self) -> Result<MapTable> {
        MapTable::new(self.maps.iter().map(MapSpec::build).collect::<Result<Vec<_>>>()?)
    }

    pub fn theta(&self) -> UnitComplex {
        UnitComplex::from_turns(self.theta_turns)
    }

    /// `[z², −((z − 0.4)/(1 − 0.4z))²]` chosen with probabilities `(p, 1 − p)`
    /// by a Bernoulli shift.
    pub fn mixed_bernoulli(p: f64) -> Result<Self> {
        Ok(CocycleConfig {
            maps: presets::mixed_table().iter().map(MapSpec::from_map).collect(),
            driving: DrivingSystem::bernoulli(vec![p, 1.0 - p])?,
            theta_turns: 0.0,
            seed: Some(1),
        })
    }

    /// The same two maps driven by `ω ↦ ω + 1/π` with threshold `p`.
    pub fn mixed_rotation(p: f64) -> Result<Self> {
        Ok(CocycleConfig {
            maps: presets::mixed_table().iter().map(MapSpec::from_map).collect(),
            driving: DrivingSystem::rotation(std::f64::consts::FRAC_1_PI, vec![p])?,
            theta_turns: 0.0,
            seed: Some(1),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mixed_path(seed: u64, n_back: usize, n_fwd: usize) -> CocyclePath {
        let cfg = CocycleConfig::mixed_bernoulli(0.2).unwrap();
        sample_path(&cfg.driving, &cfg.table().unwrap(), seed, n_back, n_fwd, UnitComplex::ONE).unwrap()
    }

    #[test]
    fn single_symbol_bernoulli() {
        let d = DrivingSystem::bernoulli(vec![1.0]).unwrap();
        let t = MapTable::new(vec![presets::squaring()]).unwrap();
        let p = sample_path(&d, &t, 9, 5, 5, UnitComplex::ONE).unwrap();
        assert!(p.symbols(-5, 5).unwrap().iter().all(|&s| s == 0));
    }

    #[test]
    fn bernoulli_frequency_within_binomial_bounds() {
        let p = mixed_path(42, 0, 1_000_000);
        let zeros = p.symbols(0, 1_000_000).unwrap().iter().filter(|&&s| s == 0).count() as f64;
        let n = 1e6;
        let sigma = (n * 0.2 * 0.8_f64).sqrt();
        assert!((zeros - 0.2 * n).abs() < 3.0 * sigma, "{zeros}");
    }

    #[test]
    fn rotation_equidistributes() {
        let cfg = CocycleConfig::mixed_rotation(0.2).unwrap();
        let p = sample_path(&cfg.driving, &cfg.table().unwrap(), 3, 0, 1_000_000, UnitComplex::ONE).unwrap();
        let frac = p.symbols(0, 1_000_000).unwrap().iter().filter(|&&s| s == 0).count() as f64 / 1e6;
        assert!((frac - 0.2).abs() < 1e-3, "{frac}");
    }

    #[test]
    fn paths_are_reproducible_and_sides_independent() {
        let a = mixed_path(7, 100, 100);
        let b = mixed_path(7, 100, 100);
        assert_eq!(a, b);
        let c = mixed_path(7, 300, 100);
        assert_eq!(a.symbols(0, 100).unwrap(), c.symbols(0, 100).unwrap());
        assert_eq!(a.symbols(-100, 0).unwrap(), c.symbols(-100, 0).unwrap());
        assert_ne!(mixed_path(8, 100, 100).symbols(-100, 100).unwrap(), a.symbols(-100, 100).unwrap());
    }

    #[test]
    fn forward_composition() {
        let d = DrivingSystem::bernoulli(vec![1.0]).unwrap();
        let t = MapTable::new(vec![presets::squaring()]).unwrap();
        let p = sample_path(&d, &t, 0, 0, 10, UnitComplex::ONE).unwrap();
        let z = UnitComplex::from_turns(0.1).value();
        assert_eq!(p.forward_compose(0, 0, z).unwrap(), z);
        let w = p.forward_compose(0, 3, z).unwrap();
        assert!((w - UnitComplex::from_turns(0.8).value()).norm() < 1e-14);
    }

    #[test]
    fn forward_composition_matches_nested_evaluation() {
        let p = mixed_path(11, 0, 50);
        let table = presets::mixed_table();
        for case in 0..5 {
            let z = UnitComplex::from_turns(0.137 * case as f64 + 0.01).value();
            let j = 3 * case as i64;
            let mut w = z;
            for k in 0..5 {
                w = table[p.symbol(j + k).unwrap()].eval(w).unwrap();
            }
            assert_eq!(w, p.forward_compose(j, 5, z).unwrap());
        }
    }

    #[test]
    fn shift_consistency_is_exact() {
        let p = mixed_path(5, 0, 40);
        let z = Complex64::new(0.3, -0.2);
        let whole = p.forward_compose(2, 17, z).unwrap();
        let split = p.forward_compose(9, 10, p.forward_compose(2, 7, z).unwrap()).unwrap();
        assert_eq!(whole, split);
    }

    #[test]
    fn zero_theta_matches_identity_rotation() {
        let p = mixed_path(5, 20, 20);
        let q = p.with_theta(UnitComplex::from_turns(0.0));
        let z = Complex64::new(0.1, 0.2);
        assert_eq!(p.forward_compose(0, 20, z).unwrap(), q.forward_compose(0, 20, z).unwrap());
        assert_eq!(p.backward_compose_at_zero(20).unwrap(), q.backward_compose_at_zero(20).unwrap());
    }

    #[test]
    fn backward_composition_of_origin_fixing_maps() {
        let d = DrivingSystem::bernoulli(vec![1.0]).unwrap();
        let t = MapTable::new(vec![presets::squaring()]).unwrap();
        let p = sample_path(&d, &t, 0, 30, 0, UnitComplex::ONE).unwrap();
        for n in 0..30 {
            assert_eq!(p.backward_compose_at_zero(n).unwrap(), Complex64::new(0.0, 0.0));
        }
        assert!(p.backward_compose_at_zero(31).is_err());
    }

    #[test]
    fn backward_iterates_of_boundary_attractor_approach_circle() {
        let d = DrivingSystem::bernoulli(vec![1.0]).unwrap();
        let t = MapTable::new(vec![presets::boundary_attractor()]).unwrap();
        let p = sample_path(&d, &t, 0, 400, 0, UnitComplex::ONE).unwrap();
        let r: Vec<f64> = [10, 50, 200, 400].iter().map(|&n| p.backward_compose_at_zero(n).unwrap().norm()).collect();
        assert!(r.windows(2).all(|w| w[1] > w[0]));
        assert!(1.0 - r[3] < 1e-6);
    }

    #[test]
    fn contraction_radius_examples() {
        let g = CircleGrid::new(1024).unwrap();
        let sq = MapTable::new(vec![presets::squaring()]).unwrap();
        assert!((sq.uniform_contraction_radius(0.5, &g).unwrap() - 0.25).abs() < 1e-15);
        let rot = MapTable::new(vec![BlaschkeProduct::rotation_map(0.3)]).unwrap();
        assert!((rot.uniform_contraction_radius(0.7, &g).unwrap() - 0.7).abs() < 1e-15);
        let mixed = MapTable::new(presets::mixed_table()).unwrap();
        assert!(mixed.uniform_contraction_radius(0.5, &g).unwrap() > 0.5);
    }

    #[test]
    fn config_round_trip_and_validation() {
        let text = r#"{"maps":[{"rotation_angle":0,"zeros":[[0,0],[0,0]]},
            {"rotation_angle":0.5,"zeros":[[0.4,0],[0.4,0]]}],
            "driving":{"kind":"rotation","alpha":0.3183098861837907,"thresholds":[0,0.2,1]},
            "theta_turns":0.25,"seed":3}"#;
        let cfg = CocycleConfig::from_json(text).unwrap();
        assert_eq!(cfg.driving, DrivingSystem::Rotation { alpha: std::f64::consts::FRAC_1_PI, thresholds: vec![0.2] });
        assert_eq!(CocycleConfig::from_json(&cfg.to_json()).unwrap(), cfg);
        let bad = text.replace("[0,0.2,1]", "[0.5,0.2]");
        assert!(CocycleConfig::from_json(&bad).is_err());
        let bad = r#"{"maps":[{"zeros":[[0,0]]}],"driving":{"kind":"bernoulli","p":[0.5,0.5]}}"#;
        assert!(CocycleConfig::from_json(bad).is_err());
        assert!(DrivingSystem::bernoulli(vec![0.3, 0.6]).is_err());
    }

    #[test]
    fn symbol_probabilities_of_rotation() {
        let d = DrivingSystem::rotation(0.1, vec![0.2, 0.7]).unwrap();
        let p = d.symbol_probabilities();
        assert!((p[0] - 0.2).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15 && (p[2] - 0.3).abs() < 1e-15);
    }
}
