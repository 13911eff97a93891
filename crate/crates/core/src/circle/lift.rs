use num_complex::Complex64;
use std::f64::consts::{PI, TAU};

use crate::blaschke::{BlaschkeProduct, UnitComplex, TOL_ROOT};
use crate::error::{Error, Result};

const BISECTION_STEPS: usize = 60;

/// Continuous lift `S̃ : ℝ → ℝ` of a Blaschke product in turn coordinates,
/// `T(e^{2πit}) = e^{2πi S̃(t)}`, normalized so `S̃(0) ∈ [0, 1)`.
///
/// Each factor contributes `t + arg(1 − a e^{−2πit})/π`. The argument stays
/// in `(−π/2, π/2)` because `|a| < 1`, so the closed form is continuous
/// without any phase tracking, and `S̃(t + 1) = S̃(t) + n` holds exactly.
#[derive(Debug, Clone)]
pub struct CircleLift {
    map: BlaschkeProduct,
    offset: f64,
}

impl CircleLift {
    pub fn new(map: &BlaschkeProduct) -> Self {
        let mut lift = CircleLift { map: map.clone(), offset: map.rotation().turns() };
        let s0 = lift.value(0.0);
        lift.offset -= s0.floor();
        lift
    }

    pub fn map(&self) -> &BlaschkeProduct {
        &self.map
    }

    pub fn degree(&self) -> usize {
        self.map.degree()
    }

    /// `S̃(t)` for any real `t`.
    pub fn value(&self, t: f64) -> f64 {
        let w = UnitComplex::from_turns(-t).value();
        let phase: f64 = self
            .map
            .zeros()
            .iter()
            .map(|a| {
                let v = Complex64::new(1.0, 0.0) - a.value() * w;
                v.im.atan2(v.re)
            })
            .sum();
        self.offset + self.degree() as f64 * t + phase / PI
    }

    /// `S̃'(t) = |T'(e^{2πit})|`.
    pub fn slope(&self, t: f64) -> f64 {
        self.map.deriv_modulus_on_circle(UnitComplex::from_turns(t))
    }

    /// `S̃''(t) = −4π Σ (1 − |a|²) Im(ā z)/|z − a|⁴`.
    pub fn curvature(&self, t: f64) -> f64 {
        let z = UnitComplex::from_turns(t).value();
        -2.0 * TAU
            * self
                .map
                .zeros()
                .iter()
                .map(|a| {
                    let a = a.value();
                    let d = (z - a).norm_sqr();
                    (1.0 - a.norm_sqr()) * (a.conj() * z).im / (d * d)
                })
                .sum::<f64>()
    }

    /// Values of `S̃` at `t = j/N`, `j = 0..=N`.
    pub fn sample(&self, n: usize) -> Vec<f64> {
        (0..=n).map(|j| self.value(j as f64 / n as f64)).collect()
    }

    /// Solves `S̃(t) = target` for `t ∈ [0, 1]` by bisection plus one Newton step.
    fn invert_on_unit_interval(&self, target: f64) -> f64 {
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        for _ in 0..BISECTION_STEPS {
            let mid = 0.5 * (lo + hi);
            if self.value(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let t = 0.5 * (lo + hi);
        let polished = t - (self.value(t) - target) / self.slope(t);
        if polished.is_finite() && (polished - t).abs() <= hi - lo + 1e-15 {
            polished
        } else {
            t
        }
    }

    /// All `n` points `w` of the circle with `T(w) = z`, one per lift branch.
    pub fn preimages(&self, z: UnitComplex) -> Result<Vec<UnitComplex>> {
        let n = self.degree();
        let s0 = self.value(0.0);
        let s = z.turns();
        let first = s + (s0 - s).ceil();
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let t = self.invert_on_unit_interval(first + k as f64);
            let w = UnitComplex::from_turns(t);
            if (self.map.apply(w.value()) - z.value()).norm() < TOL_ROOT {
                out.push(w);
            }
        }
        if out.len() != n {
            return Err(Error::BranchMiss { found: out.len(), expected: n });
        }
        Ok(out)
    }

    /// Image of the lifted arc `[a, b]`, shifted by an integer so the left
    /// end lies in `[0, 1)`.
    pub fn image_arc(&self, (a, b): (f64, f64)) -> (f64, f64) {
        let (sa, sb) = (self.value(a), self.value(b));
        let shift = sa.floor();
        (sa - shift, sb - shift)
    }
}

/// Builds the lift and checks it against `T` on `N` samples: strictly
/// increasing, total increase equal to the degree, and `e^{2πiS̃} = T`.
pub fn build_lift(t: &BlaschkeProduct, n: usize) -> Result<CircleLift> {
    let lift = CircleLift::new(t);
    let samples = lift.sample(n.max(8));
    let total = samples[samples.len() - 1] - samples[0];
    let monotone = samples.windows(2).all(|w| w[1] > w[0]);
    let consistent = samples.iter().enumerate().all(|(j, &s)| {
        let z = UnitComplex::from_turns(j as f64 / (samples.len() - 1) as f64);
        (t.apply(z.value()) - UnitComplex::from_turns(s).value()).norm() < 1e-9
    });
    if !monotone || !consistent || (total - t.degree() as f64).abs() > 1e-9 {
        return Err(Error::WindingMismatch { found: total, expected: t.degree() });
    }
    Ok(lift)
}

pub fn preimages(t: &BlaschkeProduct, z: UnitComplex) -> Result<Vec<UnitComplex>> {
    CircleLift::new(t).preimages(z)
}

/// Normalized Lebesgue measure of `T([t_a, t_b])`, saturating at 1.
pub fn arc_image_measure(t: &BlaschkeProduct, t_a: f64, t_b: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t_a) || !(0.0..=1.0).contains(&t_b) || t_a >= t_b {
        return Err(Error::InvalidInput(format!("arc [{t_a}, {t_b}] must satisfy 0 ≤ a < b ≤ 1")));
    }
    let (a, b) = CircleLift::new(t).image_arc((t_a, t_b));
    Ok((b - a).min(1.0))
}
