//! Classification of the fixed points of a finite Blaschke product.
//!
//! For degree n ≥ 2 exactly one of three cases holds: n + 1 circle fixed
//! points with one attracting; n − 1 expanding circle fixed points plus an
//! attracting fixed point in the disc; or n + 1 circle fixed points with one
//! indifferent. Degree 1 is classified by the same buckets as a diagnostic.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::poly::Poly;
use super::{BlaschkeProduct, DiscPoint, UnitComplex, TOL_ROOT};
use crate::error::{Error, Result};

/// How far `|z|` may sit from 1 and still count as a circle fixed point.
const CIRCLE_BAND: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FixedPointCase {
    AllOnCircle,
    AttractorInDisc,
    IndifferentOnCircle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleFixedPoint {
    pub point: UnitComplex,
    pub multiplier: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPointClassification {
    pub case: FixedPointCase,
    pub circle_fixed_points: Vec<CircleFixedPoint>,
    pub disc_fixed_point: Option<DiscPoint>,
}

/// Polynomial whose roots are the fixed points of `T` in ℂ:
/// `θ₀ ∏(z − aᵢ) − z ∏(1 − āᵢ z)`.
fn fixed_point_polynomial(t: &BlaschkeProduct) -> Poly {
    let one = Complex64::new(1.0, 0.0);
    let mut num = Poly::constant(t.rotation().value());
    let mut den = Poly(vec![Complex64::new(0.0, 0.0), one]);
    for a in t.zeros() {
        let a = a.value();
        num = num.mul(&Poly(vec![-a, one]));
        den = den.mul(&Poly(vec![one, -a.conj()]));
    }
    num.sub(&den).trimmed(1e-14)
}

pub fn classify_fixed_points(t: &BlaschkeProduct, tol_indiff: f64) -> Result<FixedPointClassification> {
    let n = t.degree();
    let poly = fixed_point_polynomial(t);
    if poly.0.iter().all(|c| c.norm() < 1e-14) {
        return Err(Error::Degenerate("T is the identity".into()));
    }
    let roots = poly.roots();

    let mut circle = Vec::new();
    let mut disc = Vec::new();
    for z in roots {
        let r = z.norm();
        if r > 1.0 + CIRCLE_BAND {
            // reflection 1/x̄ of a disc fixed point
            continue;
        }
        let residual = match t.eval(z) {
            Ok(w) => (w - z).norm(),
            Err(_) => f64::INFINITY,
        };
        if residual > TOL_ROOT {
            return Err(Error::RootSolveFailure { residual });
        }
        if r >= 1.0 - CIRCLE_BAND {
            let p = UnitComplex::new(z)?;
            circle.push(CircleFixedPoint { point: p, multiplier: t.deriv_modulus_on_circle(p) });
        } else {
            disc.push(z);
        }
    }
    circle.sort_by(|a, b| a.point.turns().total_cmp(&b.point.turns()));

    if disc.len() == 1 && circle.len() + 1 == n {
        let x = disc[0];
        let mult = t.derivative(x)?.norm();
        if mult >= 1.0 {
            return Err(Error::Degenerate(format!("disc fixed point with |T'(x)| = {mult}")));
        }
        if circle.iter().any(|c| c.multiplier <= 1.0) {
            return Err(Error::Degenerate("non-expanding circle fixed point alongside a disc attractor".into()));
        }
        return Ok(FixedPointClassification {
            case: FixedPointCase::AttractorInDisc,
            circle_fixed_points: circle,
            disc_fixed_point: Some(DiscPoint::new(x)?),
        });
    }
    if disc.is_empty() && circle.len() == n + 1 {
        let indifferent = circle.iter().any(|c| (c.multiplier - 1.0).abs() < tol_indiff);
        let attracting = circle.iter().filter(|c| c.multiplier < 1.0).count();
        let case = if indifferent {
            FixedPointCase::IndifferentOnCircle
        } else if attracting == 1 {
            FixedPointCase::AllOnCircle
        } else {
            return Err(Error::Degenerate(format!("{attracting} attracting circle fixed points")));
        };
        return Ok(FixedPointClassification { case, circle_fixed_points: circle, disc_fixed_point: None });
    }
    Err(Error::Degenerate(format!("{} circle and {} disc fixed points for degree {n}", circle.len(), disc.len())))
}
