use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::blaschke::UnitComplex;
use crate::error::{Error, Result};

/// Uniform grid `t_j = j/N` on the circle, each node carrying weight `1/N`
/// of normalized Lebesgue measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircleGrid {
    size: usize,
}

impl CircleGrid {
    pub const DEFAULT_SIZE: usize = 4096;

    pub fn new(size: usize) -> Result<Self> {
        if size < 8 {
            return Err(Error::GridTooCoarse(size));
        }
        Ok(CircleGrid { size })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn turns(&self, j: usize) -> f64 {
        j as f64 / self.size as f64
    }

    pub fn node(&self, j: usize) -> UnitComplex {
        UnitComplex::from_turns(self.turns(j))
    }

    pub fn nodes(&self) -> impl Iterator<Item = UnitComplex> + '_ {
        (0..self.size).map(move |j| self.node(j))
    }

    pub fn sample(&self, f: impl Fn(UnitComplex) -> f64) -> GridFunction {
        GridFunction { values: self.nodes().map(f).collect() }
    }

    pub fn sample_complex(&self, f: impl Fn(UnitComplex) -> Complex64) -> Vec<Complex64> {
        self.nodes().map(f).collect()
    }

    pub fn integrate(&self, f: impl Fn(UnitComplex) -> f64) -> f64 {
        self.nodes().map(f).sum::<f64>() / self.size as f64
    }

    pub fn integrate_complex(&self, f: impl Fn(UnitComplex) -> Complex64) -> Complex64 {
        self.nodes().map(f).sum::<Complex64>() / self.size as f64
    }

    /// Largest value of `|f − g|` over the nodes.
    pub fn sup_diff(&self, f: impl Fn(UnitComplex) -> f64, g: impl Fn(UnitComplex) -> f64) -> f64 {
        self.nodes().map(|z| (f(z) - g(z)).abs()).fold(0.0, f64::max)
    }
}

impl Default for CircleGrid {
    fn default() -> Self {
        CircleGrid { size: Self::DEFAULT_SIZE }
    }
}

/// Trapezoid rule: the mean of the samples.
pub fn quadrature(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn quadrature_complex(values: &[Complex64]) -> Complex64 {
    values.iter().sum::<Complex64>() / values.len() as f64
}

/// A real function sampled on a [`CircleGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    values: Vec<f64>,
}

impl GridFunction {
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        CircleGrid::new(values.len())?;
        Ok(GridFunction { values })
    }

    pub fn constant(grid: CircleGrid, c: f64) -> Self {
        GridFunction { values: vec![c; grid.size()] }
    }

    pub fn grid(&self) -> CircleGrid {
        CircleGrid { size: self.values.len() }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn integral(&self) -> f64 {
        quadrature(&self.values)
    }

    pub fn sup_diff(&self, other: &GridFunction) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// Trigonometric interpolant through the samples, for evaluation off the grid.
    pub fn interpolant(&self) -> TrigInterpolant {
        TrigInterpolant::new(&self.values)
    }
}

/// The band-limited trigonometric polynomial through equispaced real samples.
#[derive(Debug, Clone)]
pub struct TrigInterpolant {
    /// `c_0 … c_{N/2}`; negative frequencies are the conjugates.
    coeffs: Vec<Complex64>,
    size: usize,
}

impl TrigInterpolant {
    pub fn new(values: &[f64]) -> Self {
        let n = values.len();
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        let coeffs = buf[..=n / 2].iter().map(|c| c / n as f64).collect();
        TrigInterpolant { coeffs, size: n }
    }

    pub fn eval_turns(&self, t: f64) -> f64 {
        let n = self.size;
        let half = n / 2;
        let step = UnitComplex::from_turns(t).value();
        let mut w = Complex64::new(1.0, 0.0);
        let mut acc = 0.0;
        for k in 1..half.max(1) {
            if k % 64 == 0 {
                w = UnitComplex::from_turns(t * k as f64).value();
            } else {
                w *= step;
            }
            acc += (self.coeffs[k] * w).re;
        }
        let mut out = self.coeffs[0].re + 2.0 * acc;
        if n.is_multiple_of(2) {
            out += self.coeffs[half].re * (PI * n as f64 * t).cos();
        } else if half >= 1 {
            out += 2.0 * (self.coeffs[half] * UnitComplex::from_turns(t * half as f64).value()).re;
        }
        out
    }

    pub fn eval(&self, z: UnitComplex) -> f64 {
        self.eval_turns(z.turns())
    }
}
