//! Dense complex polynomials and simultaneous root extraction.

use num_complex::Complex64;

/// Coefficients in ascending order: `c[0] + c[1] z + …`.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly(pub Vec<Complex64>);

impl Poly {
    pub fn constant(c: Complex64) -> Self {
        Poly(vec![c])
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = vec![Complex64::new(0.0, 0.0); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        let zero = Complex64::new(0.0, 0.0);
        Poly((0..n).map(|i| *self.0.get(i).unwrap_or(&zero) - *other.0.get(i).unwrap_or(&zero)).collect())
    }

    /// Drops leading coefficients that are negligible relative to the largest one.
    pub fn trimmed(mut self, rel_tol: f64) -> Poly {
        let scale = self.0.iter().map(|c| c.norm()).fold(0.0, f64::max);
        while self.0.len() > 1 && self.0.last().unwrap().norm() <= rel_tol * scale {
            self.0.pop();
        }
        self
    }

    pub fn degree(&self) -> usize {
        self.0.len() - 1
    }

    /// `(p(z), p'(z))` by Horner.
    pub fn eval_with_deriv(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for c in self.0.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// `|p(z)| / Σ |cₖ||z|ᵏ`, the backward-error style residual.
    pub fn relative_residual(&self, z: Complex64) -> f64 {
        let r = z.norm();
        let mut scale = 0.0;
        for c in self.0.iter().rev() {
            scale = scale * r + c.norm();
        }
        let (p, _) = self.eval_with_deriv(z);
        if scale == 0.0 {
            0.0
        } else {
            p.norm() / scale
        }
    }

    /// All roots by Aberth–Ehrlich iteration, each polished with Newton steps.
    pub fn roots(&self) -> Vec<Complex64> {
        let n = self.degree();
        if n == 0 {
            return Vec::new();
        }
        let lead = self.0[n];
        // Cauchy-style radius for the initial circle of guesses
        let radius = 1.0 + self.0[..n].iter().map(|c| (c / lead).norm()).fold(0.0, f64::max).min(1e6);
        let mut z: Vec<Complex64> = (0..n)
            .map(|k| {
                let ang = std::f64::consts::TAU * (k as f64 + 0.25) / n as f64 + 0.4;
                Complex64::from_polar(0.5 * radius, ang)
            })
            .collect();
        for _ in 0..500 {
            let mut max_step: f64 = 0.0;
            for i in 0..n {
                let (p, dp) = self.eval_with_deriv(z[i]);
                if p.norm() == 0.0 {
                    continue;
                }
                let ratio = p / dp;
                let mut s = Complex64::new(0.0, 0.0);
                for (j, zj) in z.iter().enumerate() {
                    if j != i {
                        s += 1.0 / (z[i] - zj);
                    }
                }
                let step = ratio / (1.0 - ratio * s);
                if step.is_finite() {
                    z[i] -= step;
                    max_step = max_step.max(step.norm() / (1.0 + z[i].norm()));
                }
            }
            if max_step < 1e-16 {
                break;
            }
        }
        for zi in z.iter_mut() {
            for _ in 0..3 {
                let (p, dp) = self.eval_with_deriv(*zi);
                if dp.norm() == 0.0 {
                    break;
                }
                let next = *zi - p / dp;
                if !next.is_finite() || self.relative_residual(next) > self.relative_residual(*zi) {
                    break;
                }
                *zi = next;
            }
        }
        z
    }
}
