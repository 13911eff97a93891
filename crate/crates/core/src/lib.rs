//! Random invariant densities and fibre entropy for cocycles of finite
//! Blaschke products on the unit circle.
//!
//! The random fixed point `x_ω` of backward compositions determines the
//! random absolutely continuous invariant measure `dμ_ω = P_{x_ω} dm`, and the
//! fibre entropy is the Lyapunov exponent `∫∫ log|T'_ω| dμ_ω dℙ`. Averaged
//! over rotations `θ`, it reduces to `∫∫ log|T'_ω| dm dℙ`.

pub mod acim;
pub mod admissibility;
pub mod blaschke;
pub mod circle;
pub mod cocycle;
pub mod entropy;
pub mod error;

pub use blaschke::{BlaschkeProduct, DiscPoint, PoissonKernel, UnitComplex};
pub use circle::{CircleGrid, CircleLift, GridFunction};
pub use cocycle::{CocycleConfig, CocyclePath, DrivingSystem, MapTable};
pub use error::{Error, Result};

pub use num_complex::Complex64;
