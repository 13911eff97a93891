//! Numerics on the circle: trapezoid quadrature on uniform grids, the
//! monotone lift of a Blaschke product in turn coordinates, preimages, and
//! images of arcs.

mod grid;
mod lift;

pub use grid::{quadrature, quadrature_complex, CircleGrid, GridFunction, TrigInterpolant};
pub use lift::{arc_image_measure, build_lift, preimages, CircleLift};
