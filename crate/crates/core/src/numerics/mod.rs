//! Radial grids, quadrature, finite-difference stencils, line integrals and
//! linear fits.

pub mod bessel;
pub mod fit;
pub mod grid;
pub mod line;
pub mod quadrature;
pub mod stencil;

pub use fit::{fit_linear_through_origin, fit_through_origin_selected, FitResult};
pub use grid::{RadialGrid, Spacing};
pub use line::{line_integral_radial, Antiderivative};
pub use quadrature::{integrate_radial, integrate_sampled, GaussRule, Quadrature, Weight};
pub use stencil::differentiate;

/// Scientific notation with 9 significant digits; negative zero prints as zero.
pub fn format_sci(v: f64) -> String {
    format!("{:.8e}", v + 0.0)
}
