use super::grid::RadialGrid;
use super::quadrature::{cumulative_integral, gauss_rule, lagrange, local_window};
use crate::error::{domain, Result};

/// Signed work `∫_{r_ref}^{r} F(r') dr'` of a radial field `F(r) r̂` sampled on
/// `grid`, integrated along the radius.
///
/// The caller applies whatever sign convention it needs; the result is the
/// plain oriented integral (negative when `r < r_ref` and `F > 0`).
pub fn line_integral_radial(field: &[f64], grid: &RadialGrid, r_ref: f64, r: f64) -> Result<f64> {
    let cum = Antiderivative::new(field, grid)?;
    Ok(cum.at(r)? - cum.at(r_ref)?)
}

/// Piecewise-quintic antiderivative of sampled data, evaluable between samples.
#[derive(Debug, Clone)]
pub struct Antiderivative<'a> {
    x: &'a [f64],
    y: &'a [f64],
    cum: Vec<f64>,
}

impl<'a> Antiderivative<'a> {
    pub fn new(field: &'a [f64], grid: &'a RadialGrid) -> Result<Self> {
        let x = grid.values();
        if field.len() != x.len() {
            return domain("field length does not match grid");
        }
        let cum = cumulative_integral(x, field)?;
        Ok(Self { x, y: field, cum })
    }

    /// Values at the grid points, offset so that the value at index 0 is zero.
    pub fn at_nodes(&self) -> &[f64] {
        &self.cum
    }

    pub fn at(&self, t: f64) -> Result<f64> {
        let x = self.x;
        let n = x.len();
        if !(t >= x[0] && t <= x[n - 1]) {
            return domain(format!(
                "radius {t} outside sampled range [{}, {}]",
                x[0],
                x[n - 1]
            ));
        }
        let i = match x.binary_search_by(|v| v.partial_cmp(&t).unwrap()) {
            Ok(i) => return Ok(self.cum[i]),
            Err(i) => i - 1,
        };
        let (xs, ys) = local_window(x, self.y, i);
        let partial = gauss_rule(3).integrate(x[i], t, |s| lagrange(xs, ys, s));
        Ok(self.cum[i] + partial)
    }
}
