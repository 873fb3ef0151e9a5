use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Uniform,
    LogUniform,
}

/// Strictly increasing set of radii (bohr) on which radial profiles are sampled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    r: Vec<f64>,
    spacing: Spacing,
}

impl RadialGrid {
    /// `n` equally spaced radii on `[r_min, r_max]`.
    pub fn uniform(r_min: f64, r_max: f64, n: usize) -> Result<Self> {
        check_bounds(r_min, r_max, n)?;
        let h = (r_max - r_min) / (n - 1) as f64;
        let r = (0..n).map(|i| r_min + h * i as f64).collect();
        Ok(Self {
            r,
            spacing: Spacing::Uniform,
        })
    }

    /// `n` geometrically spaced radii; requires `r_min > 0`.
    pub fn log_uniform(r_min: f64, r_max: f64, n: usize) -> Result<Self> {
        check_bounds(r_min, r_max, n)?;
        if r_min <= 0.0 {
            return domain("log-uniform grid needs r_min > 0");
        }
        let ratio = (r_max / r_min).ln() / (n - 1) as f64;
        let mut r: Vec<f64> = (0..n).map(|i| r_min * (ratio * i as f64).exp()).collect();
        r[n - 1] = r_max;
        Ok(Self {
            r,
            spacing: Spacing::LogUniform,
        })
    }

    /// Arbitrary strictly increasing radii.
    pub fn from_values(r: Vec<f64>) -> Result<Self> {
        if r.len() < 2 {
            return domain("grid needs at least two points");
        }
        if r[0] < 0.0 || !r.iter().all(|x| x.is_finite()) {
            return domain("grid radii must be finite and non-negative");
        }
        if r.windows(2).any(|w| w[1] <= w[0]) {
            return domain("grid radii must be strictly increasing");
        }
        let h0 = r[1] - r[0];
        let uniform = r
            .windows(2)
            .all(|w| ((w[1] - w[0]) - h0).abs() <= 1e-12 * r[r.len() - 1]);
        Ok(Self {
            r,
            spacing: if uniform {
                Spacing::Uniform
            } else {
                Spacing::LogUniform
            },
        })
    }

    /// Default grid for a state with Gaussian exponent `omega`:
    /// uniform on `[0, 8/sqrt(omega)]` with 2001 points.
    pub fn for_exponent(omega: f64) -> Result<Self> {
        if !(omega > 0.0) {
            return domain(format!("Gaussian exponent must be positive, got {omega}"));
        }
        Self::uniform(0.0, 8.0 / omega.sqrt(), 2001)
    }

    /// Fails if `density(r_max)` is not below `1e-12`.
    pub fn check_decay(&self, density: impl Fn(f64) -> f64) -> Result<()> {
        let tail = density(self.r_max());
        if tail.abs() >= 1e-12 {
            return domain(format!(
                "grid too short: density {tail:e} at r_max = {}",
                self.r_max()
            ));
        }
        Ok(())
    }

    pub fn values(&self) -> &[f64] {
        &self.r
    }

    pub fn spacing(&self) -> Spacing {
        self.spacing
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn r_min(&self) -> f64 {
        self.r[0]
    }

    pub fn r_max(&self) -> f64 {
        self.r[self.r.len() - 1]
    }

    /// Uniform step, if the grid is uniform.
    pub fn step(&self) -> Option<f64> {
        match self.spacing {
            Spacing::Uniform => Some(self.r[1] - self.r[0]),
            Spacing::LogUniform => None,
        }
    }
}

fn check_bounds(r_min: f64, r_max: f64, n: usize) -> Result<()> {
    if n < 2 {
        return domain("grid needs at least two points");
    }
    if !(r_min >= 0.0 && r_max > r_min && r_max.is_finite()) {
        return domain(format!("invalid grid bounds [{r_min}, {r_max}]"));
    }
    Ok(())
}
