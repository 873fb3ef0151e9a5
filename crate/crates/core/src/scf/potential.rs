//! Scalar potential as the work done in the conservative field.

use serde::Serialize;

use crate::error::{domain, Result};
use crate::fields::{FieldProfiles, FIT_WINDOW};
use crate::numerics::{fit_through_origin_selected, Antiderivative, FitResult, RadialGrid};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PotentialProfile {
    pub r: Vec<f64>,
    /// `v(r) = ∫₀^r 𝓕(r′) dr′`, anchored at `v(0) = 0`.
    pub v: Vec<f64>,
    /// Fit of `v ≈ ½k r²`; `slope` is `k`.
    pub fit: FitResult,
}

impl PotentialProfile {
    pub fn keff(&self) -> f64 {
        self.fit.slope
    }
}

fn trusted_prefix(fp: &FieldProfiles) -> usize {
    fp.trusted
        .iter()
        .zip(&fp.f_cons)
        .position(|(t, f)| !*t || !f.is_finite())
        .unwrap_or(fp.r.len())
}

/// Integrates `𝓕 = 𝓕int − 𝓛` outward from the origin over the trusted
/// window and fits the harmonic form.
pub fn reconstruct_potential(fp: &FieldProfiles) -> Result<PotentialProfile> {
    reconstruct_potential_anchored(fp, 0.0)
}

/// As [`reconstruct_potential`] with `v(r_ref) = 0` instead; the result
/// differs by a constant only.
pub fn reconstruct_potential_anchored(fp: &FieldProfiles, r_ref: f64) -> Result<PotentialProfile> {
    let n = trusted_prefix(fp);
    if fp.r.first() != Some(&0.0) {
        return domain("potential reconstruction needs a grid starting at r = 0");
    }
    if n < 13 {
        return domain(format!("conservative field available on only {n} points"));
    }
    let grid = RadialGrid::from_values(fp.r[..n].to_vec())?;
    let field = &fp.f_cons[..n];
    let anti = Antiderivative::new(field, &grid)?;
    let offset = anti.at(r_ref)?;
    let from_origin = anti.at_nodes();
    let v: Vec<f64> = from_origin.iter().map(|a| a - offset).collect();
    let r = grid.values().to_vec();
    let half_r2: Vec<f64> = r.iter().map(|x| 0.5 * x * x).collect();
    let scale = fp.omega.sqrt();
    let window = (FIT_WINDOW.0 / scale, FIT_WINDOW.1 / scale);
    let fit = fit_through_origin_selected(&r, &half_r2, from_origin, window)?;
    Ok(PotentialProfile { r, v, fit })
}
