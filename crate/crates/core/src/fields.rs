//! Fields of the stationary force-balance law.
//!
//! Each internal field is a 'force' divided by the density. The components
//! are stored with the signs of their defining symbols and combined as
//!
//! ```text
//! F_ext = E − L          F_int = Eee − Z − D − I          F_ext + F_int = 0
//! ```

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::model::DotParams;
use crate::numerics::{fit_through_origin_selected, format_sci, FitResult, RadialGrid};
use crate::sources::{PointSources, SourceSet};

/// Fields are masked where `ρ(r) ≤ MASK_FLOOR·ρ(r_min)`.
pub const MASK_FLOOR: f64 = 1e-10;

/// Fit window for `S(r) = −k·r`, in units of `1/√Ω`.
pub const FIT_WINDOW: (f64, f64) = (0.1, 3.0);

/// Radial 'forces' (field times density) at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointForces {
    pub e_ee: f64,
    pub z: f64,
    pub d: f64,
    pub i: f64,
    pub l: f64,
}

/// `z_r = 2[∂_r t_rr + (t_rr − t_φφ)/r]`.
pub fn kinetic_force(p: &PointSources) -> f64 {
    if p.r == 0.0 {
        return 0.0;
    }
    2.0 * (p.dt_rr + (p.t_rr - p.t_pp) / p.r)
}

/// `d_r = −¼ ∂_r ∇²ρ = −¼[ρ‴ + ρ″/r − ρ′/r²]`.
pub fn differential_density_force(p: &PointSources) -> f64 {
    if p.r == 0.0 {
        return 0.0;
    }
    -0.25 * (p.d3rho + p.d2rho / p.r - p.drho / (p.r * p.r))
}

/// Divergence of `I_αβ = j_αA_β + j_βA_α − ρA_αA_β` for azimuthal `j` and
/// `A = (B/2)·r φ̂`. Only `I_φφ` survives, so `i_r = −I_φφ/r`.
pub fn internal_magnetic_force(rho: f64, j_phi: f64, r: f64, b: f64) -> f64 {
    let a_over_r = 0.5 * b;
    let a = a_over_r * r;
    -(2.0 * j_phi - rho * a) * a_over_r
}

/// `ℓ = j × B` for `j = j_φ φ̂`, `B = B ẑ`: radial component `B·j_φ`.
pub fn lorentz_force(j_phi: f64, b: f64) -> f64 {
    b * j_phi
}

pub fn point_forces(p: &PointSources, j_phi: f64, b: f64) -> PointForces {
    PointForces {
        e_ee: p.e_ee,
        z: kinetic_force(p),
        d: differential_density_force(p),
        i: internal_magnetic_force(p.rho, j_phi, p.r, b),
        l: lorentz_force(j_phi, b),
    }
}

fn trusted_mask(src: &SourceSet) -> Vec<bool> {
    let floor = MASK_FLOOR * src.points.first().map_or(0.0, |p| p.rho);
    src.points.iter().map(|p| p.rho > floor).collect()
}

fn per_density(src: &SourceSet, force: impl Fn(usize, &PointSources) -> f64 + Sync) -> Vec<f64> {
    let mask = trusted_mask(src);
    src.points
        .par_iter()
        .enumerate()
        .map(|(k, p)| if mask[k] { force(k, p) / p.rho } else { f64::NAN })
        .collect()
}

/// `𝓔ee = e_ee/ρ`.
pub fn electron_interaction_field(src: &SourceSet) -> Vec<f64> {
    per_density(src, |_, p| p.e_ee)
}

/// `𝓩 = z/ρ`.
pub fn kinetic_field(src: &SourceSet) -> Vec<f64> {
    per_density(src, |_, p| kinetic_force(p))
}

/// `𝓓 = d/ρ`.
pub fn differential_density_field(src: &SourceSet) -> Vec<f64> {
    per_density(src, |_, p| differential_density_force(p))
}

/// `𝓛 = ℓ/ρ`.
pub fn lorentz_field(src: &SourceSet, params: &DotParams) -> Vec<f64> {
    let b = params.b();
    per_density(src, |k, _| lorentz_force(src.current.j_phi[k], b))
}

/// `𝓘 = i/ρ`.
pub fn internal_magnetic_field(src: &SourceSet, params: &DotParams) -> Vec<f64> {
    let b = params.b();
    per_density(src, |k, p| internal_magnetic_force(p.rho, src.current.j_phi[k], p.r, b))
}

/// Radial field profiles and the first-law balance.
#[derive(Debug, Clone, Serialize)]
pub struct FieldProfiles {
    pub r: Vec<f64>,
    pub rho: Vec<f64>,
    pub eee: Vec<f64>,
    pub z: Vec<f64>,
    pub d: Vec<f64>,
    pub i: Vec<f64>,
    pub l: Vec<f64>,
    /// External electrostatic field `𝓔 = −ω₀² r`.
    pub e_ext: Vec<f64>,
    pub f_ext: Vec<f64>,
    pub f_int: Vec<f64>,
    /// Conservative field `𝓕 = 𝓕int − 𝓛`.
    pub f_cons: Vec<f64>,
    /// `S = −𝓔ee + 𝓩 + 𝓓`.
    pub s: Vec<f64>,
    pub residual: Vec<f64>,
    pub trusted: Vec<bool>,
    pub keff_fit: FitResult,
    pub keff: f64,
    pub omega: f64,
}

/// Component fields as computed on a common grid.
#[derive(Debug, Clone)]
pub struct FieldComponents {
    pub eee: Vec<f64>,
    pub z: Vec<f64>,
    pub d: Vec<f64>,
    pub i: Vec<f64>,
    pub l: Vec<f64>,
}

impl FieldComponents {
    pub fn from_sources(src: &SourceSet, params: &DotParams) -> Self {
        Self {
            eee: electron_interaction_field(src),
            z: kinetic_field(src),
            d: differential_density_field(src),
            i: internal_magnetic_field(src, params),
            l: lorentz_field(src, params),
        }
    }
}

/// Combines the component fields into the external, internal and
/// conservative fields, the balance residual and the `−k·r` fit of `S`.
pub fn assemble_first_law(src: &SourceSet, c: FieldComponents, params: &DotParams) -> Result<FieldProfiles> {
    let n = src.grid.len();
    if [&c.eee, &c.z, &c.d, &c.i, &c.l].iter().any(|v| v.len() != n) || src.points.len() != n {
        return domain("field components are not on the source grid");
    }
    let r = src.grid.values().to_vec();
    let w2 = params.omega0().powi(2);
    let e_ext: Vec<f64> = r.iter().map(|x| -w2 * x).collect();
    let f_ext: Vec<f64> = (0..n).map(|k| e_ext[k] - c.l[k]).collect();
    let f_int: Vec<f64> = (0..n).map(|k| c.eee[k] - c.z[k] - c.d[k] - c.i[k]).collect();
    let f_cons: Vec<f64> = (0..n).map(|k| f_int[k] - c.l[k]).collect();
    let s: Vec<f64> = (0..n).map(|k| -c.eee[k] + c.z[k] + c.d[k]).collect();
    let residual: Vec<f64> = (0..n).map(|k| f_ext[k] + f_int[k]).collect();

    let scale = src.omega.sqrt();
    let window = (FIT_WINDOW.0 / scale, FIT_WINDOW.1 / scale);
    let neg_s: Vec<f64> = s.iter().map(|v| -v).collect();
    let mut keff_fit = fit_through_origin_selected(&r, &r, &neg_s, window)?;
    keff_fit.slope = -keff_fit.slope;

    Ok(FieldProfiles {
        rho: src.rho(),
        trusted: trusted_mask(src),
        r,
        eee: c.eee,
        z: c.z,
        d: c.d,
        i: c.i,
        l: c.l,
        e_ext,
        f_ext,
        f_int,
        f_cons,
        s,
        residual,
        keff_fit,
        keff: params.keff(),
        omega: src.omega,
    })
}

/// Sources to first-law profiles in one step.
pub fn compute_fields(src: &SourceSet, params: &DotParams) -> Result<FieldProfiles> {
    assemble_first_law(src, FieldComponents::from_sources(src, params), params)
}

impl FieldProfiles {
    /// Fitted effective force constant (`S ≈ −k·r`).
    pub fn keff_estimate(&self) -> f64 {
        -self.keff_fit.slope
    }

    /// Largest `|F_ext + F_int|` over trusted points with `r ∈ [lo, hi]`.
    pub fn max_residual(&self, lo: f64, hi: f64) -> f64 {
        self.r
            .iter()
            .zip(&self.residual)
            .zip(&self.trusted)
            .filter(|((r, _), t)| **t && **r >= lo && **r <= hi)
            .map(|((_, v), _)| v.abs())
            .fold(0.0, f64::max)
    }

    /// Residual over the acceptance window `[0.1, 4/√Ω]`.
    pub fn first_law_residual(&self) -> f64 {
        self.max_residual(0.1, 4.0 / self.omega.sqrt())
    }

    pub fn grid(&self) -> Result<RadialGrid> {
        RadialGrid::from_values(self.r.clone())
    }

    /// Columns `r, rho, Eee, Z, D, I, L, S, minus_keff_r, residual`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["r", "rho", "Eee", "Z", "D", "I", "L", "S", "minus_keff_r", "residual"])?;
        for k in 0..self.r.len() {
            let row = [
                self.r[k],
                self.rho[k],
                self.eee[k],
                self.z[k],
                self.d[k],
                self.i[k],
                self.l[k],
                self.s[k],
                -self.keff * self.r[k],
                self.residual[k],
            ];
            w.write_record(row.iter().map(|v| format_sci(*v)))?;
        }
        w.flush()?;
        Ok(())
    }

    /// Single-line summary for terminal output.
    pub fn summary(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(
            out,
            "keff_fit={:.5} rms={:.3e} first_law_max={:.3e}",
            self.keff_estimate(),
            self.keff_fit.rms_residual,
            self.first_law_residual()
        )
    }
}
