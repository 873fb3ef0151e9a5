//! Quantal sources: electron density, physical current density, pair
//! function and the kinetic-energy tensor (diagonal second derivatives of the
//! single-particle density matrix).
//!
//! Every planar integral over the second electron is written in the relative
//! coordinate `u⃗ = r⃗ − r⃗₂`. With `r⃗ = r x̂` and `c = cos φ_u`,
//!
//! ```text
//! |Ψ(r⃗, r⃗ − u⃗)|² = C² exp(−Ω(2r² + u² − 2ruc)) P(u)²
//! ```
//!
//! so the angular integral of `e^{2Ωruc}·(polynomial in c)` is a combination
//! of scaled Bessel functions and the remaining radial integral over `u` is
//! smooth (the `|r₁ − r₂|` cusp sits at the origin of the `u` plane).

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::model::{DotParams, DotWavefunction};
use crate::numerics::bessel::angular_moments;
use crate::numerics::quadrature::gauss_rule;
use crate::numerics::RadialGrid;

/// Panelling of the relative-coordinate integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SourceQuadrature {
    /// Panel width in units of `1/√Ω`.
    pub panel_width: f64,
    /// Gauss–Legendre nodes per panel.
    pub nodes: usize,
    /// Integration reaches `|u − r| ≤ reach/√Ω`.
    pub reach: f64,
}

impl Default for SourceQuadrature {
    fn default() -> Self {
        Self {
            panel_width: 0.5,
            nodes: 10,
            reach: 9.0,
        }
    }
}

/// All sources at one radius. Vector quantities are radial components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointSources {
    pub r: f64,
    pub rho: f64,
    pub drho: f64,
    pub d2rho: f64,
    pub d3rho: f64,
    /// Electron-interaction 'force' `∫P(r,r')(r−r')/|r−r'|³ d²r'`.
    pub e_ee: f64,
    /// Kinetic-energy tensor, radial-radial component.
    pub t_rr: f64,
    /// Kinetic-energy tensor, azimuthal-azimuthal component.
    pub t_pp: f64,
    pub dt_rr: f64,
}

/// Polynomial in `c = cos φ`, coefficients in increasing degree.
#[derive(Clone, Copy)]
struct CPoly([f64; 4]);

impl CPoly {
    fn mul(self, o: CPoly) -> CPoly {
        let mut out = [0.0; 4];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                if *a != 0.0 && *b != 0.0 {
                    debug_assert!(i + j < 4);
                    out[i + j] += a * b;
                }
            }
        }
        CPoly(out)
    }

    fn add(self, o: CPoly) -> CPoly {
        CPoly(std::array::from_fn(|k| self.0[k] + o.0[k]))
    }

    fn scale(self, s: f64) -> CPoly {
        CPoly(self.0.map(|v| v * s))
    }

    fn average(self, moments: &[f64; 4]) -> f64 {
        self.0.iter().zip(moments).map(|(a, m)| a * m).sum()
    }
}

/// Evaluates every source at radius `r` by quadrature over the relative coordinate.
pub fn point_sources(wf: &DotWavefunction, r: f64, quad: &SourceQuadrature) -> PointSources {
    let w = wf.omega;
    let len = 1.0 / w.sqrt();
    let lo = (r - quad.reach * len).max(0.0);
    let hi = r + quad.reach * len;
    let panels = ((hi - lo) / (quad.panel_width * len)).ceil().max(1.0) as usize;
    let h = (hi - lo) / panels as f64;
    let rule = gauss_rule(quad.nodes);
    let pref = 2.0 * PI * wf.c * wf.c;

    let g_r_base = -4.0 * w * r;
    let g_rr = -4.0 * w;
    let mut acc = [0.0f64; 8];
    for k in 0..panels {
        let a = lo + h * k as f64;
        for (u, wt) in rule.mapped(a, a + h) {
            let weight = wt * pref * (-w * ((r - u).powi(2) + r * r)).exp();
            if weight == 0.0 {
                continue;
            }
            let m = angular_moments(2.0 * w * r * u);
            let p = wf.p(u);
            let dp = wf.dp(u);
            let p2 = p * p;

            let g_r = CPoly([g_r_base, 2.0 * w * u, 0.0, 0.0]);
            let g_r2 = g_r.mul(g_r);
            let one = CPoly([1.0, 0.0, 0.0, 0.0]);
            let q = CPoly([-w * r * p, dp, 0.0, 0.0]);
            let q2 = q.mul(q);

            let dens = 2.0 * u * p2 * weight;
            acc[0] += dens * m[0];
            acc[1] += dens * g_r.average(&m);
            acc[2] += dens * g_r2.add(one.scale(g_rr)).average(&m);
            acc[3] += dens * g_r2.mul(g_r).add(g_r.scale(3.0 * g_rr)).average(&m);
            acc[4] += 2.0 * p2 / u * weight * m[1];
            acc[5] += u * weight * q2.average(&m);
            acc[6] += u * weight * dp * dp * (m[0] - m[2]);
            acc[7] += u * weight * g_r.mul(q2).add(q.scale(-2.0 * w * p)).average(&m);
        }
    }
    PointSources {
        r,
        rho: acc[0],
        drho: acc[1],
        d2rho: acc[2],
        d3rho: acc[3],
        e_ee: acc[4],
        t_rr: acc[5],
        t_pp: acc[6],
        dt_rr: acc[7],
    }
}

/// Physical current density in the symmetric gauge.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurrentProfiles {
    /// Paramagnetic part; identically zero for a real wavefunction.
    pub para_r: Vec<f64>,
    pub para_phi: Vec<f64>,
    /// Physical current `j = j_p + ρA`, radial and azimuthal components.
    pub j_r: Vec<f64>,
    pub j_phi: Vec<f64>,
    /// Vector potential `A = ½B×r`, azimuthal component `Br/2`.
    pub a_phi: Vec<f64>,
}

/// Sources sampled on a radial grid.
#[derive(Debug, Clone, Serialize)]
pub struct SourceSet {
    pub grid: RadialGrid,
    /// Gaussian exponent of the generating wavefunction; sets the length scale.
    pub omega: f64,
    pub points: Vec<PointSources>,
    pub current: CurrentProfiles,
    /// `∫ρ d²r − 2` measured on the grid.
    pub normalization_drift: f64,
    pub warnings: Vec<String>,
}

impl SourceSet {
    pub fn column(&self, f: impl Fn(&PointSources) -> f64) -> Vec<f64> {
        self.points.iter().map(f).collect()
    }

    pub fn rho(&self) -> Vec<f64> {
        self.column(|p| p.rho)
    }
}

/// Density `ρ(r) = 2∫|Ψ(r, r₂)|² d²r₂` on `grid`.
pub fn density(wf: &DotWavefunction, grid: &RadialGrid) -> Vec<f64> {
    density_with(wf, grid, &SourceQuadrature::default())
}

pub fn density_with(wf: &DotWavefunction, grid: &RadialGrid, quad: &SourceQuadrature) -> Vec<f64> {
    grid.values()
        .par_iter()
        .map(|&r| point_sources(wf, r, quad).rho)
        .collect()
}

/// Pair function `P(r, r') = 2|Ψ(r, r')|²` for the two-electron singlet.
#[derive(Debug, Clone, Copy)]
pub struct PairFunction<'a> {
    wf: &'a DotWavefunction,
}

impl PairFunction<'_> {
    pub fn eval(&self, a: [f64; 2], b: [f64; 2]) -> f64 {
        2.0 * self.wf.evaluate(a, b).powi(2)
    }
}

pub fn pair_function(wf: &DotWavefunction) -> PairFunction<'_> {
    PairFunction { wf }
}

/// Real part of the spinless density matrix `γ(r', r'') = 2∫Ψ(r', s)Ψ(r'', s) d²s`.
///
/// The wavefunction is real, so `γ` is real and symmetric; the imaginary
/// (translation-difference) part of the operator definition vanishes.
pub fn density_matrix(wf: &DotWavefunction, a: [f64; 2], b: [f64; 2], angles: usize, radial_panels: usize) -> f64 {
    // polar mesh centred between the two points
    let c = [(a[0] + b[0]) * 0.5, (a[1] + b[1]) * 0.5];
    let reach = 10.0 / wf.omega.sqrt() + (a[0] - b[0]).hypot(a[1] - b[1]);
    let rule = gauss_rule(12);
    let h = reach / radial_panels as f64;
    let mut sum = 0.0;
    for k in 0..radial_panels {
        for (rho, wt) in rule.mapped(h * k as f64, h * (k + 1) as f64) {
            let mut ring = 0.0;
            for j in 0..angles {
                let phi = 2.0 * PI * (j as f64 + 0.5) / angles as f64;
                let s = [c[0] + rho * phi.cos(), c[1] + rho * phi.sin()];
                ring += wf.evaluate(a, s) * wf.evaluate(b, s);
            }
            sum += wt * rho * ring * 2.0 * PI / angles as f64;
        }
    }
    2.0 * sum
}

/// Physical current for a real wavefunction: `j = ρA`, purely azimuthal.
pub fn current_density(rho: &[f64], params: &DotParams, grid: &RadialGrid) -> Result<CurrentProfiles> {
    if rho.len() != grid.len() {
        return domain("density length does not match grid");
    }
    let n = grid.len();
    let a_phi: Vec<f64> = grid.values().iter().map(|r| 0.5 * params.b() * r).collect();
    let j_phi = rho.iter().zip(&a_phi).map(|(p, a)| p * a).collect();
    Ok(CurrentProfiles {
        para_r: vec![0.0; n],
        para_phi: vec![0.0; n],
        j_r: vec![0.0; n],
        j_phi,
        a_phi,
    })
}

/// Kinetic-energy tensor `t_αβ = ∫∂_αΨ(r,s)∂_βΨ(r,s) d²s` in polar components
/// `(t_rr, t_φφ, dt_rr/dr)`; `t_rφ` vanishes by reflection symmetry.
pub fn kinetic_tensor(wf: &DotWavefunction, grid: &RadialGrid) -> Vec<(f64, f64, f64)> {
    let quad = SourceQuadrature::default();
    grid.values()
        .par_iter()
        .map(|&r| {
            let p = point_sources(wf, r, &quad);
            (p.t_rr, p.t_pp, p.dt_rr)
        })
        .collect()
}

/// Computes every source on `grid`.
pub fn compute_sources(
    wf: &DotWavefunction,
    params: &DotParams,
    grid: &RadialGrid,
    quad: &SourceQuadrature,
) -> Result<SourceSet> {
    let points: Vec<PointSources> = grid
        .values()
        .par_iter()
        .map(|&r| point_sources(wf, r, quad))
        .collect();
    if let Some(bad) = points.iter().find(|p| !p.rho.is_finite() || p.rho < 0.0) {
        return crate::error::numeric(format!("invalid density {} at r = {}", bad.rho, bad.r));
    }
    let rho: Vec<f64> = points.iter().map(|p| p.rho).collect();
    let current = current_density(&rho, params, grid)?;
    let total = crate::numerics::integrate_sampled(&rho, grid, crate::numerics::Weight::Planar)?.value;
    let drift = total - 2.0;
    let mut warnings = Vec::new();
    if drift.abs() > 1e-6 {
        warnings.push(format!("density integrates to {total:.9}, not 2"));
    }
    Ok(SourceSet {
        grid: grid.clone(),
        omega: wf.omega,
        points,
        current,
        normalization_drift: drift,
        warnings,
    })
}
