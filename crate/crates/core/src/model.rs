//! Two-electron planar quantum dot in a uniform magnetic field (symmetric
//! gauge): parameters and the closed-form singlet wavefunction family
//!
//! ```text
//! Ψ(r₁, r₂) = C · exp(−Ω (R² + u²/4)) · P(u),   R = |r₁ + r₂|/2,  u = |r₁ − r₂|
//! ```
//!
//! with `P(u) = p₀ + p₁u + p₂u² + p₃u³`. Since `R² + u²/4 = (r₁² + r₂²)/2`
//! the Gaussian factor separates over the two electrons.
//!
//! Hartree atomic units with `c = 1` throughout.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, numeric, Result};
use crate::numerics::quadrature::composite;

/// Effective force constant of the published ground state.
pub const KEFF_GROUND: f64 = 1.0;
/// Effective force constant of the published first excited singlet.
pub const KEFF_EXCITED: f64 = 0.471716;
/// Published ground-state energy (hartree).
pub const E_GROUND: f64 = 3.000000;
/// Published excited-state energy (hartree).
pub const E_EXCITED: f64 = 3.434076;
/// Published normalization constants.
pub const C_GROUND: f64 = 0.135646;
pub const C_EXCITED: f64 = 0.108563;
/// Offsets in the excited-state coefficients `p₂ = Ω/4 − 0.436815`,
/// `p₃ = Ω/4 − 0.353786`.
pub const EXCITED_P2_OFFSET: f64 = 0.436815;
pub const EXCITED_P3_OFFSET: f64 = 0.353786;

/// Trial coefficient sets `(C, Ω, [p₀, p₁, p₂, p₃])` quoted for the last
/// iteration of the self-consistent loop.
pub const TRIAL_GROUND: (f64, f64, [f64; 4]) = (0.135646, 1.000000, [1.0, 1.000000, 0.0, 0.0]);
pub const TRIAL_EXCITED: (f64, f64, [f64; 4]) =
    (0.108563, 0.686816, [1.0, 1.000000, -0.265111, -0.182082]);

/// Confinement and field parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DotParams {
    omega0: f64,
    b: f64,
    omega_l: f64,
    keff: f64,
}

impl DotParams {
    /// From the confinement frequency `ω₀` and field strength `B` (along ẑ).
    pub fn new(omega0: f64, b: f64) -> Result<Self> {
        if !(omega0 >= 0.0 && omega0.is_finite()) {
            return domain(format!("omega0 must be finite and >= 0, got {omega0}"));
        }
        if !b.is_finite() {
            return domain(format!("B must be finite, got {b}"));
        }
        let omega_l = 0.5 * b.abs();
        Ok(Self {
            omega0,
            b,
            omega_l,
            keff: omega0 * omega0 + omega_l * omega_l,
        })
    }

    /// Chooses `ω₀` so that `ω₀² + ω_L² = keff` at the given field.
    pub fn with_keff(keff: f64, b: f64) -> Result<Self> {
        let omega_l = 0.5 * b.abs();
        let w2 = keff - omega_l * omega_l;
        if !(w2 >= 0.0) {
            return domain(format!(
                "keff = {keff} is below the Larmor contribution {} at B = {b}",
                omega_l * omega_l
            ));
        }
        let mut p = Self::new(w2.sqrt(), b)?;
        // keep keff bit-exact with the request
        p.keff = keff;
        Ok(p)
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    /// Field strength (signed, along ẑ).
    pub fn b(&self) -> f64 {
        self.b
    }

    /// Larmor frequency `|B|/2`.
    pub fn omega_l(&self) -> f64 {
        self.omega_l
    }

    pub fn keff(&self) -> f64 {
        self.keff
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateLabel {
    Ground,
    Excited,
    Trial,
}

impl std::fmt::Display for StateLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            StateLabel::Ground => "ground",
            StateLabel::Excited => "excited",
            StateLabel::Trial => "trial",
        })
    }
}

/// Member of the wavefunction family above.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DotWavefunction {
    pub omega: f64,
    pub poly: [f64; 4],
    pub c: f64,
    pub label: StateLabel,
}

impl DotWavefunction {
    /// Unnormalized member (`C = 1`).
    pub fn unnormalized(omega: f64, poly: [f64; 4], label: StateLabel) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return domain(format!("Gaussian exponent must be positive, got {omega}"));
        }
        if poly.iter().all(|&p| p == 0.0) || poly.iter().any(|p| !p.is_finite()) {
            return domain("polynomial must be finite and not identically zero");
        }
        Ok(Self {
            omega,
            poly,
            c: 1.0,
            label,
        })
    }

    /// Normalized member.
    pub fn new(omega: f64, poly: [f64; 4], label: StateLabel) -> Result<Self> {
        Self::unnormalized(omega, poly, label)?.normalize()
    }

    /// Member with an explicitly supplied constant `C` (e.g. a quoted trial set).
    pub fn with_constant(omega: f64, poly: [f64; 4], c: f64, label: StateLabel) -> Result<Self> {
        let mut wf = Self::unnormalized(omega, poly, label)?;
        wf.c = c;
        Ok(wf)
    }

    pub fn p(&self, u: f64) -> f64 {
        let [a, b, c, d] = self.poly;
        a + u * (b + u * (c + u * d))
    }

    pub fn dp(&self, u: f64) -> f64 {
        let [_, b, c, d] = self.poly;
        b + u * (2.0 * c + u * 3.0 * d)
    }

    pub fn d2p(&self, u: f64) -> f64 {
        let [_, _, c, d] = self.poly;
        2.0 * c + 6.0 * d * u
    }

    /// `Ψ(r₁, r₂)`.
    pub fn evaluate(&self, r1: [f64; 2], r2: [f64; 2]) -> f64 {
        let s1 = r1[0] * r1[0] + r1[1] * r1[1];
        let s2 = r2[0] * r2[0] + r2[1] * r2[1];
        let u = (r1[0] - r2[0]).hypot(r1[1] - r2[1]);
        self.c * (-0.5 * self.omega * (s1 + s2)).exp() * self.p(u)
    }

    /// `∫₀^∞ u e^{−Ωu²/2} P(u)² du`, the relative-coordinate factor of the norm.
    fn relative_norm(&self, panels: usize) -> f64 {
        let u_max = 14.0 / self.omega.sqrt();
        composite(
            |u| u * (-0.5 * self.omega * u * u).exp() * self.p(u).powi(2),
            0.0,
            u_max,
            panels,
            12,
        )
    }

    /// `∬|Ψ|² d²r₁ d²r₂` reduced to `(2π)² ∫R dR ∫u du` with the centre-of-mass
    /// factor in closed form.
    pub fn norm(&self) -> f64 {
        self.c * self.c * PI * PI / self.omega * self.relative_norm(64)
    }

    /// Overlap of the normalized states, `⟨a|b⟩/√(⟨a|a⟩⟨b|b⟩)`.
    pub fn normalized_overlap(&self, other: &DotWavefunction) -> f64 {
        let w = self.omega + other.omega;
        let u_max = 14.0 * (2.0 / w).sqrt();
        let rel = composite(
            |u| u * (-0.25 * w * u * u).exp() * self.p(u) * other.p(u),
            0.0,
            u_max,
            128,
            12,
        );
        let raw = self.c * other.c * 2.0 * PI * PI / w * rel;
        raw / (self.norm() * other.norm()).sqrt()
    }

    /// `L²` distance between the normalized states, `√(2 − 2⟨a|b⟩)`.
    pub fn distance(&self, other: &DotWavefunction) -> f64 {
        (2.0 - 2.0 * self.normalized_overlap(other)).max(0.0).sqrt()
    }

    /// Returns a copy with `C` chosen so that the norm is one.
    pub fn normalize(&self) -> Result<Self> {
        let a = self.relative_norm(64);
        let b = self.relative_norm(128);
        if !(a > 0.0 && a.is_finite()) || (a - b).abs() > 1e-12 * a {
            return numeric(format!(
                "normalization quadrature did not converge: {a:e} vs {b:e} (Ω = {}, P = {:?})",
                self.omega, self.poly
            ));
        }
        let mut out = self.clone();
        out.c = (self.omega / (PI * PI * b)).sqrt();
        Ok(out)
    }
}

/// Ground state: `Ω = √keff`, `P(u) = 1 + u`.
pub fn exact_ground(params: &DotParams) -> Result<DotWavefunction> {
    let omega = check_keff(params.keff())?;
    DotWavefunction::new(omega, [1.0, 1.0, 0.0, 0.0], StateLabel::Ground)
}

/// First excited singlet: `Ω = √keff`,
/// `P(u) = 1 + u + (Ω/4 − 0.436815)u² + (Ω/4 − 0.353786)u³`.
pub fn exact_excited(params: &DotParams) -> Result<DotWavefunction> {
    let omega = check_keff(params.keff())?;
    let poly = [
        1.0,
        1.0,
        0.25 * omega - EXCITED_P2_OFFSET,
        0.25 * omega - EXCITED_P3_OFFSET,
    ];
    DotWavefunction::new(omega, poly, StateLabel::Excited)
}

fn check_keff(keff: f64) -> Result<f64> {
    if !(keff > 0.0 && keff.is_finite()) {
        return domain(format!("keff must be positive, got {keff}"));
    }
    Ok(keff.sqrt())
}

/// Local-energy statistics of `Ĥ_eff Ψ = EΨ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualStats {
    /// Mean local energy over the accepted points.
    pub energy: f64,
    pub max_residual: f64,
    pub mean_residual: f64,
    pub evaluated: usize,
    /// Points dropped because `|Ψ| < 1e-12` (or coincident electrons).
    pub skipped: usize,
}

/// Local energy `Ĥ_eff Ψ / Ψ` with
/// `Ĥ_eff = Σᵢ(−½∇ᵢ² + ½ keff rᵢ²) + 1/|r₁ − r₂|`, using analytic derivatives
/// of the closed form. Returns `None` where the ratio is not defined.
pub fn local_energy(wf: &DotWavefunction, keff: f64, r1: [f64; 2], r2: [f64; 2]) -> Option<f64> {
    let psi = wf.evaluate(r1, r2);
    let u = (r1[0] - r2[0]).hypot(r1[1] - r2[1]);
    if psi.abs() < 1e-12 || u < 1e-12 {
        return None;
    }
    let w = wf.omega;
    let s = r1[0] * r1[0] + r1[1] * r1[1] + r2[0] * r2[0] + r2[1] * r2[1];
    let (p, dp, d2p) = (wf.p(u), wf.dp(u), wf.d2p(u));
    // (Δ₁ + Δ₂)Ψ / (C e^{−Ω s/2})
    let lap = p * (w * w * s - 4.0 * w) - 2.0 * w * u * dp + 2.0 * d2p + 2.0 * dp / u;
    Some(-0.5 * lap / p + 0.5 * keff * s + 1.0 / u)
}

/// Pointwise `|ĤΨ − EΨ|/|Ψ|` over `points`, with `E` the mean local energy.
pub fn hamiltonian_residual(
    wf: &DotWavefunction,
    params: &DotParams,
    points: &[([f64; 2], [f64; 2])],
) -> Result<ResidualStats> {
    let locals: Vec<f64> = points
        .iter()
        .filter_map(|&(a, b)| local_energy(wf, params.keff(), a, b))
        .collect();
    if locals.is_empty() {
        return domain("no sample point with |Ψ| above 1e-12");
    }
    let n = locals.len() as f64;
    let energy = locals.iter().sum::<f64>() / n;
    let dev: Vec<f64> = locals.iter().map(|e| (e - energy).abs()).collect();
    Ok(ResidualStats {
        energy,
        max_residual: dev.iter().copied().fold(0.0, f64::max),
        mean_residual: dev.iter().sum::<f64>() / n,
        evaluated: locals.len(),
        skipped: points.len() - locals.len(),
    })
}

/// JSON parameter set: `{"omega0": .., "B": .., "state": .., "poly_override": [..]}`.
///
/// When `omega0` is absent it is chosen so that `keff` equals the published
/// value for the requested state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DotConfig {
    #[serde(default)]
    pub omega0: Option<f64>,
    #[serde(rename = "B", default)]
    pub b: f64,
    pub state: StateLabel,
    #[serde(default)]
    pub poly_override: Option<[f64; 4]>,
    /// Gaussian exponent for trial states; defaults to `√keff`.
    #[serde(default)]
    pub omega_override: Option<f64>,
}

impl DotConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn params(&self) -> Result<DotParams> {
        match self.omega0 {
            Some(w0) => DotParams::new(w0, self.b),
            None => DotParams::with_keff(
                match self.state {
                    StateLabel::Excited => KEFF_EXCITED,
                    _ => KEFF_GROUND,
                },
                self.b,
            ),
        }
    }

    pub fn wavefunction(&self) -> Result<DotWavefunction> {
        let params = self.params()?;
        let base = match self.state {
            StateLabel::Excited => exact_excited(&params)?,
            _ => exact_ground(&params)?,
        };
        if self.poly_override.is_none() && self.omega_override.is_none() && self.state != StateLabel::Trial {
            return Ok(base);
        }
        let label = if self.state == StateLabel::Trial {
            StateLabel::Trial
        } else {
            base.label
        };
        DotWavefunction::new(
            self.omega_override.unwrap_or(base.omega),
            self.poly_override.unwrap_or(base.poly),
            label,
        )
    }
}
