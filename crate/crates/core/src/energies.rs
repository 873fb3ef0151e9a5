//! Energy components from the field integrals (virial form) and from direct
//! expectation values.

use serde::Serialize;

use crate::error::{domain, Result};
use crate::fields::{kinetic_force, FieldProfiles};
use crate::model::{DotParams, DotWavefunction, StateLabel, E_EXCITED, E_GROUND};
use crate::numerics::quadrature::composite;
use crate::numerics::{integrate_sampled, Weight};
use crate::sources::SourceSet;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyReport {
    pub t_virial: f64,
    pub eee_virial: f64,
    pub t_direct: f64,
    pub eee_direct: f64,
    pub eext_direct: f64,
    pub emag_direct: f64,
    /// Largest `|Ψ Σᵢ A(rᵢ)·∇ᵢΨ|` over the probe points.
    pub cross_term_max: f64,
    pub e_total: f64,
    /// Total with the virial kinetic and interaction energies.
    pub e_total_virial: Option<f64>,
    pub e_reference: Option<f64>,
    /// `5Ω`: exact energy of the cubic excited state when `27Ω² − 20Ω + 1 = 0`.
    pub five_omega: f64,
}

impl EnergyReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// `T = −½∫ρ r·𝓩 d²r` and `Eee = ∫ρ r·𝓔ee d²r`, evaluated from the
/// sampled forces `ρ𝓩` and `ρ𝓔ee` so that masked tails contribute.
pub fn energy_virial(src: &SourceSet, fp: &FieldProfiles) -> Result<(f64, f64)> {
    if fp.r.len() != src.points.len() || fp.r.iter().zip(&src.points).any(|(a, p)| *a != p.r) {
        return domain("field profiles and sources are on different grids");
    }
    let t: Vec<f64> = src.points.iter().map(|p| -0.5 * p.r * kinetic_force(p)).collect();
    let e: Vec<f64> = src.points.iter().map(|p| p.r * p.e_ee).collect();
    let t = integrate_sampled(&t, &src.grid, Weight::Planar)?.value;
    let e = integrate_sampled(&e, &src.grid, Weight::Planar)?.value;
    Ok((t, e))
}

/// Relative-coordinate moments of `g(u) = e^{−Ωu²/4}P(u)`.
struct RelativeMoments {
    /// `∫u g² du`
    norm: f64,
    /// `∫u g′² du`
    kinetic: f64,
    /// `∫g² du`
    inverse: f64,
    /// `∫u³ g² du`
    second: f64,
}

fn relative_moments(wf: &DotWavefunction) -> RelativeMoments {
    let w = wf.omega;
    let u_max = 14.0 / w.sqrt();
    let g2 = |u: f64| (-0.5 * w * u * u).exp() * wf.p(u).powi(2);
    let dg2 = |u: f64| (-0.5 * w * u * u).exp() * (wf.dp(u) - 0.5 * w * u * wf.p(u)).powi(2);
    let q = |f: &dyn Fn(f64) -> f64| composite(f, 0.0, u_max, 128, 12);
    RelativeMoments {
        norm: q(&|u| u * g2(u)),
        kinetic: q(&|u| u * dg2(u)),
        inverse: q(&g2),
        second: q(&|u| u.powi(3) * g2(u)),
    }
}

/// `Ψ(r₁,r₂) Σᵢ A(rᵢ)·∇ᵢΨ(r₁,r₂)` with `A(r) = ½B ẑ×r`; its integral is the
/// paramagnetic cross term of the kinetic energy.
pub fn cross_term_density(wf: &DotWavefunction, b: f64, r1: [f64; 2], r2: [f64; 2]) -> f64 {
    let w = wf.omega;
    let d = [r1[0] - r2[0], r1[1] - r2[1]];
    let u = d[0].hypot(d[1]);
    let psi = wf.evaluate(r1, r2);
    let gauss = wf.c * (-0.5 * w * (r1[0] * r1[0] + r1[1] * r1[1] + r2[0] * r2[0] + r2[1] * r2[1])).exp();
    let (p, dp) = (wf.p(u), wf.dp(u));
    let grad = |ri: [f64; 2], sign: f64| -> [f64; 2] {
        let radial = if u > 0.0 { sign * dp / u } else { 0.0 };
        [
            gauss * (-w * ri[0] * p + radial * d[0]),
            gauss * (-w * ri[1] * p + radial * d[1]),
        ]
    };
    let a = |ri: [f64; 2]| [-0.5 * b * ri[1], 0.5 * b * ri[0]];
    let (g1, g2) = (grad(r1, 1.0), grad(r2, -1.0));
    let (a1, a2) = (a(r1), a(r2));
    psi * (a1[0] * g1[0] + a1[1] * g1[1] + a2[0] * g2[0] + a2[1] * g2[1])
}

fn probe_points() -> Vec<([f64; 2], [f64; 2])> {
    let mut pts = Vec::new();
    for k in 0..24 {
        let t = k as f64;
        let r1 = [0.9 * (0.7 * t).cos() * (1.0 + 0.1 * t), 0.6 * (1.3 * t).sin()];
        let r2 = [-0.5 * (0.4 * t).sin(), 1.1 * (0.9 * t).cos() * (0.5 + 0.05 * t)];
        pts.push((r1, r2));
    }
    pts
}

/// Direct expectation values, optionally cross-checked against the virial
/// integrals of `src`/`fp`.
pub fn energy_total(
    wf: &DotWavefunction,
    params: &DotParams,
    virial: Option<(&SourceSet, &FieldProfiles)>,
) -> Result<EnergyReport> {
    let m = relative_moments(wf);
    let w = wf.omega;
    let t_direct = 0.5 * w + m.kinetic / m.norm;
    let eee_direct = m.inverse / m.norm;
    let r2_sum = 1.0 / w + 0.5 * m.second / m.norm;
    let eext_direct = 0.5 * params.omega0().powi(2) * r2_sum;
    let emag_direct = 0.5 * params.omega_l().powi(2) * r2_sum;
    let cross_term_max = probe_points()
        .iter()
        .map(|(a, b)| cross_term_density(wf, params.b(), *a, *b).abs())
        .fold(0.0, f64::max);
    let e_total = t_direct + eee_direct + eext_direct + emag_direct;
    let (t_virial, eee_virial, e_total_virial) = match virial {
        Some((src, fp)) => {
            let (t, e) = energy_virial(src, fp)?;
            (t, e, Some(t + e + eext_direct + emag_direct))
        }
        None => (f64::NAN, f64::NAN, None),
    };
    let e_reference = match wf.label {
        StateLabel::Ground => Some(E_GROUND),
        StateLabel::Excited => Some(E_EXCITED),
        StateLabel::Trial => None,
    };
    Ok(EnergyReport {
        t_virial,
        eee_virial,
        t_direct,
        eee_direct,
        eext_direct,
        emag_direct,
        cross_term_max,
        e_total,
        e_total_virial,
        e_reference,
        five_omega: 5.0 * w,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::exact_ground;

    #[test]
    fn ground_direct_energy() {
        let p = DotParams::new(1.0, 0.0).unwrap();
        let wf = exact_ground(&p).unwrap();
        let e = energy_total(&wf, &p, None).unwrap();
        assert!((e.e_total - 3.0).abs() < 1e-10, "{e:?}");
        assert!(e.e_total_virial.is_none());
    }

    #[test]
    fn cross_term_vanishes_pointwise() {
        let p = DotParams::with_keff(1.0, 1.3).unwrap();
        let wf = exact_ground(&p).unwrap();
        for (a, b) in probe_points() {
            assert!(cross_term_density(&wf, 1.3, a, b).abs() < 1e-14);
        }
    }

    #[test]
    fn magnetic_split_keeps_total() {
        let p0 = DotParams::with_keff(1.0, 0.0).unwrap();
        let pb = DotParams::with_keff(1.0, 1.2).unwrap();
        let wf = exact_ground(&p0).unwrap();
        let a = energy_total(&wf, &p0, None).unwrap();
        let b = energy_total(&wf, &pb, None).unwrap();
        assert!((a.e_total - b.e_total).abs() < 1e-12);
        assert!(b.emag_direct > 0.0);
    }
}
