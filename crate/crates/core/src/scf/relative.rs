//! Relative-motion radial equation
//!
//! ```text
//! −[φ″ + φ′/u] + (k u²/4 + 1/u) φ = ε φ
//! ```
//!
//! on cell-centred nodes `u_i = (i + ½)h`. Solutions on `N` and `3N` cells
//! share the coarse nodes, so eigenvalues and eigenfunctions are
//! Richardson-extrapolated in `h²`.

use nalgebra::{Matrix4, Vector4};
use serde::Serialize;

use super::eigen::{count_nodes, SymTridiagonal};
use crate::error::{domain, numeric, Result};
use crate::model::{DotWavefunction, StateLabel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelativeSolver {
    /// Coarse cell count.
    pub points: usize,
    /// Domain `[0, reach/k^{1/4}]`.
    pub reach: f64,
    pub interaction: bool,
    pub extrapolate: bool,
}

impl Default for RelativeSolver {
    fn default() -> Self {
        Self {
            points: 3000,
            reach: 12.0,
            interaction: true,
            extrapolate: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelativeSolution {
    pub u: Vec<f64>,
    /// Normalized so that `Σ u_i h φ_i² = 1` and `φ(u₀) > 0`.
    pub phi: Vec<f64>,
    pub epsilon: f64,
    pub nodes: usize,
}

fn solve_on(k: f64, nodes: usize, cells: usize, u_max: f64, interaction: bool) -> Result<RelativeSolution> {
    let h = u_max / cells as f64;
    let u: Vec<f64> = (0..cells).map(|i| (i as f64 + 0.5) * h).collect();
    let h2 = h * h;
    let diag: Vec<f64> = u
        .iter()
        .enumerate()
        .map(|(i, &ui)| {
            let inner = if i == 0 { 0.0 } else { ui - 0.5 * h };
            let v = 0.25 * k * ui * ui + if interaction { 1.0 / ui } else { 0.0 };
            (ui + 0.5 * h + inner) / (ui * h2) + v
        })
        .collect();
    let off: Vec<f64> = (0..cells - 1)
        .map(|i| -(u[i] + 0.5 * h) / (h2 * (u[i] * u[i + 1]).sqrt()))
        .collect();
    let t = SymTridiagonal::new(diag, off)?;
    let epsilon = t.eigenvalue(nodes)?;
    let y = t.eigenvector(epsilon)?;
    let found = count_nodes(&y);
    if found != nodes {
        return numeric(format!("eigenvector has {found} nodes, expected {nodes}"));
    }
    let mut phi: Vec<f64> = y.iter().zip(&u).map(|(y, u)| y / u.sqrt()).collect();
    let norm = phi.iter().zip(&u).map(|(p, u)| p * p * u * h).sum::<f64>().sqrt();
    let sign = if phi[0] < 0.0 { -1.0 } else { 1.0 };
    phi.iter_mut().for_each(|p| *p *= sign / norm);
    Ok(RelativeSolution {
        u,
        phi,
        epsilon,
        nodes,
    })
}

/// Eigenstate of the relative equation with the given node count.
pub fn solve_relative(k: f64, nodes: usize, solver: &RelativeSolver) -> Result<RelativeSolution> {
    if !(k > 0.0 && k.is_finite()) {
        return domain(format!("force constant must be positive, got {k}"));
    }
    if solver.points < 50 {
        return domain("relative solver needs at least 50 cells");
    }
    let u_max = solver.reach / k.powf(0.25);
    let coarse = solve_on(k, nodes, solver.points, u_max, solver.interaction)?;
    if !solver.extrapolate {
        return Ok(coarse);
    }
    let fine = solve_on(k, nodes, 3 * solver.points, u_max, solver.interaction)?;
    let phi = coarse
        .phi
        .iter()
        .enumerate()
        .map(|(i, pc)| (9.0 * fine.phi[3 * i + 1] - pc) / 8.0)
        .collect();
    Ok(RelativeSolution {
        u: coarse.u,
        phi,
        epsilon: (9.0 * fine.epsilon - coarse.epsilon) / 8.0,
        nodes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Projection {
    /// Coefficients of `P`, scaled so that `p₀ = 1`.
    pub poly: [f64; 4],
    /// `‖φ − fit‖/‖φ‖` in the `u du` norm.
    pub residual: f64,
}

/// Least-squares projection of `φ(u)` onto `e^{−Ωu²/4}(p₀ + p₁u + p₂u² + p₃u³)`.
pub fn project(sol: &RelativeSolution, omega: f64) -> Result<Projection> {
    let u = &sol.u;
    let mut ata = Matrix4::<f64>::zeros();
    let mut atb = Vector4::<f64>::zeros();
    let basis = |x: f64| {
        let g = (-0.25 * omega * x * x).exp();
        Vector4::new(g, g * x, g * x * x, g * x * x * x)
    };
    for (i, &x) in u.iter().enumerate() {
        let b = basis(x);
        ata += x * b * b.transpose();
        atb += x * sol.phi[i] * b;
    }
    let coef = ata
        .cholesky()
        .ok_or_else(|| crate::Error::Numeric("projection normal equations are singular".into()))?
        .solve(&atb);
    if coef[0].abs() < 1e-300 {
        return numeric("projected polynomial vanishes at the origin");
    }
    let (mut num, mut den) = (0.0, 0.0);
    for (i, &x) in u.iter().enumerate() {
        let fit = basis(x).dot(&coef);
        num += x * (sol.phi[i] - fit).powi(2);
        den += x * sol.phi[i].powi(2);
    }
    Ok(Projection {
        poly: [1.0, coef[1] / coef[0], coef[2] / coef[0], coef[3] / coef[0]],
        residual: (num / den).sqrt(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EffectiveDot {
    pub wf: DotWavefunction,
    /// `E = ε + √k`.
    pub energy: f64,
    pub epsilon: f64,
    pub projection: Projection,
    #[serde(skip)]
    pub radial: RelativeSolution,
    pub warnings: Vec<String>,
}

/// Solves the separable two-electron problem in a harmonic well of force
/// constant `k`: centre of mass analytically, relative motion numerically.
pub fn solve_effective_dot(k: f64, state_select: usize, solver: &RelativeSolver) -> Result<EffectiveDot> {
    let radial = solve_relative(k, state_select, solver)?;
    let omega = k.sqrt();
    let projection = project(&radial, omega)?;
    let mut warnings = Vec::new();
    if projection.residual > 1e-3 {
        warnings.push(format!(
            "relative solution at k = {k} lies outside the cubic family (residual {:.3e})",
            projection.residual
        ));
    }
    let label = match state_select {
        0 => StateLabel::Ground,
        1 => StateLabel::Excited,
        _ => StateLabel::Trial,
    };
    let wf = DotWavefunction::new(omega, projection.poly, label)?;
    Ok(EffectiveDot {
        wf,
        energy: radial.epsilon + omega,
        epsilon: radial.epsilon,
        projection,
        radial,
        warnings,
    })
}
