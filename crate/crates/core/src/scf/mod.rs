//! Self-consistent solution: wavefunction → sources → fields → potential →
//! Schrödinger equation → wavefunction.

pub mod eigen;
pub mod relative;

pub use relative::{project, solve_effective_dot, solve_relative, EffectiveDot, Projection, RelativeSolution, RelativeSolver};
pub mod potential;

pub use potential::{reconstruct_potential, reconstruct_potential_anchored, PotentialProfile};

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::compute_fields;
use crate::model::{DotParams, DotWavefunction};
use crate::numerics::{format_sci, FitResult, RadialGrid};
use crate::sources::{compute_sources, SourceQuadrature};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScfConfig {
    pub tol_keff: f64,
    pub tol_wf: f64,
    pub max_iter: usize,
    pub mixing: f64,
    /// Node count of the relative-motion eigenstate.
    pub state_select: usize,
    /// Radial grid points for sources and fields, spanning `[0, 8/√Ω]`.
    pub grid_points: usize,
    /// Consecutive growing iterations that count as divergence.
    pub divergence_window: usize,
    #[serde(skip)]
    pub solver: RelativeSolver,
    #[serde(skip)]
    pub quadrature: SourceQuadrature,
}

impl Default for ScfConfig {
    fn default() -> Self {
        Self {
            tol_keff: 1e-5,
            tol_wf: 1e-5,
            max_iter: 50,
            mixing: 1.0,
            state_select: 0,
            grid_points: 801,
            divergence_window: 5,
            solver: RelativeSolver::default(),
            quadrature: SourceQuadrature::default(),
        }
    }
}

impl ScfConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol_keff > 0.0 && self.tol_wf > 0.0) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        if !(self.mixing > 0.0 && self.mixing <= 1.0) {
            return Err(Error::Config(format!("mixing {} outside (0, 1]", self.mixing)));
        }
        if self.max_iter == 0 {
            return Err(Error::Config("max_iter must be at least 1".into()));
        }
        if self.grid_points < 101 {
            return Err(Error::Config("grid_points must be at least 101".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScfState {
    pub iter: usize,
    /// Wavefunction produced by this iteration.
    pub wf: DotWavefunction,
    pub v_profile: PotentialProfile,
    /// Harmonic fit of the reconstructed potential.
    pub keff_fit: FitResult,
    /// Force constant used in the Schrödinger step (`k_v + ω_L²`, mixed).
    pub keff: f64,
    pub energy: f64,
    pub delta_wf: f64,
    pub delta_keff: f64,
    pub projection_residual: f64,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScfOutcome {
    pub history: Vec<ScfState>,
    pub converged: bool,
}

impl ScfOutcome {
    pub fn last(&self) -> &ScfState {
        self.history.last().expect("history is never empty")
    }

    /// Columns `iter, keff, E, delta_wf, delta_keff, fit_residual`.
    pub fn write_log(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["iter", "keff", "E", "delta_wf", "delta_keff", "fit_residual"])?;
        for s in &self.history {
            w.write_record([
                s.iter.to_string(),
                format_sci(s.keff),
                format_sci(s.energy),
                format_sci(s.delta_wf),
                format_sci(s.delta_keff),
                format_sci(s.keff_fit.rms_residual),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// One pass of the cycle: fields of `wf`, potential, and the re-solved state.
fn step(wf: &DotWavefunction, params: &DotParams, cfg: &ScfConfig) -> Result<(PotentialProfile, f64)> {
    let grid = RadialGrid::uniform(0.0, 8.0 / wf.omega.sqrt(), cfg.grid_points)?;
    let src = compute_sources(wf, params, &grid, &cfg.quadrature)?;
    let fp = compute_fields(&src, params)?;
    let pot = reconstruct_potential(&fp)?;
    let target = pot.keff() + params.omega_l().powi(2);
    Ok((pot, target))
}

/// Iterates to the fixed point. The force constant implied by the starting
/// wavefunction is `Ω²` (its centre-of-mass exponent is `√k`).
pub fn run_scf(initial: &DotWavefunction, params: &DotParams, cfg: &ScfConfig) -> Result<ScfOutcome> {
    cfg.validate()?;
    let mut wf = initial.normalize()?;
    let mut k_prev = wf.omega.powi(2);
    let mut history: Vec<ScfState> = Vec::new();
    let mut growing = 0;
    let mut last_metric = f64::INFINITY;
    for iter in 1..=cfg.max_iter {
        let (pot, target) = step(&wf, params, cfg)?;
        let k = k_prev + cfg.mixing * (target - k_prev);
        if !(k > 0.0) {
            return Err(Error::Diverged {
                reason: format!("force constant became {k} at iteration {iter}"),
                history,
            });
        }
        let sol = solve_effective_dot(k, cfg.state_select, &cfg.solver)?;
        let delta_keff = (target - k_prev).abs();
        let delta_wf = wf.distance(&sol.wf);
        history.push(ScfState {
            iter,
            wf: sol.wf.clone(),
            keff_fit: pot.fit,
            v_profile: pot,
            keff: k,
            energy: sol.energy,
            delta_wf,
            delta_keff,
            projection_residual: sol.projection.residual,
            warnings: sol.warnings,
        });
        if delta_keff < cfg.tol_keff && delta_wf < cfg.tol_wf {
            return Ok(ScfOutcome { history, converged: true });
        }
        let metric = delta_keff.max(delta_wf);
        growing = if metric > last_metric { growing + 1 } else { 0 };
        last_metric = metric;
        if growing >= cfg.divergence_window {
            return Err(Error::Diverged {
                reason: format!("convergence metrics grew for {growing} consecutive iterations"),
                history,
            });
        }
        wf = sol.wf;
        k_prev = k;
    }
    Ok(ScfOutcome { history, converged: false })
}
