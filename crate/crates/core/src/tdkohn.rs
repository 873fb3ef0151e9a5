//! Uniform time-dependent electric drive of the dot.
//!
//! For harmonic confinement, uniform `B` and uniform `E(t)`, the driven state
//! is the static state rigidly translated along a classical trajectory `y(t)`
//! (times a phase). With electron charge `−1` the trajectory obeys
//!
//! ```text
//! ÿ = −ω₀² y − E(t) − ẏ × B ẑ
//! ```
//!
//! and the phase gradient per electron is `κ = ẏ − A(y)`, so that with
//! `s = r − y` the physical current is `j = ρ₀(|s|)(ẏ + A(s))`. The sign of
//! the drive term is the one for which a vanishing drive reproduces the
//! stationary force balance.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::fields::{compute_fields, FieldProfiles};
use crate::model::{DotParams, DotWavefunction};
use crate::numerics::quadrature::{gauss_rule, lagrange, local_window};
use crate::numerics::{format_sci, RadialGrid};
use crate::sources::{compute_sources, SourceQuadrature, SourceSet};

type V2 = [f64; 2];

fn add(a: V2, b: V2) -> V2 {
    [a[0] + b[0], a[1] + b[1]]
}
fn sub(a: V2, b: V2) -> V2 {
    [a[0] - b[0], a[1] - b[1]]
}
fn scale(a: V2, s: f64) -> V2 {
    [a[0] * s, a[1] * s]
}
fn dot(a: V2, b: V2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}
fn norm(a: V2) -> f64 {
    a[0].hypot(a[1])
}
/// `a × (b ẑ)`.
fn cross_z(a: V2, b: f64) -> V2 {
    [a[1] * b, -a[0] * b]
}
/// Symmetric-gauge vector potential `A(r) = ½B ẑ × r`.
fn vector_potential(r: V2, b: f64) -> V2 {
    [-0.5 * b * r[1], 0.5 * b * r[0]]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Envelope {
    None,
    /// `sin²(πt/2τ)` for `t < τ`, then 1.
    Ramp { tau: f64 },
}

impl Envelope {
    fn at(&self, t: f64) -> f64 {
        match *self {
            Envelope::None => 1.0,
            Envelope::Ramp { tau } if t < tau => (0.5 * std::f64::consts::PI * t / tau).sin().powi(2),
            Envelope::Ramp { .. } => 1.0,
        }
    }
}

/// `E(t) = E₀ · envelope(t) · cos(ωt)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveSpec {
    pub e_amplitude: V2,
    pub omega_drive: f64,
    pub envelope: Envelope,
    pub t_end: f64,
    pub dt: f64,
}

impl DriveSpec {
    pub fn zero(t_end: f64, dt: f64) -> Self {
        Self {
            e_amplitude: [0.0, 0.0],
            omega_drive: 0.0,
            envelope: Envelope::None,
            t_end,
            dt,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::Config(format!("t_end must be non-negative, got {}", self.t_end)));
        }
        if let Envelope::Ramp { tau } = self.envelope {
            if !(tau > 0.0) {
                return Err(Error::Config("ramp duration must be positive".into()));
            }
        }
        Ok(())
    }

    pub fn field(&self, t: f64) -> V2 {
        scale(self.e_amplitude, self.envelope.at(t) * (self.omega_drive * t).cos())
    }

    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KohnTrajectory {
    pub times: Vec<f64>,
    pub y: Vec<V2>,
    pub ydot: Vec<V2>,
    /// Second-law residual at the steps where it was evaluated, NaN elsewhere.
    pub second_law_residual: Vec<f64>,
    pub b: f64,
    pub omega0: f64,
    pub drive: DriveSpec,
}

impl KohnTrajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Step index of time `t` (nearest step).
    pub fn index_of(&self, t: f64) -> Result<usize> {
        let last = *self.times.last().unwrap_or(&0.0);
        if !(t >= -1e-12 && t <= last + 1e-12) {
            return domain(format!("time {t} outside trajectory [0, {last}]"));
        }
        Ok(((t / self.drive.dt).round() as usize).min(self.len() - 1))
    }

    /// Columns `t, y_x, y_y, ydot_x, ydot_y, residual`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["t", "y_x", "y_y", "ydot_x", "ydot_y", "residual"])?;
        for k in 0..self.len() {
            let row = [
                self.times[k],
                self.y[k][0],
                self.y[k][1],
                self.ydot[k][0],
                self.ydot[k][1],
                self.second_law_residual[k],
            ];
            w.write_record(row.iter().map(|v| format_sci(*v)))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Fock–Darwin classical mode frequencies `ω± = √(ω₀² + ω_L²) ± ω_L`.
pub fn mode_frequencies(params: &DotParams) -> (f64, f64) {
    let wl = params.omega_l();
    let root = (params.omega0().powi(2) + wl * wl).sqrt();
    (root + wl, root - wl)
}

fn acceleration(y: V2, v: V2, e: V2, w2: f64, b: f64) -> V2 {
    sub(sub(scale(y, -w2), e), cross_z(v, b))
}

fn rk4(params: &DotParams, drive: &DriveSpec, y0: V2, v0: V2, steps: usize, dt: f64) -> (Vec<V2>, Vec<V2>) {
    let w2 = params.omega0().powi(2);
    let b = params.b();
    let mut ys = Vec::with_capacity(steps + 1);
    let mut vs = Vec::with_capacity(steps + 1);
    let (mut y, mut v) = (y0, v0);
    ys.push(y);
    vs.push(v);
    for n in 0..steps {
        let t = n as f64 * dt;
        let e0 = drive.field(t);
        let eh = drive.field(t + 0.5 * dt);
        let e1 = drive.field(t + dt);
        let k1y = v;
        let k1v = acceleration(y, v, e0, w2, b);
        let k2y = add(v, scale(k1v, 0.5 * dt));
        let k2v = acceleration(add(y, scale(k1y, 0.5 * dt)), k2y, eh, w2, b);
        let k3y = add(v, scale(k2v, 0.5 * dt));
        let k3v = acceleration(add(y, scale(k2y, 0.5 * dt)), k3y, eh, w2, b);
        let k4y = add(v, scale(k3v, dt));
        let k4v = acceleration(add(y, scale(k3y, dt)), k4y, e1, w2, b);
        let comb = |a: V2, b2: V2, c: V2, d: V2| scale(add(add(a, scale(b2, 2.0)), add(scale(c, 2.0), d)), dt / 6.0);
        y = add(y, comb(k1y, k2y, k3y, k4y));
        v = add(v, comb(k1v, k2v, k3v, k4v));
        ys.push(y);
        vs.push(v);
    }
    (ys, vs)
}

/// Relative energy drift over one period of the slowest mode for an undriven
/// unit-amplitude orbit integrated with step `dt`.
pub fn energy_drift_per_period(params: &DotParams, dt: f64) -> f64 {
    let (_, slow) = mode_frequencies(params);
    let period = 2.0 * std::f64::consts::PI / slow;
    let steps = (period / dt).ceil() as usize;
    let w2 = params.omega0().powi(2);
    let energy = |y: V2, v: V2| 0.5 * dot(v, v) + 0.5 * w2 * dot(y, y);
    let (ys, vs) = rk4(params, &DriveSpec::zero(period, dt), [1.0, 0.0], [0.0, 0.0], steps, dt);
    let e0 = energy(ys[0], vs[0]);
    (energy(ys[steps], vs[steps]) - e0).abs() / e0
}

/// Integrates the trajectory from rest at the origin.
pub fn classical_trajectory(params: &DotParams, drive: &DriveSpec) -> Result<KohnTrajectory> {
    trajectory_from(params, drive, [0.0, 0.0], [0.0, 0.0])
}

/// Integrates the trajectory from `(y0, v0)` with fixed-step RK4.
pub fn trajectory_from(params: &DotParams, drive: &DriveSpec, y0: V2, v0: V2) -> Result<KohnTrajectory> {
    drive.validate()?;
    let drift = energy_drift_per_period(params, drive.dt);
    if drift > 1e-6 {
        return Err(Error::Config(format!(
            "dt = {} gives energy drift {drift:.2e} per period",
            drive.dt
        )));
    }
    let steps = drive.steps();
    let (y, ydot) = rk4(params, drive, y0, v0, steps, drive.dt);
    Ok(KohnTrajectory {
        times: (0..=steps).map(|n| n as f64 * drive.dt).collect(),
        y,
        ydot,
        second_law_residual: vec![f64::NAN; steps + 1],
        b: params.b(),
        omega0: params.omega0(),
        drive: *drive,
    })
}

/// Static radial profiles of the undriven state.
#[derive(Debug, Clone)]
pub struct StaticProfiles {
    pub fields: FieldProfiles,
    pub drho: Vec<f64>,
    grid: RadialGrid,
}

/// Static profile values at one radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StaticPoint {
    pub rho: f64,
    pub drho: f64,
    pub eee: f64,
    pub z: f64,
    pub d: f64,
    pub i: f64,
    pub l: f64,
    pub e_ext: f64,
    pub residual: f64,
}

impl StaticProfiles {
    pub fn new(wf: &DotWavefunction, params: &DotParams, grid: &RadialGrid) -> Result<Self> {
        let src = compute_sources(wf, params, grid, &SourceQuadrature::default())?;
        Self::from_sources(&src, params)
    }

    pub fn from_sources(src: &SourceSet, params: &DotParams) -> Result<Self> {
        Ok(Self {
            fields: compute_fields(src, params)?,
            drho: src.column(|p| p.drho),
            grid: src.grid.clone(),
        })
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    fn interp(&self, y: &[f64], s: f64) -> f64 {
        let x = self.grid.values();
        match x.binary_search_by(|v| v.partial_cmp(&s).unwrap()) {
            Ok(i) => y[i],
            Err(i) => {
                let (xs, ys) = local_window(x, y, i - 1);
                lagrange(xs, ys, s)
            }
        }
    }

    /// Profiles at radius `s`; `None` beyond the grid (density negligible).
    pub fn at(&self, s: f64) -> Option<StaticPoint> {
        if s > self.grid.r_max() || s < self.grid.r_min() {
            return None;
        }
        let f = &self.fields;
        Some(StaticPoint {
            rho: self.interp(&f.rho, s),
            drho: self.interp(&self.drho, s),
            eee: self.interp(&f.eee, s),
            z: self.interp(&f.z, s),
            d: self.interp(&f.d, s),
            i: self.interp(&f.i, s),
            l: self.interp(&f.l, s),
            e_ext: self.interp(&f.e_ext, s),
            residual: self.interp(&f.residual, s),
        })
    }

    pub fn density(&self, s: f64) -> f64 {
        if s > self.grid.r_max() {
            return 0.0;
        }
        self.interp(&self.fields.rho, s)
    }
}

/// Kinematic state at one step.
#[derive(Debug, Clone, Copy)]
struct Kinematics {
    y: V2,
    ydot: V2,
    t: f64,
}

fn kin(traj: &KohnTrajectory, k: usize) -> Kinematics {
    Kinematics {
        y: traj.y[k],
        ydot: traj.ydot[k],
        t: traj.times[k],
    }
}

fn current(st: &StaticProfiles, k: &Kinematics, r: V2, b: f64) -> V2 {
    let s = sub(r, k.y);
    scale(add(k.ydot, vector_potential(s, b)), st.density(norm(s)))
}

/// `∂j/∂t` at step `k` by central differences over `h` steps (one-sided at
/// the ends of the trajectory).
fn current_rate(st: &StaticProfiles, traj: &KohnTrajectory, k: usize, h: usize, r: V2) -> V2 {
    let n = traj.len();
    let (lo, hi) = if k >= h && k + h < n {
        (k - h, k + h)
    } else if k + h < n {
        (k, k + h)
    } else {
        (k.saturating_sub(h), k)
    };
    if lo == hi {
        return [0.0, 0.0];
    }
    let ja = current(st, &kin(traj, lo), r, traj.b);
    let jb = current(st, &kin(traj, hi), r, traj.b);
    scale(sub(jb, ja), 1.0 / (traj.times[hi] - traj.times[lo]))
}

/// Every field of the second law at one point and time, as plane vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TdPoint {
    pub rho: f64,
    pub e_ext: V2,
    pub eee: V2,
    pub z: V2,
    pub d: V2,
    pub i: V2,
    pub l: V2,
    pub j: V2,
    /// `𝓕ext + 𝓕int − 𝓙`.
    pub residual: V2,
}

/// Second-law fields at `r`: translated static fields plus the corrections
/// carried by the drift `κ = ẏ − A(y)` and the displaced vector potential.
fn td_point(st: &StaticProfiles, traj: &KohnTrajectory, k: usize, h: usize, r: V2) -> Option<TdPoint> {
    let kk = kin(traj, k);
    let b = traj.b;
    let s = sub(r, kk.y);
    let sn = norm(s);
    let shat = if sn > 0.0 { scale(s, 1.0 / sn) } else { [1.0, 0.0] };
    let p = st.at(sn)?;
    let radial = |v: f64| scale(shat, v);
    let a_y = vector_potential(kk.y, b);
    let a_s = vector_potential(s, b);
    let kappa = sub(kk.ydot, a_y);
    let v = add(kappa, a_y);
    let g = scale(shat, p.drho);
    let m = |x: V2| vector_potential(x, b);

    let e_corr = sub(scale(kk.y, -traj.omega0.powi(2)), traj.drive.field(kk.t));
    let l_corr = cross_z(v, b);
    let z_corr = scale(kappa, dot(kappa, g) / p.rho);
    let i_corr = add(
        scale(add(scale(kappa, dot(a_y, g)), scale(add(a_s, a_y), dot(v, g))), 1.0 / p.rho),
        m(v),
    );
    let j = scale(current_rate(st, traj, k, h, r), 1.0 / p.rho);
    // static balance along ŝ plus the drift corrections, grouped as F_ext + F_int
    let corr = sub(sub(sub(e_corr, l_corr), z_corr), i_corr);
    let residual = sub(add(radial(p.residual), corr), j);
    Some(TdPoint {
        rho: p.rho,
        e_ext: add(radial(p.e_ext), e_corr),
        eee: radial(p.eee),
        z: add(radial(p.z), z_corr),
        d: radial(p.d),
        i: add(radial(p.i), i_corr),
        l: add(radial(p.l), l_corr),
        j,
        residual,
    })
}

/// Translated static profiles along the ray `y(t) + r x̂`, in the column
/// layout of the stationary field export.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Snapshot {
    pub t: f64,
    pub y: V2,
    pub r: Vec<f64>,
    pub rho: Vec<f64>,
    pub eee: Vec<f64>,
    pub z: Vec<f64>,
    pub d: Vec<f64>,
    pub i: Vec<f64>,
    pub l: Vec<f64>,
    pub s: Vec<f64>,
    pub minus_keff_r: Vec<f64>,
    pub residual: Vec<f64>,
}

/// Density and fields at time `t` on the grid translated by `y(t)`.
pub fn shifted_observables(st: &StaticProfiles, traj: &KohnTrajectory, t: f64) -> Result<Snapshot> {
    let k = traj.index_of(t)?;
    let y = traj.y[k];
    let keff = st.fields.keff;
    let rows: Vec<(f64, Option<TdPoint>)> = st
        .grid
        .values()
        .par_iter()
        .map(|&r| (r, td_point(st, traj, k, 1, add(y, [r, 0.0]))))
        .collect();
    let mut snap = Snapshot {
        t: traj.times[k],
        y,
        r: Vec::new(),
        rho: Vec::new(),
        eee: Vec::new(),
        z: Vec::new(),
        d: Vec::new(),
        i: Vec::new(),
        l: Vec::new(),
        s: Vec::new(),
        minus_keff_r: Vec::new(),
        residual: Vec::new(),
    };
    for (r, p) in rows {
        let p = p.ok_or_else(|| Error::Domain(format!("radius {r} outside static grid")))?;
        snap.r.push(r);
        snap.rho.push(p.rho);
        snap.eee.push(p.eee[0]);
        snap.z.push(p.z[0]);
        snap.d.push(p.d[0]);
        snap.i.push(p.i[0]);
        snap.l.push(p.l[0]);
        snap.s.push(-p.eee[0] + p.z[0] + p.d[0]);
        snap.minus_keff_r.push(-keff * r);
        snap.residual.push(p.residual[0]);
    }
    Ok(snap)
}

impl Snapshot {
    /// Same columns as [`FieldProfiles::write_csv`].
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
                self.minus_keff_r[k],
                self.residual[k],
            ];
            w.write_record(row.iter().map(|v| format_sci(*v)))?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SecondLawSample {
    pub t: f64,
    pub step: usize,
    /// Max `|𝓕ext + 𝓕int − 𝓙|` over the mesh.
    pub max_residual: f64,
    /// `∫ρ(𝓕ext − 𝓙) d²r`.
    pub ehrenfest: V2,
    /// Estimated time-discretization error of `𝓙` (step-doubling).
    pub time_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SecondLawReport {
    pub samples: Vec<SecondLawSample>,
    pub max_residual: f64,
    pub max_ehrenfest: f64,
}

/// Mesh of `|s|` values (static grid nodes in `[0.1, 4/√Ω]`) times directions.
fn residual_mesh(st: &StaticProfiles, directions: usize) -> Vec<V2> {
    let hi = 4.0 / st.fields.omega.sqrt();
    let mut pts = Vec::new();
    for (k, &r) in st.grid.values().iter().enumerate() {
        if r < 0.1 || r > hi || !st.fields.trusted[k] {
            continue;
        }
        for j in 0..directions {
            let phi = 2.0 * std::f64::consts::PI * j as f64 / directions as f64;
            pts.push([r * phi.cos(), r * phi.sin()]);
        }
    }
    pts
}

fn ehrenfest_integral(st: &StaticProfiles, traj: &KohnTrajectory, k: usize) -> V2 {
    let kk = kin(traj, k);
    let b = traj.b;
    let w2 = traj.omega0.powi(2);
    let e = traj.drive.field(kk.t);
    let reach = st.grid.r_max();
    let panels = 64;
    let angles = 64;
    let rule = gauss_rule(10);
    let h = reach / panels as f64;
    let mut total = [0.0, 0.0];
    for p in 0..panels {
        for (s, wt) in rule.mapped(h * p as f64, h * (p + 1) as f64) {
            let rho = st.density(s);
            for a in 0..angles {
                let phi = 2.0 * std::f64::consts::PI * (a as f64 + 0.5) / angles as f64;
                let r = add(kk.y, [s * phi.cos(), s * phi.sin()]);
                let w = add(sub(kk.ydot, vector_potential(kk.y, b)), vector_potential(r, b));
                let f_ext = sub(sub(scale(r, -w2), e), cross_z(w, b));
                let jdot = current_rate(st, traj, k, 1, r);
                let integrand = sub(scale(f_ext, rho), jdot);
                let weight = wt * s * 2.0 * std::f64::consts::PI / angles as f64;
                total = add(total, scale(integrand, weight));
            }
        }
    }
    total
}

/// Checks the second law at the requested times and records the per-step
/// residual in `traj`. Fails with a configuration error when the time step
/// dominates the residual.
pub fn second_law_check(
    st: &StaticProfiles,
    traj: &mut KohnTrajectory,
    sample_times: &[f64],
) -> Result<SecondLawReport> {
    let mesh = residual_mesh(st, 16);
    let mut samples = Vec::new();
    for &t in sample_times {
        let k = traj.index_of(t)?;
        let view: &KohnTrajectory = traj;
        let per_point: Vec<(f64, f64)> = mesh
            .par_iter()
            .filter_map(|&s| {
                let r = add(view.y[k], s);
                let p1 = td_point(st, view, k, 1, r)?;
                let p2 = td_point(st, view, k, 2, r)?;
                Some((norm(p1.residual), norm(sub(p2.j, p1.j)) / 3.0))
            })
            .collect();
        let max_residual = per_point.iter().map(|p| p.0).fold(0.0, f64::max);
        let time_error = per_point.iter().map(|p| p.1).fold(0.0, f64::max);
        if time_error > 1e-4 && time_error > 0.5 * max_residual {
            return Err(Error::Config(format!(
                "dt = {} too coarse: current-rate error {time_error:.2e} at t = {t}",
                traj.drive.dt
            )));
        }
        let ehrenfest = ehrenfest_integral(st, view, k);
        traj.second_law_residual[k] = max_residual;
        samples.push(SecondLawSample {
            t: traj.times[k],
            step: k,
            max_residual,
            ehrenfest,
            time_error,
        });
    }
    let max_residual = samples.iter().map(|s| s.max_residual).fold(0.0, f64::max);
    let max_ehrenfest = samples.iter().map(|s| norm(s.ehrenfest)).fold(0.0, f64::max);
    Ok(SecondLawReport {
        samples,
        max_residual,
        max_ehrenfest,
    })
}
