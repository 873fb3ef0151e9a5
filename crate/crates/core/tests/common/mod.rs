#![allow(dead_code)]

use qdot::model::{exact_excited, exact_ground, DotParams, DotWavefunction, KEFF_EXCITED};
use qdot::numerics::RadialGrid;
use qdot::sources::{compute_sources, SourceQuadrature, SourceSet};

pub struct Case {
    pub params: DotParams,
    pub wf: DotWavefunction,
    pub grid: RadialGrid,
    pub src: SourceSet,
}

pub fn case(excited: bool, b: f64, points: usize) -> Case {
    let keff = if excited { KEFF_EXCITED } else { 1.0 };
    let params = DotParams::with_keff(keff, b).unwrap();
    let wf = if excited { exact_excited(&params) } else { exact_ground(&params) }.unwrap();
    let grid = RadialGrid::uniform(0.0, 8.0 / wf.omega.sqrt(), points).unwrap();
    let src = compute_sources(&wf, &params, &grid, &SourceQuadrature::default()).unwrap();
    Case { params, wf, grid, src }
}

/// `∫f(s) d²s` over a disc of radius `reach` centred at `c`, Gauss–Legendre
/// in the radius and trapezoid in the angle.
pub fn polar_integral(c: [f64; 2], reach: f64, panels: usize, angles: usize, f: impl Fn([f64; 2]) -> f64) -> f64 {
    let rule = gauss_quad::GaussLegendre::new(12).unwrap();
    let h = reach / panels as f64;
    let mut sum = 0.0;
    for p in 0..panels {
        let (a, b) = (h * p as f64, h * (p + 1) as f64);
        for (x, w) in rule.as_node_weight_pairs() {
            let s = 0.5 * (a + b) + 0.5 * (b - a) * x;
            let w = 0.5 * (b - a) * w;
            let mut ring = 0.0;
            for j in 0..angles {
                let phi = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / angles as f64;
                ring += f([c[0] + s * phi.cos(), c[1] + s * phi.sin()]);
            }
            sum += w * s * ring * 2.0 * std::f64::consts::PI / angles as f64;
        }
    }
    sum
}

/// As [`polar_integral`] for several integrands sharing one evaluation.
pub fn polar_integral_n<const N: usize>(
    c: [f64; 2],
    reach: f64,
    panels: usize,
    angles: usize,
    f: impl Fn([f64; 2]) -> [f64; N],
) -> [f64; N] {
    let rule = gauss_quad::GaussLegendre::new(12).unwrap();
    let h = reach / panels as f64;
    let mut sum = [0.0; N];
    for p in 0..panels {
        let (a, b) = (h * p as f64, h * (p + 1) as f64);
        for (x, w) in rule.as_node_weight_pairs() {
            let s = 0.5 * (a + b) + 0.5 * (b - a) * x;
            let w = 0.5 * (b - a) * w * s * 2.0 * std::f64::consts::PI / angles as f64;
            for j in 0..angles {
                let phi = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / angles as f64;
                let v = f([c[0] + s * phi.cos(), c[1] + s * phi.sin()]);
                for (acc, v) in sum.iter_mut().zip(v) {
                    *acc += w * v;
                }
            }
        }
    }
    sum
}
