use std::sync::OnceLock;

use gauss_quad::GaussLegendre;
use rayon::prelude::*;

use super::grid::RadialGrid;
use crate::error::{domain, numeric, Result};

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussRule {
    pub fn new(n: usize) -> Result<Self> {
        let rule = GaussLegendre::new(n)
            .map_err(|e| crate::Error::Domain(format!("Gauss–Legendre order {n}: {e}")))?;
        let (nodes, weights) = rule.as_node_weight_pairs().iter().copied().unzip();
        Ok(Self { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (mid + half * x, half * w))
    }

    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

/// Shared rules used across the crate.
pub fn gauss_rule(n: usize) -> &'static GaussRule {
    static RULES: OnceLock<Vec<GaussRule>> = OnceLock::new();
    let rules = RULES.get_or_init(|| {
        (0..=64)
            .map(|k| GaussRule::new(k.max(2)).expect("Gauss–Legendre construction"))
            .collect()
    });
    assert!((2..=64).contains(&n), "Gauss–Legendre order {n} outside 2..=64");
    &rules[n]
}

/// Radial measure applied inside [`integrate_radial`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weight {
    None,
    R,
    R2,
    /// Planar measure `2π r dr`.
    Planar,
}

impl Weight {
    fn apply(self, r: f64) -> f64 {
        match self {
            Weight::None => 1.0,
            Weight::R => r,
            Weight::R2 => r * r,
            Weight::Planar => 2.0 * std::f64::consts::PI * r,
        }
    }
}

/// Integral value with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
}

/// Composite Gauss–Legendre over the intervals of `grid`: 8 nodes per panel,
/// error estimated from the difference with a 5-node rule on the same panels.
pub fn integrate_radial<F>(f: F, grid: &RadialGrid, weight: Weight) -> Result<Quadrature>
where
    F: Fn(f64) -> f64 + Sync,
{
    let hi = gauss_rule(8);
    let lo = gauss_rule(5);
    let r = grid.values();
    let panels: Vec<Result<(f64, f64)>> = r
        .par_windows(2)
        .map(|w| {
            let mut fine = 0.0;
            for (x, wt) in hi.mapped(w[0], w[1]) {
                let v = f(x);
                if !v.is_finite() {
                    return numeric(format!("non-finite integrand {v} at r = {x}"));
                }
                fine += wt * v * weight.apply(x);
            }
            let mut coarse = 0.0;
            for (x, wt) in lo.mapped(w[0], w[1]) {
                let v = f(x);
                if !v.is_finite() {
                    return numeric(format!("non-finite integrand {v} at r = {x}"));
                }
                coarse += wt * v * weight.apply(x);
            }
            Ok((fine, (fine - coarse).abs()))
        })
        .collect();
    let mut value = 0.0;
    let mut error = 0.0;
    for p in panels {
        let (v, e) = p?;
        value += v;
        error += e;
    }
    Ok(Quadrature { value, error })
}

/// Integral of `f` over `[a, b]` split into `panels` equal panels of an
/// `order`-point rule.
pub fn composite<F>(f: F, a: f64, b: f64, panels: usize, order: usize) -> f64
where
    F: Fn(f64) -> f64,
{
    let rule = gauss_rule(order);
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|k| {
            let lo = a + h * k as f64;
            rule.integrate(lo, lo + h, &f)
        })
        .sum()
}

/// Running integral `∫_{x_0}^{x_i} y dx` of sampled data using the local
/// quintic interpolant through the six nearest samples of each interval.
pub fn cumulative_integral(x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    if x.len() != y.len() {
        return domain("sample abscissae and values differ in length");
    }
    let n = x.len();
    if n < STENCIL {
        return domain("cumulative integration needs at least six samples");
    }
    let rule = gauss_rule(3);
    let mut out = Vec::with_capacity(n);
    out.push(0.0);
    let mut acc = 0.0;
    for i in 0..n - 1 {
        let (xs, ys) = local_window(x, y, i);
        acc += rule.integrate(x[i], x[i + 1], |t| lagrange(xs, ys, t));
        out.push(acc);
    }
    Ok(out)
}

/// Integral of sampled data over the whole grid with the given radial measure.
pub fn integrate_sampled(values: &[f64], grid: &RadialGrid, weight: Weight) -> Result<Quadrature> {
    let r = grid.values();
    if values.len() != r.len() {
        return domain("profile length does not match grid");
    }
    if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return numeric(format!("non-finite sample {v} at r = {}", r[i]));
    }
    let y: Vec<f64> = r
        .iter()
        .zip(values)
        .map(|(&ri, v)| v * weight.apply(ri))
        .collect();
    let fine = *cumulative_integral(r, &y)?.last().unwrap();
    let error = if r.len() >= 13 {
        let xs: Vec<f64> = r.iter().step_by(2).copied().collect();
        let ys: Vec<f64> = y.iter().step_by(2).copied().collect();
        if (r.len() - 1).is_multiple_of(2) {
            let coarse = *cumulative_integral(&xs, &ys)?.last().unwrap();
            (fine - coarse).abs() / 15.0
        } else {
            f64::NAN
        }
    } else {
        f64::NAN
    };
    Ok(Quadrature { value: fine, error })
}

const STENCIL: usize = 6;

/// The six samples surrounding interval `i`, shifted inward at the ends.
pub(crate) fn local_window<'a>(x: &'a [f64], y: &'a [f64], i: usize) -> (&'a [f64], &'a [f64]) {
    let start = i.saturating_sub(STENCIL / 2 - 1).min(x.len() - STENCIL);
    (&x[start..start + STENCIL], &y[start..start + STENCIL])
}

pub(crate) fn lagrange(xs: &[f64], ys: &[f64], t: f64) -> f64 {
    let mut sum = 0.0;
    for (i, (&xi, &yi)) in xs.iter().zip(ys).enumerate() {
        let mut l = 1.0;
        for (j, &xj) in xs.iter().enumerate() {
            if i != j {
                l *= (t - xj) / (xi - xj);
            }
        }
        sum += yi * l;
    }
    sum
}
