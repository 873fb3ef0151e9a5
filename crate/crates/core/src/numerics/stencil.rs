use super::grid::RadialGrid;
use crate::error::{domain, Result};

/// Finite-difference weights for derivatives 0..=`max_order` at `z` from
/// samples at `x` (Fornberg's recursion). `w[m][j]` multiplies `f(x[j])` for
/// the `m`-th derivative.
pub fn fornberg_weights(z: f64, x: &[f64], max_order: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut c = vec![vec![0.0; n]; max_order + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    for i in 1..n {
        let mn = i.min(max_order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Derivative of order 1..=3 of a sampled profile.
///
/// Orders 1 and 2 use 5-point stencils, order 3 a 7-point stencil. Stencils
/// are centred in the interior and slide to one side near the ends, so the
/// truncation error is O(h⁴) in the interior for every order.
pub fn differentiate(values: &[f64], grid: &RadialGrid, order: usize) -> Result<Vec<f64>> {
    if !(1..=3).contains(&order) {
        return domain(format!("derivative order {order} not in 1..=3"));
    }
    let r = grid.values();
    if values.len() != r.len() {
        return domain("profile length does not match grid");
    }
    let width = if order <= 2 { 5 } else { 7 };
    if r.len() < 7 {
        return domain(format!("need at least 7 grid points, got {}", r.len()));
    }
    let n = r.len();
    let half = width / 2;
    let uniform_weights = grid.step().map(|_| {
        // Interior weights are shared on a uniform grid.
        let xs: Vec<f64> = (0..width).map(|j| r[j]).collect();
        fornberg_weights(r[half], &xs, order).swap_remove(order)
    });
    let out = (0..n)
        .map(|i| {
            let start = i.saturating_sub(half).min(n - width);
            let xs = &r[start..start + width];
            let ys = &values[start..start + width];
            let w = match (&uniform_weights, start + half == i) {
                (Some(w), true) => w.clone(),
                _ => fornberg_weights(r[i], xs, order).swap_remove(order),
            };
            w.iter().zip(ys).map(|(a, b)| a * b).sum()
        })
        .collect();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn cube_third_derivative() {
        let g = RadialGrid::uniform(0.0, 2.0, 41).unwrap();
        let f: Vec<f64> = g.values().iter().map(|r| r.powi(3)).collect();
        for d in differentiate(&f, &g, 3).unwrap() {
            assert_abs_diff_eq!(d, 6.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn sine_first_derivative() {
        let g = RadialGrid::uniform(0.0, 3.0, 301).unwrap();
        let f: Vec<f64> = g.values().iter().map(|r| r.sin()).collect();
        let d = differentiate(&f, &g, 1).unwrap();
        for (r, di) in g.values().iter().zip(d) {
            assert_abs_diff_eq!(di, r.cos(), epsilon = 1e-7);
        }
    }

    #[test]
    fn nonuniform_grid_second_derivative() {
        let g = RadialGrid::log_uniform(0.1, 3.0, 200).unwrap();
        let f: Vec<f64> = g.values().iter().map(|r| r.exp()).collect();
        let d = differentiate(&f, &g, 2).unwrap();
        let n = d.len();
        for (i, (r, di)) in g.values().iter().zip(d).enumerate() {
            // one-sided stencils at the ends lose an order
            let tol = if i < 2 || i + 2 >= n { 1e-3 } else { 1e-5 };
            assert!((di - r.exp()).abs() < tol * r.exp(), "r = {r}");
        }
    }

    #[test]
    fn too_few_points() {
        let g = RadialGrid::uniform(0.0, 1.0, 6).unwrap();
        assert!(differentiate(&[0.0; 6], &g, 1).is_err());
        let g = RadialGrid::uniform(0.0, 1.0, 8).unwrap();
        assert!(differentiate(&[0.0; 8], &g, 4).is_err());
    }

    #[test]
    fn convergence_order() {
        // error(h) / error(h/2) ≈ 2^4 for the interior first derivative
        let err = |n: usize| {
            let g = RadialGrid::uniform(0.0, 2.0, n).unwrap();
            let f: Vec<f64> = g.values().iter().map(|r| (2.0 * r).sin()).collect();
            let d = differentiate(&f, &g, 1).unwrap();
            let i = (n - 1) / 2;
            (d[i] - 2.0 * (2.0 * g.values()[i]).cos()).abs()
        };
        let p = (err(41) / err(81)).log2();
        assert!((p - 4.0).abs() < 0.3, "observed order {p}");
        let err3 = |n: usize| {
            let g = RadialGrid::uniform(0.0, 2.0, n).unwrap();
            let f: Vec<f64> = g.values().iter().map(|r| (2.0 * r).sin()).collect();
            let d = differentiate(&f, &g, 3).unwrap();
            let i = (n - 1) / 2;
            (d[i] + 8.0 * (2.0 * g.values()[i]).cos()).abs()
        };
        let p3 = (err3(41) / err3(81)).log2();
        assert!((p3 - 4.0).abs() < 0.3, "observed order {p3}");
    }
}
