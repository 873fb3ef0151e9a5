//! Symmetric tridiagonal eigenproblems: Sturm-sequence bisection for single
//! eigenvalues and inverse iteration for the matching eigenvector.

use crate::error::{domain, numeric, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return domain("off-diagonal must be one shorter than the diagonal");
        }
        Ok(Self { diag, off })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = self.diag[0] - x;
        for i in 0..self.len() {
            if i > 0 {
                let prev = if q == 0.0 { f64::EPSILON * (1.0 + x.abs()) } else { q };
                q = self.diag[i] - x - self.off[i - 1].powi(2) / prev;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    /// The `index`-th smallest eigenvalue (0-based), by bisection.
    pub fn eigenvalue(&self, index: usize) -> Result<f64> {
        if index >= self.len() {
            return domain(format!("eigenvalue index {index} out of range"));
        }
        let (mut lo, mut hi) = self.gershgorin();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Unit eigenvector for an accurate eigenvalue `lambda`.
    pub fn eigenvector(&self, lambda: f64) -> Result<Vec<f64>> {
        let n = self.len();
        let shift = lambda + 1e-12 * (1.0 + lambda.abs());
        let mut x = vec![1.0 / (n as f64).sqrt(); n];
        for _ in 0..4 {
            x = self.solve_shifted(shift, &x)?;
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if !norm.is_finite() || norm == 0.0 {
                return numeric("inverse iteration produced a degenerate vector");
            }
            x.iter_mut().for_each(|v| *v /= norm);
        }
        let residual = self.residual(lambda, &x);
        let scale = self.gershgorin().1.abs().max(1.0);
        if residual > 1e-8 * scale {
            return numeric(format!("inverse iteration did not converge (residual {residual:.3e})"));
        }
        Ok(x)
    }

    /// `‖(T − λ)x‖∞`.
    pub fn residual(&self, lambda: f64, x: &[f64]) -> f64 {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut v = (self.diag[i] - lambda) * x[i];
                if i > 0 {
                    v += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    v += self.off[i] * x[i + 1];
                }
                v.abs()
            })
            .fold(0.0, f64::max)
    }

    /// Solves `(T − s)y = b` by Gaussian elimination with partial pivoting.
    fn solve_shifted(&self, s: f64, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.len();
        let mut d: Vec<f64> = self.diag.iter().map(|v| v - s).collect();
        let mut du = self.off.clone();
        du.push(0.0);
        let mut du2 = vec![0.0; n];
        let dl = &self.off;
        let mut y = b.to_vec();
        let tiny = f64::EPSILON * self.gershgorin().1.abs().max(1.0);
        for i in 0..n - 1 {
            if dl[i].abs() > d[i].abs() {
                // swap rows i and i+1, then eliminate
                let f = d[i] / dl[i];
                let (di1, dui1) = (d[i + 1], du[i + 1]);
                d[i] = dl[i];
                let old_du = du[i];
                du[i] = di1;
                du2[i] = dui1;
                d[i + 1] = old_du - f * di1;
                du[i + 1] = -f * dui1;
                y.swap(i, i + 1);
                y[i + 1] -= f * y[i];
            } else {
                if d[i] == 0.0 {
                    d[i] = tiny;
                }
                let f = dl[i] / d[i];
                d[i + 1] -= f * du[i];
                y[i + 1] -= f * y[i];
            }
        }
        for i in (0..n).rev() {
            let mut v = y[i];
            if i + 1 < n {
                v -= du[i] * y[i + 1];
            }
            if i + 2 < n {
                v -= du2[i] * y[i + 2];
            }
            y[i] = v / if d[i] == 0.0 { tiny } else { d[i] };
        }
        Ok(y)
    }
}

/// Sign changes of `v`, ignoring entries below `1e-8·max|v|`.
pub fn count_nodes(v: &[f64]) -> usize {
    let floor = 1e-8 * v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut last = 0.0;
    let mut nodes = 0;
    for &x in v {
        if x.abs() <= floor {
            continue;
        }
        if last != 0.0 && x.signum() != last {
            nodes += 1;
        }
        last = x.signum();
    }
    nodes
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn laplacian(n: usize) -> SymTridiagonal {
        SymTridiagonal::new(vec![2.0; n], vec![-1.0; n - 1]).unwrap()
    }

    #[test]
    fn discrete_laplacian_spectrum() {
        let n = 50;
        let t = laplacian(n);
        for k in [0, 1, 7, 49] {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * PI / (n + 1) as f64).cos();
            assert!((t.eigenvalue(k).unwrap() - exact).abs() < 1e-13);
        }
    }

    #[test]
    fn eigenvectors_have_expected_nodes() {
        let t = laplacian(200);
        for k in 0..5 {
            let lam = t.eigenvalue(k).unwrap();
            let v = t.eigenvector(lam).unwrap();
            assert_eq!(count_nodes(&v), k);
            assert!(t.residual(lam, &v) < 1e-10);
        }
    }

    #[test]
    fn pivoting_path() {
        // small diagonal forces row swaps during elimination
        let t = SymTridiagonal::new(vec![1e-3, 5.0, -2.0, 0.5, 3.0], vec![4.0, 1.0, 2.5, -1.0]).unwrap();
        for k in 0..5 {
            let lam = t.eigenvalue(k).unwrap();
            let v = t.eigenvector(lam).unwrap();
            assert!(t.residual(lam, &v) < 1e-10, "k={k}");
        }
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(SymTridiagonal::new(vec![1.0, 2.0], vec![]).is_err());
        assert!(laplacian(4).eigenvalue(4).is_err());
    }
}
