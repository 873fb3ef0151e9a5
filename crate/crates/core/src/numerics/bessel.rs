//! Exponentially scaled modified Bessel functions `e^{-x} I_n(x)` for small
//! integer orders, and the angular moments built from them.

const SERIES_LIMIT: f64 = 25.0;

/// `e^{-x} I_n(x)` for `x ≥ 0`.
pub fn bessel_i_scaled(n: u32, x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x <= SERIES_LIMIT {
        series(n, x)
    } else {
        asymptotic(n, x)
    }
}

fn series(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0;
    for k in 1..=n {
        term *= half / k as f64;
    }
    let q = half * half;
    let mut sum = term;
    let mut k = 1.0;
    loop {
        term *= q / (k * (k + n as f64));
        sum += term;
        if term <= 1e-17 * sum {
            break;
        }
        k += 1.0;
    }
    sum * (-x).exp()
}

fn asymptotic(n: u32, x: f64) -> f64 {
    let mu = 4.0 * (n * n) as f64;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        let next = -term * (mu - odd * odd) / (8.0 * k as f64 * x);
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum / (2.0 * std::f64::consts::PI * x).sqrt()
}

/// Angular moments `(1/2π) ∫₀^{2π} cosᵏφ · e^{x(cos φ − 1)} dφ` for `k = 0..=3`.
pub fn angular_moments(x: f64) -> [f64; 4] {
    let i0 = bessel_i_scaled(0, x);
    let i1 = bessel_i_scaled(1, x);
    let i2 = bessel_i_scaled(2, x);
    let i3 = bessel_i_scaled(3, x);
    [i0, i1, 0.5 * (i0 + i2), 0.25 * (3.0 * i1 + i3)]
}
