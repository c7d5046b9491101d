//! Composite Simpson, Gauss-Legendre and periodic trapezoid rules.

use crate::error::{invalid, Result};

/// Composite Simpson nodes and weights on `[a, b]` with `n` equidistant points.
///
/// `n` must be odd and at least 3.
pub fn composite_simpson(a: f64, b: f64, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(invalid(format!(
            "composite Simpson needs an odd node count >= 3, got {n}"
        )));
    }
    if !(a < b) {
        return Err(invalid(format!("empty interval [{a}, {b}]")));
    }
    let h = (b - a) / (n - 1) as f64;
    let nodes = (0..n)
        .map(|i| if i == n - 1 { b } else { a + i as f64 * h })
        .collect();
    let weights = (0..n)
        .map(|i| {
            let c = if i == 0 || i == n - 1 {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            c * h / 3.0
        })
        .collect();
    Ok((nodes, weights))
}

/// Gauss-Legendre nodes (ascending) and weights on `[a, b]`.
///
/// Roots of `P_n` are found by Newton iteration from the Chebyshev-like
/// initial guess; accurate to machine precision for the sizes used here.
pub fn gauss_legendre(a: f64, b: f64, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Err(invalid("Gauss-Legendre needs at least one node"));
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = (b - a) / 2.0;
    let mid = (a + b) / 2.0;
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // x is the i-th largest root
        nodes[n - 1 - i] = mid + half * x;
        nodes[i] = mid - half * x;
        weights[n - 1 - i] = half * w;
        weights[i] = half * w;
    }
    Ok((nodes, weights))
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Equal-weight rule on a full period `[0, 2π)`; exact for trigonometric
/// polynomials of degree below `n`.
pub fn periodic_trapezoid(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Err(invalid("periodic trapezoid needs at least one node"));
    }
    let h = std::f64::consts::TAU / n as f64;
    Ok(((0..n).map(|j| j as f64 * h).collect(), vec![h; n]))
}
