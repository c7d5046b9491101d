//! Real fully-normalized spherical harmonics, orthonormal on the unit sphere.
//!
//! Degree/order `(l, m)` with `m < 0` selecting `sin(|m| λ)` and `m >= 0`
//! selecting `cos(m λ)`. Associated Legendre functions follow the geodesy
//! normalization without the Condon-Shortley phase; the extra `1/√(4π)`
//! makes each function unit-norm under the surface measure.

use std::f64::consts::PI;

/// Linear index of `(l, m)` in the degree-major ordering `l² + l + m`.
pub fn harmonic_index(l: usize, m: i64) -> usize {
    ((l * l + l) as i64 + m) as usize
}

/// Inverse of [`harmonic_index`].
pub fn harmonic_label(k: usize) -> (usize, i64) {
    let l = (k as f64).sqrt().floor() as usize;
    // guard against rounding at perfect squares
    let l = if (l + 1) * (l + 1) <= k { l + 1 } else if l * l > k { l - 1 } else { l };
    (l, k as i64 - (l * l + l) as i64)
}

/// Fully normalized associated Legendre values `P̄_lm(cos θ)` for
/// `0 <= m <= l <= max_degree`, stored at `l(l+1)/2 + m`.
pub fn normalized_legendre(max_degree: usize, colatitude: f64) -> Vec<f64> {
    let t = colatitude.cos();
    let u = colatitude.sin();
    let idx = |l: usize, m: usize| l * (l + 1) / 2 + m;
    let mut p = vec![0.0; (max_degree + 1) * (max_degree + 2) / 2];
    p[0] = 1.0;
    for m in 0..=max_degree {
        if m > 0 {
            let mf = m as f64;
            let factor = if m == 1 {
                3f64.sqrt()
            } else {
                ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt()
            };
            p[idx(m, m)] = factor * u * p[idx(m - 1, m - 1)];
        }
        if m < max_degree {
            p[idx(m + 1, m)] = (2.0 * m as f64 + 3.0).sqrt() * t * p[idx(m, m)];
        }
        for l in (m + 2)..=max_degree {
            let (lf, mf) = (l as f64, m as f64);
            let a = ((2.0 * lf - 1.0) * (2.0 * lf + 1.0) / ((lf - mf) * (lf + mf))).sqrt();
            let b = ((2.0 * lf + 1.0) * (lf + mf - 1.0) * (lf - mf - 1.0)
                / ((lf - mf) * (lf + mf) * (2.0 * lf - 3.0)))
                .sqrt();
            p[idx(l, m)] = a * t * p[idx(l - 1, m)] - b * p[idx(l - 2, m)];
        }
    }
    p
}

/// All `(max_degree + 1)²` orthonormal real harmonics at one point, in
/// [`harmonic_index`] order.
pub fn real_harmonics(max_degree: usize, colatitude: f64, longitude: f64) -> Vec<f64> {
    let p = normalized_legendre(max_degree, colatitude);
    let scale = 1.0 / (4.0 * PI).sqrt();
    let mut out = vec![0.0; (max_degree + 1) * (max_degree + 1)];
    for l in 0..=max_degree {
        let base = l * (l + 1) / 2;
        out[harmonic_index(l, 0)] = scale * p[base];
        for m in 1..=l {
            let (s, c) = (m as f64 * longitude).sin_cos();
            let v = scale * p[base + m];
            out[harmonic_index(l, m as i64)] = v * c;
            out[harmonic_index(l, -(m as i64))] = v * s;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn index_round_trip() {
        for l in 0..30usize {
            for m in -(l as i64)..=(l as i64) {
                assert_eq!(harmonic_label(harmonic_index(l, m)), (l, m));
            }
        }
    }

    #[test]
    fn low_degree_closed_forms() {
        let (th, la) = (0.7f64, 1.3f64);
        let y = real_harmonics(2, th, la);
        let s = 1.0 / (4.0 * PI).sqrt();
        assert_abs_diff_eq!(y[0], s, epsilon = 1e-15);
        assert_abs_diff_eq!(y[harmonic_index(1, 0)], s * 3f64.sqrt() * th.cos(), epsilon = 1e-15);
        assert_abs_diff_eq!(
            y[harmonic_index(1, 1)],
            s * 3f64.sqrt() * th.sin() * la.cos(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            y[harmonic_index(2, 0)],
            s * 5f64.sqrt() * 0.5 * (3.0 * th.cos().powi(2) - 1.0),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            y[harmonic_index(2, -2)],
            s * (15f64 / 4.0).sqrt() * th.sin().powi(2) * (2.0 * la).sin(),
            epsilon = 1e-14
        );
    }
}
