//! Reproducible standard-normal draws.
//!
//! ChaCha20 in counter mode supplies the uniforms; Box-Muller turns each
//! pair into two normals. Independent quantities draw from separate
//! streams of the same seed, so adding draws to one never shifts another.

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

/// Stream for the perturbations of the true coefficients.
pub const COEFFICIENT_STREAM: u64 = 1;
/// Stream for the additive data noise.
pub const DATA_STREAM: u64 = 2;

#[derive(Clone, Debug)]
pub struct NormalStream {
    rng: ChaCha20Rng,
    spare: Option<f64>,
}

impl NormalStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rng, spare: None }
    }

    /// Uniform on `(0, 1]` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
        self.spare = Some(r * s);
        r * c
    }

    pub fn normals(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.normal()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_draws() {
        let a = NormalStream::new(42, DATA_STREAM).normals(100);
        let b = NormalStream::new(42, DATA_STREAM).normals(100);
        assert_eq!(a, b);
        let c = NormalStream::new(42, COEFFICIENT_STREAM).normals(100);
        assert_ne!(a, c);
        let d = NormalStream::new(43, DATA_STREAM).normals(100);
        assert_ne!(a, d);
    }

    #[test]
    fn moments_are_standard() {
        let x = NormalStream::new(7, 0).normals(200_000);
        let n = x.len() as f64;
        let mean = x.iter().sum::<f64>() / n;
        let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        // 5 standard errors
        assert!(mean.abs() < 5.0 / n.sqrt());
        assert!((var - 1.0).abs() < 5.0 * (2.0 / n).sqrt());
        let tail = x.iter().filter(|v| v.abs() > 1.959964).count() as f64 / n;
        assert!((tail - 0.05).abs() < 0.003);
    }

    #[test]
    fn uniform_stays_in_half_open_unit_interval() {
        let mut s = NormalStream::new(1, 1);
        for _ in 0..10_000 {
            let u = s.uniform();
            assert!(u > 0.0 && u <= 1.0);
        }
    }
}
