//! Browser bindings for the circle problems: spectrum, Slepian functions
//! and multiscale solves of synthetic regional data.

use std::f64::consts::TAU;
use std::sync::Arc;

use slepian_core::experiment::{generate_truth, masked_rms, sample_rhs};
use slepian_core::problems::{circle_identity, circle_ill_posed, ProblemInstance};
use slepian_core::regularization::{scaling_coefficients, FilterSpec};
use slepian_core::{Domain1D, GridSpec, RegionQuadrature, SlepianSystem};
use wasm_bindgen::prelude::*;

const REGION_NODES: usize = 1001;

/// A built Slepian system on the circle.
#[wasm_bindgen]
pub struct Demo {
    instance: ProblemInstance,
    system: SlepianSystem,
}

/// Samples of `Φ_J ∗ G` next to the truth, plus the RMS error on the region.
#[wasm_bindgen]
pub struct Solve {
    x: Vec<f64>,
    truth: Vec<f64>,
    approx: Vec<f64>,
    rms: f64,
}

#[wasm_bindgen]
impl Solve {
    pub fn x(&self) -> Vec<f64> {
        self.x.clone()
    }

    pub fn truth(&self) -> Vec<f64> {
        self.truth.clone()
    }

    pub fn approx(&self) -> Vec<f64> {
        self.approx.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn rms(&self) -> f64 {
        self.rms
    }
}

impl Demo {
    pub fn build(problem: &str, bandlimit: usize, lower: f64, upper: f64, threshold: f64) -> Result<Demo, String> {
        let base = match problem {
            "identity" => circle_identity(bandlimit, REGION_NODES),
            "ill_posed" => circle_ill_posed(bandlimit, REGION_NODES),
            other => return Err(format!("unknown problem {other:?}")),
        }
        .map_err(|e| e.to_string())?;
        let region = RegionQuadrature::interval(Domain1D::circle(), lower, upper, REGION_NODES).map_err(|e| e.to_string())?;
        let instance = base.with_region(region);
        let system = instance.build_with_threshold(threshold).map_err(|e| e.to_string())?;
        Ok(Demo { instance, system })
    }

    pub fn g_samples(&self, k: usize, samples: usize) -> Result<Vec<f64>, String> {
        let grid = GridSpec::new(samples, 0.0, TAU).map_err(|e| e.to_string())?;
        grid.points().into_iter().map(|p| self.system.eval_g(k, p).map_err(|e| e.to_string())).collect()
    }

    pub fn run_solve(&self, scale: u32, noise: f64, seed: u64, samples: usize) -> Result<Solve, String> {
        let s = |e: slepian_core::Error| e.to_string();
        let truth = generate_truth(self.system.size(), seed, 1.0);
        let data = sample_rhs(&self.instance, &truth, Arc::clone(&self.instance.region), noise, seed).map_err(s)?;
        let solution = scaling_coefficients(&self.system, &data, &FilterSpec::Shannon, scale).map_err(s)?;
        let grid = GridSpec::new(samples, 0.0, TAU).map_err(s)?;
        let points = grid.points();
        let approx = solution.sample(&points).map_err(s)?;
        let u = self.instance.operator.u_basis();
        let exact = points
            .iter()
            .map(|&p| Ok(u.values(p)?.iter().zip(&truth).map(|(u, c)| u * c).sum()))
            .collect::<slepian_core::Result<Vec<f64>>>()
            .map_err(s)?;
        let inside: Vec<bool> = points.iter().map(|&p| self.instance.region.contains(p)).collect();
        let rms = masked_rms(&exact, &approx, &inside);
        Ok(Solve { x: grid.coordinates(), truth: exact, approx, rms })
    }
}

#[wasm_bindgen]
impl Demo {
    /// `problem` is `identity` or `ill_posed`; the region is `[lower, upper]`.
    #[wasm_bindgen(constructor)]
    pub fn new(problem: &str, bandlimit: usize, lower: f64, upper: f64, threshold: f64) -> Result<Demo, JsError> {
        Demo::build(problem, bandlimit, lower, upper, threshold).map_err(|e| JsError::new(&e))
    }

    pub fn rhos(&self) -> Vec<f64> {
        self.system.rhos().to_vec()
    }

    #[wasm_bindgen(getter)]
    pub fn kept(&self) -> usize {
        self.system.kept()
    }

    #[wasm_bindgen(getter)]
    pub fn condition(&self) -> f64 {
        self.system.condition_number()
    }

    /// `g_k` (0-based) on `samples` equidistant points of `[0, 2π]`.
    pub fn slepian_function(&self, k: usize, samples: usize) -> Result<Vec<f64>, JsError> {
        self.g_samples(k, samples).map_err(|e| JsError::new(&e))
    }

    pub fn solve(&self, scale: u32, noise: f64, seed: u64, samples: usize) -> Result<Solve, JsError> {
        self.run_solve(scale, noise, seed, samples).map_err(|e| JsError::new(&e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn identity_half_circle_matches_core() {
        let d = Demo::build("identity", 20, PI / 2.0, 1.5 * PI, 1e-3).unwrap();
        let r = d.rhos();
        assert_eq!(r.len(), 41);
        assert!((r.iter().sum::<f64>() - 20.5).abs() < 1e-9);
        assert!((r[20] - 0.5).abs() < 1e-6);
    }

    #[test]
    fn slepian_function_has_unit_norm() {
        let d = Demo::build("ill_posed", 10, 1.0, 3.0, 1e-3).unwrap();
        let n = 400;
        let g = d.g_samples(0, n + 1).unwrap();
        let h = TAU / n as f64;
        let norm2: f64 = g[..n].iter().map(|v| v * v * h).sum();
        assert!((norm2 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn noiseless_solve_improves_with_scale() {
        let d = Demo::build("identity", 16, PI / 2.0, 1.5 * PI, 1e-3).unwrap();
        let coarse = d.run_solve(1, 0.0, 3, 201).unwrap();
        let fine = d.run_solve(5, 0.0, 3, 201).unwrap();
        assert!(fine.rms < coarse.rms);
        assert_eq!(fine.approx.len(), 201);
    }

    #[test]
    fn bad_input_is_an_error() {
        assert!(Demo::build("downward", 10, 1.0, 2.0, 1e-3).is_err());
        assert!(Demo::build("identity", 10, 2.0, 1.0, 1e-3).is_err());
        let d = Demo::build("identity", 4, 1.0, 2.0, 1e-3).unwrap();
        assert!(d.g_samples(99, 10).is_err());
    }
}
