//! Synthetic-data experiments on the circle: contrived truth, noisy
//! regional data, multiscale solves and RMS errors on the region.

use std::f64::consts::TAU;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::ProblemConfig;
use crate::error::{invalid, Error, Result};
use crate::problems::ProblemInstance;
use crate::regularization::{data_coefficients, filtered_coefficients, FilterSpec, RegionalData};
use crate::rng::{NormalStream, COEFFICIENT_STREAM, DATA_STREAM};
use crate::slepian::DEFAULT_THRESHOLD_RATIO;
use crate::spaces::{Domain1D, GridSpec, Point, RegionQuadrature, RegionSpec};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemConfig,
    /// Multiplier of `ε_k` in `(1 + ε_k) / k`.
    pub noise_coeff_std: f64,
    /// Standard deviation of the additive data noise.
    pub noise_data_amp: f64,
    /// Simpson nodes on `R` for the right-hand side.
    pub rhs_nodes: usize,
    /// Equidistant evaluation points on the whole circle.
    pub eval_nodes: usize,
    pub scales: Vec<u32>,
    pub seed: u64,
    pub threshold_ratio: f64,
    pub filter: FilterSpec,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            problem: ProblemConfig::default(),
            noise_coeff_std: 1.0,
            noise_data_amp: 0.01,
            rhs_nodes: 1001,
            eval_nodes: 401,
            scales: (1..=7).collect(),
            seed: 0,
            threshold_ratio: DEFAULT_THRESHOLD_RATIO,
            filter: FilterSpec::Shannon,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.problem.kind.is_circle() {
            return Err(invalid("experiments run on the circle problems (identity, ill_posed)"));
        }
        if self.scales.is_empty() {
            return Err(invalid("at least one scale is required"));
        }
        if self.scales.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("scales must be strictly ascending"));
        }
        if !(self.noise_coeff_std >= 0.0 && self.noise_data_amp >= 0.0) {
            return Err(invalid("noise levels must be non-negative"));
        }
        GridSpec::new(self.eval_nodes, 0.0, TAU)?;
        Ok(())
    }

    /// First 16 hex digits of the SHA-256 of the JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&json)[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// `F_k = (1 + s ε_k) / k`, `k = 1..=size`, with `ε_k ~ N(0, 1)`.
pub fn generate_truth(size: usize, seed: u64, coeff_std: f64) -> Vec<f64> {
    let mut eps = NormalStream::new(seed, COEFFICIENT_STREAM);
    (1..=size)
        .map(|k| {
            let e = eps.normal();
            (1.0 + coeff_std * e) / k as f64
        })
        .collect()
}

/// Exact `P T F` at the nodes of `region` plus i.i.d. `N(0, noise_amp²)` noise.
pub fn sample_rhs(
    instance: &ProblemInstance,
    truth: &[f64],
    region: Arc<RegionQuadrature>,
    noise_amp: f64,
    seed: u64,
) -> Result<RegionalData> {
    if let Some(p) = region.nodes().iter().find(|&&p| !instance.region.contains(p)) {
        return Err(Error::OutsideRegion(p.to_string()));
    }
    let mut samples = instance.operator.restrict_on(truth, &region)?;
    if noise_amp > 0.0 {
        let mut eps = NormalStream::new(seed, DATA_STREAM);
        samples.iter_mut().for_each(|g| *g += noise_amp * eps.normal());
    }
    RegionalData::new(samples, region)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleResult {
    pub scale: u32,
    pub rms: f64,
    /// `Φ_J ∗ G` on the evaluation grid.
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub config_hash: String,
    pub kept: usize,
    pub condition_number: f64,
    pub rhos: Vec<f64>,
    pub taus: Vec<f64>,
    pub grid: Vec<f64>,
    pub inside: Vec<bool>,
    pub truth: Vec<f64>,
    pub scales: Vec<ScaleResult>,
}

impl ExperimentReport {
    pub fn rms(&self, scale: u32) -> Option<f64> {
        self.scales.iter().find(|s| s.scale == scale).map(|s| s.rms)
    }
}

/// `sqrt(mean (a - b)²)` over the entries where `mask` is set.
pub fn masked_rms(a: &[f64], b: &[f64], mask: &[bool]) -> f64 {
    let (sum, count) = a
        .iter()
        .zip(b)
        .zip(mask)
        .filter(|(_, m)| **m)
        .fold((0.0, 0usize), |(s, c), ((a, b), _)| (s + (a - b).powi(2), c + 1));
    if count == 0 { 0.0 } else { (sum / count as f64).sqrt() }
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let instance = config.problem.instance()?;
    let sys = instance.build_with_threshold(config.threshold_ratio)?;

    let truth = generate_truth(instance.operator.size(), config.seed, config.noise_coeff_std);
    let RegionSpec::Interval { lower, upper, .. } = *instance.region.spec() else {
        return Err(invalid("circle problem without an interval region"));
    };
    let rhs_region = Arc::new(RegionQuadrature::interval(Domain1D::circle(), lower, upper, config.rhs_nodes)?);
    let data = sample_rhs(&instance, &truth, rhs_region, config.noise_data_amp, config.seed)?;

    let grid = GridSpec::new(config.eval_nodes, 0.0, TAU)?;
    let points = grid.points();
    let inside: Vec<bool> = points.iter().map(|&p| instance.region.contains(p)).collect();
    let u_basis = instance.operator.u_basis();
    let samples = |coeffs: &[f64]| -> Result<Vec<f64>> {
        points
            .iter()
            .map(|&p: &Point| Ok(u_basis.values(p)?.iter().zip(coeffs).map(|(u, c)| u * c).sum()))
            .collect()
    };
    let truth_values = samples(&truth)?;

    let inner = data_coefficients(&sys, &data)?;
    let scales = config
        .scales
        .iter()
        .map(|&scale| {
            let slepian = filtered_coefficients(&sys, &inner, &config.filter, scale);
            let values = samples(&sys.synthesize(&slepian)?)?;
            let rms = masked_rms(&truth_values, &values, &inside);
            Ok(ScaleResult { scale, rms, values })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(ExperimentReport {
        config: config.clone(),
        config_hash: config.hash(),
        kept: sys.kept(),
        condition_number: sys.condition_number(),
        rhos: sys.rhos().to_vec(),
        taus: sys.taus().to_vec(),
        grid: grid.coordinates(),
        inside,
        truth: truth_values,
        scales,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ProblemKind;
    use crate::problems::{circle_identity, circle_ill_posed};

    fn small(kind: ProblemKind) -> ExperimentConfig {
        ExperimentConfig {
            problem: ProblemConfig { kind, bandlimit: 12, region_nodes: 401, ..Default::default() },
            rhs_nodes: 401,
            eval_nodes: 201,
            scales: vec![1, 2, 3, 4, 5, 6],
            ..Default::default()
        }
    }

    #[test]
    fn truth_without_noise_is_harmonic() {
        let f = generate_truth(9, 3, 0.0);
        for (k, v) in f.iter().enumerate() {
            assert_eq!(*v, 1.0 / (k + 1) as f64);
        }
        assert_eq!(generate_truth(20, 5, 1.0), generate_truth(20, 5, 1.0));
        assert_ne!(generate_truth(20, 5, 1.0), generate_truth(20, 6, 1.0));
    }

    #[test]
    fn truth_mean_matches_harmonic_sequence() {
        // Monte-Carlo over seeds: mean of F_k within 4 standard errors of 1/k
        let seeds = 20_000u64;
        let size = 5;
        let mut sum = vec![0.0; size];
        for s in 0..seeds {
            for (acc, v) in sum.iter_mut().zip(generate_truth(size, s, 1.0)) {
                *acc += v;
            }
        }
        for (k, acc) in sum.iter().enumerate() {
            let kf = (k + 1) as f64;
            let mean = acc / seeds as f64;
            let se = 1.0 / kf / (seeds as f64).sqrt();
            assert!((mean - 1.0 / kf).abs() < 4.0 * se, "k={} mean={mean}", k + 1);
        }
    }

    #[test]
    fn rhs_noise_variance() {
        let inst = circle_identity(10, 1001).unwrap();
        let f = generate_truth(21, 1, 1.0);
        let exact = sample_rhs(&inst, &f, inst.region.clone(), 0.0, 1).unwrap();
        let direct = inst.operator.restrict_on(&f, &inst.region).unwrap();
        assert_eq!(exact.samples(), direct.as_slice());
        let noisy = sample_rhs(&inst, &f, inst.region.clone(), 0.01, 1).unwrap();
        let d: Vec<f64> = noisy.samples().iter().zip(exact.samples()).map(|(a, b)| a - b).collect();
        let mean = d.iter().sum::<f64>() / d.len() as f64;
        let var = d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (d.len() - 1) as f64;
        assert!((var / 1e-4 - 1.0).abs() < 0.2, "variance {var}");
    }

    #[test]
    fn ill_posed_data_is_smaller_than_truth() {
        let inst = circle_ill_posed(50, 1001).unwrap();
        let f = generate_truth(101, 0, 1.0);
        let g = sample_rhs(&inst, &f, inst.region.clone(), 0.0, 0).unwrap();
        let max_g = g.samples().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let max_f = inst
            .region
            .nodes()
            .iter()
            .map(|&p| inst.operator.u_basis().values(p).unwrap().iter().zip(&f).map(|(u, c)| u * c).sum::<f64>())
            .fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(max_g < max_f);
    }

    #[test]
    fn rhs_outside_region_rejected() {
        let inst = circle_identity(4, 101).unwrap();
        let wide = Arc::new(RegionQuadrature::interval(Domain1D::circle(), 0.0, 6.0, 11).unwrap());
        assert!(sample_rhs(&inst, &[0.0; 9], wide, 0.0, 0).is_err());
    }

    #[test]
    fn noiseless_identity_errors_decrease_then_stagnate() {
        let mut cfg = small(ProblemKind::Identity);
        cfg.noise_coeff_std = 0.0;
        cfg.noise_data_amp = 0.0;
        let report = run_experiment(&cfg).unwrap();
        let rms: Vec<f64> = report.scales.iter().map(|s| s.rms).collect();
        assert!(rms.windows(2).all(|w| w[1] <= w[0]), "{rms:?}");
        assert!(report.kept < 32);
        assert_eq!(report.scales[4].rms, report.scales[5].rms);
    }

    #[test]
    fn validation() {
        let mut cfg = small(ProblemKind::Identity);
        cfg.scales = vec![3, 2];
        assert!(run_experiment(&cfg).is_err());
        cfg.scales = vec![];
        assert!(run_experiment(&cfg).is_err());
        let sphere = small(ProblemKind::Downward);
        assert!(run_experiment(&sphere).is_err());
    }

    #[test]
    fn reports_are_deterministic() {
        let cfg = small(ProblemKind::IllPosed);
        assert_eq!(run_experiment(&cfg).unwrap(), run_experiment(&cfg).unwrap());
        assert_eq!(cfg.hash().len(), 16);
    }
}
