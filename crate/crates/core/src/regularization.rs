//! Regularized inversion of `P T F = G` on top of a [`SlepianSystem`].
//!
//! A filter `φ_J(k) ∈ [0, 1]` damps the inverse singular values, giving the
//! scaling-function approximation
//! `(Φ_J ∗ G)(x) = Σ_{k ≤ kept} φ_J(k) τ_k⁻¹ ⟨G, h_k⟩ g_k(x)`.
//! Truncated SVD is the special case of a 0/1 cut, and wavelet details are
//! differences of consecutive scales. Ranks `k` are 1-based throughout this
//! module, matching the filter formulas.

use std::sync::Arc;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::slepian::SlepianSystem;
use crate::spaces::{BasisSystem, GridSpec, Point, RegionQuadrature};

/// Below this `τ_kept / τ_1` an unfiltered downward kernel is flagged.
pub const UNSTABLE_RATIO: f64 = 1e-6;

/// Shannon generator: `1` if `k < 2^J`, else `0`.
pub fn shannon(scale: u32, rank: usize) -> f64 {
    let below = match 1usize.checked_shl(scale) {
        Some(cut) if scale < usize::BITS => rank < cut,
        _ => true,
    };
    if below { 1.0 } else { 0.0 }
}

/// A family of filters `φ_J`, `J >= 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FilterSpec {
    Shannon,
    /// `rows[J][k - 1]`. Scales past the last row reuse it; ranks past the
    /// end of a row get `0`.
    Custom { rows: Vec<Vec<f64>> },
}

impl FilterSpec {
    pub fn custom(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(invalid("custom filter needs at least one scale"));
        }
        for (j, row) in rows.iter().enumerate() {
            if let Some(v) = row.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                return Err(invalid(format!("filter value {v} at scale {j} outside [0, 1]")));
            }
        }
        Ok(FilterSpec::Custom { rows })
    }

    pub fn value(&self, scale: u32, rank: usize) -> f64 {
        match self {
            FilterSpec::Shannon => shannon(scale, rank),
            FilterSpec::Custom { rows } => {
                let row = &rows[(scale as usize).min(rows.len() - 1)];
                rank.checked_sub(1).and_then(|i| row.get(i)).copied().unwrap_or(0.0)
            }
        }
    }

    /// `φ_J(1), …, φ_J(count)`.
    pub fn values(&self, scale: u32, count: usize) -> Vec<f64> {
        (1..=count).map(|k| self.value(scale, k)).collect()
    }
}

/// Samples of `G` at the nodes of a quadrature on the region.
#[derive(Clone, Debug)]
pub struct RegionalData {
    samples: Vec<f64>,
    region: Arc<RegionQuadrature>,
}

impl RegionalData {
    pub fn new(samples: Vec<f64>, region: Arc<RegionQuadrature>) -> Result<Self> {
        if samples.len() != region.len() {
            return Err(Error::DimensionMismatch { expected: region.len(), actual: samples.len() });
        }
        Ok(Self { samples, region })
    }

    pub fn zeros(region: Arc<RegionQuadrature>) -> Self {
        Self { samples: vec![0.0; region.len()], region }
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn region(&self) -> &Arc<RegionQuadrature> {
        &self.region
    }

    pub fn norm(&self) -> f64 {
        self.region.norm(&self.samples)
    }
}

/// `⟨G, h_k⟩` for `k < kept`, using the data's own quadrature.
pub fn data_coefficients(sys: &SlepianSystem, data: &RegionalData) -> Result<Vec<f64>> {
    let region = data.region();
    if let Some(p) = region.nodes().iter().find(|&&p| !sys.region().contains(p)) {
        return Err(Error::OutsideRegion(p.to_string()));
    }
    let h = sys.h_matrix(region.nodes())?;
    let wg = DVector::from_iterator(
        region.len(),
        region.weights().iter().zip(data.samples()).map(|(w, g)| w * g),
    );
    Ok((h.transpose() * wg).iter().copied().collect())
}

/// A solution in coefficient form; grid samples are derived from it.
#[derive(Clone, Debug)]
pub struct Solution {
    slepian: Vec<f64>,
    coefficients: Vec<f64>,
    u_basis: Arc<BasisSystem>,
}

impl Solution {
    fn from_slepian(sys: &SlepianSystem, slepian: Vec<f64>) -> Result<Self> {
        Ok(Self {
            coefficients: sys.synthesize(&slepian)?,
            slepian,
            u_basis: sys.operator().u_basis().clone(),
        })
    }

    /// Coefficients with respect to `g_1, …, g_kept`.
    pub fn slepian_coefficients(&self) -> &[f64] {
        &self.slepian
    }

    /// Coefficients with respect to the `u`-basis.
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn eval(&self, x: Point) -> Result<f64> {
        self.eval_in_part(0, x)
    }

    pub fn eval_in_part(&self, part: usize, x: Point) -> Result<f64> {
        let u = self.u_basis.values_in_part(part, x)?;
        Ok(u.iter().zip(&self.coefficients).map(|(u, c)| u * c).sum())
    }

    pub fn sample(&self, points: &[Point]) -> Result<Vec<f64>> {
        points.iter().map(|&p| self.eval(p)).collect()
    }

    /// `‖F‖_X` by Parseval.
    pub fn norm(&self) -> f64 {
        self.slepian.iter().map(|c| c * c).sum::<f64>().sqrt()
    }
}

/// A solution together with its samples on an evaluation grid.
#[derive(Clone, Debug)]
pub struct SampledSolution {
    pub solution: Solution,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

fn sampled(solution: Solution, grid: &GridSpec) -> Result<SampledSolution> {
    let values = solution.sample(&grid.points())?;
    Ok(SampledSolution { solution, grid: grid.coordinates(), values })
}

/// `F_J = Σ_{k ≤ J, τ_k ≠ 0} τ_k⁻¹ ⟨G, h_k⟩ g_k`.
pub fn tsvd_solve(sys: &SlepianSystem, data: &RegionalData, truncation: usize) -> Result<Solution> {
    if truncation == 0 || truncation > sys.kept() {
        return Err(invalid(format!(
            "truncation {truncation} must lie in 1..={}",
            sys.kept()
        )));
    }
    let c = data_coefficients(sys, data)?;
    let slepian = c
        .iter()
        .zip(sys.taus())
        .enumerate()
        .map(|(k, (c, t))| if k < truncation { c / t } else { 0.0 })
        .collect();
    Solution::from_slepian(sys, slepian)
}

/// Slepian coefficients of `Φ_J ∗ G` given precomputed `⟨G, h_k⟩`.
pub fn filtered_coefficients(sys: &SlepianSystem, inner: &[f64], filter: &FilterSpec, scale: u32) -> Vec<f64> {
    inner
        .iter()
        .zip(sys.taus())
        .enumerate()
        .map(|(k, (c, t))| filter.value(scale, k + 1) * c / t)
        .collect()
}

/// `Φ_J ∗ G` in coefficient form.
pub fn scaling_coefficients(
    sys: &SlepianSystem,
    data: &RegionalData,
    filter: &FilterSpec,
    scale: u32,
) -> Result<Solution> {
    let c = data_coefficients(sys, data)?;
    Solution::from_slepian(sys, filtered_coefficients(sys, &c, filter, scale))
}

/// `Φ_J ∗ G` sampled on `grid`.
pub fn scaling_solve(
    sys: &SlepianSystem,
    data: &RegionalData,
    filter: &FilterSpec,
    scale: u32,
    grid: &GridSpec,
) -> Result<SampledSolution> {
    sampled(scaling_coefficients(sys, data, filter, scale)?, grid)
}

/// `Ψ_J ∗ G = Φ_{J+1} ∗ G − Φ_J ∗ G`, built from the filter difference.
pub fn wavelet_coefficients(
    sys: &SlepianSystem,
    data: &RegionalData,
    filter: &FilterSpec,
    scale: u32,
) -> Result<Solution> {
    let c = data_coefficients(sys, data)?;
    let slepian = c
        .iter()
        .zip(sys.taus())
        .enumerate()
        .map(|(k, (c, t))| (filter.value(scale + 1, k + 1) - filter.value(scale, k + 1)) * c / t)
        .collect();
    Solution::from_slepian(sys, slepian)
}

pub fn wavelet_detail(
    sys: &SlepianSystem,
    data: &RegionalData,
    filter: &FilterSpec,
    scale: u32,
    grid: &GridSpec,
) -> Result<SampledSolution> {
    sampled(wavelet_coefficients(sys, data, filter, scale)?, grid)
}

/// `sup_{k ≤ kept} φ_J(k) τ_k⁻¹`, the norm of `G ↦ Φ_J ∗ G`.
pub fn stability_constant(sys: &SlepianSystem, filter: &FilterSpec, scale: u32) -> f64 {
    sys.taus()[..sys.kept()]
        .iter()
        .enumerate()
        .map(|(k, t)| filter.value(scale, k + 1) / t)
        .fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// `D↑(z, x) = Σ τ_k h_k(z) g_k(x)`, the kernel of `P T`.
    Up,
    /// `D↓(x, z) = Σ τ_k⁻¹ g_k(x) h_k(z)`, the kernel of `(P T)⁺`.
    Down,
}

/// Kernel of the forward or (filtered) inverse operator, truncated at `kept`.
#[derive(Clone, Debug)]
pub struct Kernel<'a> {
    system: &'a SlepianSystem,
    direction: Direction,
    filter: Option<(FilterSpec, u32)>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelValue {
    pub value: f64,
    /// Set for unfiltered `D↓` when `τ_kept / τ_1 < 1e-6`.
    pub unstable: bool,
}

impl<'a> Kernel<'a> {
    pub fn new(system: &'a SlepianSystem, direction: Direction) -> Self {
        Self { system, direction, filter: None }
    }

    pub fn with_filter(mut self, filter: FilterSpec, scale: u32) -> Self {
        self.filter = Some((filter, scale));
        self
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    /// `τ_1 / τ_kept`.
    pub fn condition_number(&self) -> f64 {
        self.system.condition_number()
    }

    pub fn is_unstable(&self) -> bool {
        self.direction == Direction::Down
            && self.filter.is_none()
            && 1.0 / self.condition_number() < UNSTABLE_RATIO
    }

    /// Weight of mode `k` (0-based) in the kernel sum.
    fn weights(&self) -> Vec<f64> {
        let kept = self.system.kept();
        self.system.taus()[..kept]
            .iter()
            .enumerate()
            .map(|(k, t)| {
                let phi = self.filter.as_ref().map_or(1.0, |(f, j)| f.value(*j, k + 1));
                match self.direction {
                    Direction::Up => phi * t,
                    Direction::Down => phi / t,
                }
            })
            .collect()
    }

    /// Kernel value for `x` in the global `u`-domain and `z` in the region.
    pub fn eval(&self, x: Point, z: Point) -> Result<KernelValue> {
        self.eval_in_part(0, x, z)
    }

    pub fn eval_in_part(&self, part: usize, x: Point, z: Point) -> Result<KernelValue> {
        if !self.system.region().contains(z) {
            return Err(Error::OutsideRegion(z.to_string()));
        }
        let g = self.system.g_values(part, x)?;
        let h = self.system.h_values(z)?;
        let value = self
            .weights()
            .iter()
            .zip(&g)
            .zip(&h)
            .map(|((w, g), h)| w * g * h)
            .sum();
        Ok(KernelValue { value, unstable: self.is_unstable() })
    }
}
