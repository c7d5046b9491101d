//! Compact operators represented by their singular-value spectrum.

use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::spaces::{BasisSystem, Layout, Point, RegionQuadrature};

/// `T F = Σ_k σ_k ⟨F, u_k⟩ v_k` over a finite basis pair.
///
/// Coefficient vectors are always expressed in the `u`-basis on input and
/// in the `v`-basis on output.
#[derive(Clone, Debug)]
pub struct DiagonalOperator {
    sigmas: Vec<f64>,
    u_basis: Arc<BasisSystem>,
    v_basis: Arc<BasisSystem>,
}

impl DiagonalOperator {
    pub fn new(sigmas: Vec<f64>, u_basis: Arc<BasisSystem>, v_basis: Arc<BasisSystem>) -> Result<Self> {
        if sigmas.len() != u_basis.size() {
            return Err(Error::DimensionMismatch { expected: u_basis.size(), actual: sigmas.len() });
        }
        if sigmas.len() != v_basis.size() {
            return Err(Error::DimensionMismatch { expected: v_basis.size(), actual: sigmas.len() });
        }
        if let Some(bad) = sigmas.iter().find(|s| !s.is_finite()) {
            return Err(invalid(format!("singular value {bad} is not finite")));
        }
        Ok(Self { sigmas, u_basis, v_basis })
    }

    /// Spectrum given by a function of the basis index.
    pub fn from_fn(
        u_basis: Arc<BasisSystem>,
        v_basis: Arc<BasisSystem>,
        sigma: impl Fn(usize) -> f64,
    ) -> Result<Self> {
        let sigmas = (0..u_basis.size()).map(sigma).collect();
        Self::new(sigmas, u_basis, v_basis)
    }

    pub fn identity(basis: Arc<BasisSystem>) -> Self {
        Self {
            sigmas: vec![1.0; basis.size()],
            u_basis: basis.clone(),
            v_basis: basis,
        }
    }

    /// `σ_k = g(degree(k))` with a shared basis for `u` and `v`.
    pub fn by_degree(basis: Arc<BasisSystem>, g: impl Fn(usize) -> f64) -> Result<Self> {
        let sigmas = (0..basis.size())
            .map(|k| basis.degree(k).map(&g))
            .collect::<Result<Vec<_>>>()?;
        Self::new(sigmas, basis.clone(), basis)
    }

    pub fn size(&self) -> usize {
        self.sigmas.len()
    }

    pub fn sigmas(&self) -> &[f64] {
        &self.sigmas
    }

    pub fn u_basis(&self) -> &Arc<BasisSystem> {
        &self.u_basis
    }

    pub fn v_basis(&self) -> &Arc<BasisSystem> {
        &self.v_basis
    }

    /// `max_k |σ_k|`, the operator norm.
    pub fn norm(&self) -> f64 {
        self.sigmas.iter().fold(0.0, |m, s| m.max(s.abs()))
    }

    pub fn zero_count(&self) -> usize {
        self.sigmas.iter().filter(|&&s| s == 0.0).count()
    }

    /// `v`-coefficients `(σ_k F_k)_k`.
    pub fn apply(&self, f: &[f64]) -> Result<Vec<f64>> {
        self.check_len(f)?;
        Ok(self.sigmas.iter().zip(f).map(|(s, x)| s * x).collect())
    }

    /// `(T F)(y)` at a point of the `v`-domain.
    pub fn forward_at(&self, f: &[f64], point: Point) -> Result<f64> {
        self.check_len(f)?;
        let v = self.v_basis.values(point)?;
        Ok(self
            .sigmas
            .iter()
            .zip(f)
            .zip(&v)
            .map(|((s, x), v)| s * x * v)
            .sum())
    }

    /// `(P T F)(z)` for a point of the region.
    pub fn restrict(&self, f: &[f64], region: &RegionQuadrature, point: Point) -> Result<f64> {
        if !region.contains(point) {
            return Err(Error::OutsideRegion(point.to_string()));
        }
        self.forward_at(f, point)
    }

    /// `P T F` sampled at every node of `region`.
    pub fn restrict_on(&self, f: &[f64], region: &RegionQuadrature) -> Result<Vec<f64>> {
        let tf = self.apply(f)?;
        region
            .nodes()
            .iter()
            .map(|&p| {
                let v = self.v_basis.values(p)?;
                Ok(tf.iter().zip(&v).map(|(a, b)| a * b).sum())
            })
            .collect()
    }

    /// Split a coefficient vector of a coupled operator into its parts.
    pub fn split(&self, f: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        self.check_len(f)?;
        let layout = self
            .u_basis
            .layout()
            .ok_or_else(|| invalid("operator is not coupled"))?;
        let n1 = self.u_basis.part(0)?.size();
        let n2 = self.u_basis.part(1)?.size();
        let (mut a, mut b) = (vec![0.0; n1], vec![0.0; n2]);
        for (x, (part, i)) in f.iter().zip(layout.index_map(n1, n2)) {
            if part == 0 { a[i] = *x } else { b[i] = *x }
        }
        Ok((a, b))
    }

    /// Inverse of [`split`](Self::split).
    pub fn join(&self, first: &[f64], second: &[f64]) -> Result<Vec<f64>> {
        let layout = self
            .u_basis
            .layout()
            .ok_or_else(|| invalid("operator is not coupled"))?;
        let n1 = self.u_basis.part(0)?.size();
        let n2 = self.u_basis.part(1)?.size();
        if first.len() != n1 {
            return Err(Error::DimensionMismatch { expected: n1, actual: first.len() });
        }
        if second.len() != n2 {
            return Err(Error::DimensionMismatch { expected: n2, actual: second.len() });
        }
        Ok(layout
            .index_map(n1, n2)
            .into_iter()
            .map(|(part, i)| if part == 0 { first[i] } else { second[i] })
            .collect())
    }

    fn check_len(&self, f: &[f64]) -> Result<()> {
        if f.len() == self.size() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.size(), actual: f.len() })
        }
    }
}

/// Combine `T₁: X₁ → Y` and `T₂: X₂ → Y` into `S(F₁, F₂) = T₁F₁ + T₂F₂`
/// on the product space.
///
/// The `u`-system of the result is orthonormal in `X₁ × X₂`; its `v`-system
/// is the union of both `v`-systems and in general not orthonormal.
pub fn couple(first: &DiagonalOperator, second: &DiagonalOperator, layout: Layout) -> Result<DiagonalOperator> {
    if !first.v_basis.same_domain(&second.v_basis) {
        return Err(Error::IncompatibleDomains(
            "coupled operators must map into the same space".into(),
        ));
    }
    let map = layout.index_map(first.size(), second.size());
    let sigmas = map
        .iter()
        .map(|&(part, i)| if part == 0 { first.sigmas[i] } else { second.sigmas[i] })
        .collect();
    let u = BasisSystem::union(first.u_basis.clone(), second.u_basis.clone(), layout);
    let v = BasisSystem::union(first.v_basis.clone(), second.v_basis.clone(), layout);
    DiagonalOperator::new(sigmas, Arc::new(u), Arc::new(v))
}
