//! Slepian construction: Gram matrix of the restricted `v`-system, the
//! weighted matrix `Σ* Kᵀ Σ`, its eigenvectors, and the resulting singular
//! system `(τ_k, g_k, h_k)` of the projected operator `P T`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::eigen::sym_eig;
use crate::error::{invalid, Error, Result};
use crate::operator::DiagonalOperator;
use crate::spaces::{BasisSystem, Point, RegionQuadrature};

/// Eigenvalues below zero but above this are rounding noise and clamped.
pub const PSD_CLAMP: f64 = -1e-10;

/// Default cut `τ_k >= 0.001 τ_1`.
pub const DEFAULT_THRESHOLD_RATIO: f64 = 1e-3;

/// `K_mn = ⟨P v_m, P v_n⟩` evaluated with the region quadrature.
#[derive(Clone, Debug)]
pub struct GramMatrix(DMatrix<f64>);

impl GramMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    /// Trace of `K`, the Shannon number of the region.
    pub fn trace(&self) -> f64 {
        self.0.trace()
    }
}

/// Values of every basis function at every region node, one row per node.
pub fn sample_basis(basis: &BasisSystem, nodes: &[Point]) -> Result<DMatrix<f64>> {
    let mut out = DMatrix::zeros(nodes.len(), basis.size());
    for (q, &p) in nodes.iter().enumerate() {
        for (k, v) in basis.values(p)?.into_iter().enumerate() {
            out[(q, k)] = v;
        }
    }
    Ok(out)
}

pub fn build_gram(v_basis: &BasisSystem, region: &RegionQuadrature) -> Result<GramMatrix> {
    let b = sample_basis(v_basis, region.nodes())?;
    let w = DVector::from_column_slice(region.weights());
    let mut wb = b.clone();
    for (mut row, wq) in wb.row_iter_mut().zip(w.iter()) {
        row *= *wq;
    }
    let k = b.transpose() * wb;
    let sym = (&k + k.transpose()) * 0.5;
    Ok(GramMatrix(sym))
}

/// `M_mn = σ_m K_nm σ_n`.
pub fn build_slepian_matrix(sigmas: &[f64], gram: &GramMatrix) -> Result<DMatrix<f64>> {
    let n = gram.dim();
    if sigmas.len() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: sigmas.len() });
    }
    let k = gram.matrix();
    Ok(DMatrix::from_fn(n, n, |m, j| sigmas[m] * k[(j, m)] * sigmas[j]))
}

/// Singular system of `P T`, ordered by decreasing concentration.
#[derive(Clone, Debug)]
pub struct SlepianSystem {
    rhos: Vec<f64>,
    taus: Vec<f64>,
    coeffs: DMatrix<f64>,
    kept: usize,
    threshold_ratio: f64,
    min_raw_eigenvalue: f64,
    matrix_trace: f64,
    operator: Arc<DiagonalOperator>,
    region: Arc<RegionQuadrature>,
}

impl SlepianSystem {
    /// Build the system for `operator` restricted to `region`.
    ///
    /// Keeps the leading modes with `τ_k >= threshold_ratio · τ_1` and
    /// `ϱ_k > 0`.
    pub fn build(
        operator: Arc<DiagonalOperator>,
        region: Arc<RegionQuadrature>,
        threshold_ratio: f64,
    ) -> Result<Self> {
        if !(0.0..1.0).contains(&threshold_ratio) {
            return Err(invalid(format!("threshold ratio must lie in [0, 1), got {threshold_ratio}")));
        }
        let gram = build_gram(operator.v_basis(), &region)?;
        let m = build_slepian_matrix(operator.sigmas(), &gram)?;
        let matrix_trace = m.trace();
        let eig = sym_eig(&m)?;
        let n = eig.values.len();
        let min_raw_eigenvalue = eig.values.iter().copied().fold(f64::INFINITY, f64::min);
        if min_raw_eigenvalue < PSD_CLAMP {
            return Err(Error::NotPositiveSemidefinite(min_raw_eigenvalue));
        }
        let rhos: Vec<f64> = eig.values.iter().map(|r| r.max(0.0)).collect();
        let taus: Vec<f64> = rhos.iter().map(|r| r.sqrt()).collect();
        if n == 0 || rhos[0] == 0.0 {
            return Err(Error::EmptySystem);
        }
        let cut = threshold_ratio * taus[0];
        let kept = taus
            .iter()
            .zip(&rhos)
            .take_while(|(t, r)| **t >= cut && **r > 0.0)
            .count();
        Ok(Self {
            rhos,
            taus,
            coeffs: eig.vectors,
            kept,
            threshold_ratio,
            min_raw_eigenvalue,
            matrix_trace,
            operator,
            region,
        })
    }

    pub fn size(&self) -> usize {
        self.rhos.len()
    }

    /// Eigenvalues `ϱ_k`, descending, clamped at zero.
    pub fn rhos(&self) -> &[f64] {
        &self.rhos
    }

    /// Singular values `τ_k = ϱ_k^{1/2}`.
    pub fn taus(&self) -> &[f64] {
        &self.taus
    }

    /// Column `k` holds the `u`-basis coefficients of `g_k`.
    pub fn coefficients(&self) -> &DMatrix<f64> {
        &self.coeffs
    }

    /// Number of modes retained by the threshold.
    pub fn kept(&self) -> usize {
        self.kept
    }

    pub fn threshold_ratio(&self) -> f64 {
        self.threshold_ratio
    }

    /// Smallest eigenvalue before clamping.
    pub fn min_raw_eigenvalue(&self) -> f64 {
        self.min_raw_eigenvalue
    }

    /// Trace of `Σ* Kᵀ Σ`.
    pub fn matrix_trace(&self) -> f64 {
        self.matrix_trace
    }

    /// `τ_1 / τ_kept`.
    pub fn condition_number(&self) -> f64 {
        self.taus[0] / self.taus[self.kept - 1]
    }

    pub fn operator(&self) -> &Arc<DiagonalOperator> {
        &self.operator
    }

    pub fn region(&self) -> &Arc<RegionQuadrature> {
        &self.region
    }

    /// `⟨F, g_k⟩` for every `k`, by Parseval on the coefficient vectors.
    pub fn analyze(&self, f: &[f64]) -> Result<Vec<f64>> {
        if f.len() != self.size() {
            return Err(Error::DimensionMismatch { expected: self.size(), actual: f.len() });
        }
        let f = DVector::from_column_slice(f);
        Ok((self.coeffs.transpose() * f).iter().copied().collect())
    }

    /// `u`-basis coefficients of `Σ_k c_k g_k` for `c` of any length `<= N`.
    pub fn synthesize(&self, slepian_coeffs: &[f64]) -> Result<Vec<f64>> {
        if slepian_coeffs.len() > self.size() {
            return Err(Error::DimensionMismatch { expected: self.size(), actual: slepian_coeffs.len() });
        }
        let mut out = vec![0.0; self.size()];
        for (k, c) in slepian_coeffs.iter().enumerate() {
            if *c == 0.0 {
                continue;
            }
            for (o, f) in out.iter_mut().zip(self.coeffs.column(k).iter()) {
                *o += c * f;
            }
        }
        Ok(out)
    }

    /// `g_k(x) = Σ_n f_n^(k) u_n(x)`.
    pub fn eval_g(&self, k: usize, x: Point) -> Result<f64> {
        self.eval_g_in_part(k, 0, x)
    }

    /// Component `part` of `g_k` at `x` (coupled systems live on a product space).
    pub fn eval_g_in_part(&self, k: usize, part: usize, x: Point) -> Result<f64> {
        self.check_mode(k, self.size())?;
        let u = self.operator.u_basis().values_in_part(part, x)?;
        Ok(self.coeffs.column(k).iter().zip(&u).map(|(f, u)| f * u).sum())
    }

    /// `g_0(x), …, g_{N-1}(x)` at once.
    pub fn g_values(&self, part: usize, x: Point) -> Result<Vec<f64>> {
        let u = DVector::from_vec(self.operator.u_basis().values_in_part(part, x)?);
        Ok((self.coeffs.transpose() * u).iter().copied().collect())
    }

    /// `h_k(z) = ϱ_k^{-1/2} Σ_n σ_n f_n^(k) v_n(z)` for `z` in the region.
    pub fn eval_h(&self, k: usize, z: Point) -> Result<f64> {
        if !self.region.contains(z) {
            return Err(Error::OutsideRegion(z.to_string()));
        }
        self.h_unchecked(k, z)
    }

    /// `ι(h_k)`: `h_k` extended by zero to the whole `v`-domain.
    pub fn eval_h_extended(&self, k: usize, y: Point) -> Result<f64> {
        if self.region.contains(y) { self.h_unchecked(k, y) } else {
            self.check_h_mode(k)?;
            Ok(0.0)
        }
    }

    /// `h_0(z), …, h_{kept-1}(z)` at once; `z` is not checked for membership.
    pub fn h_values(&self, z: Point) -> Result<Vec<f64>> {
        let v = self.operator.v_basis().values(z)?;
        let sv: Vec<f64> = v.iter().zip(self.operator.sigmas()).map(|(v, s)| v * s).collect();
        let sv = DVector::from_vec(sv);
        let proj = self.coeffs.columns(0, self.kept).transpose() * sv;
        Ok(proj.iter().zip(&self.taus).map(|(p, t)| p / t).collect())
    }

    /// `h_k` at every node of `nodes`, one row per node and one column per kept mode.
    pub fn h_matrix(&self, nodes: &[Point]) -> Result<DMatrix<f64>> {
        let v = sample_basis(self.operator.v_basis(), nodes)?;
        let mut sf = self.coeffs.columns(0, self.kept).into_owned();
        for (n, s) in self.operator.sigmas().iter().enumerate() {
            sf.row_mut(n).scale_mut(*s);
        }
        for (k, t) in self.taus[..self.kept].iter().enumerate() {
            sf.column_mut(k).unscale_mut(*t);
        }
        Ok(v * sf)
    }

    fn h_unchecked(&self, k: usize, z: Point) -> Result<f64> {
        self.check_h_mode(k)?;
        let v = self.operator.v_basis().values(z)?;
        let s: f64 = self
            .coeffs
            .column(k)
            .iter()
            .zip(self.operator.sigmas())
            .zip(&v)
            .map(|((f, s), v)| f * s * v)
            .sum();
        Ok(s / self.taus[k])
    }

    fn check_h_mode(&self, k: usize) -> Result<()> {
        if k >= self.kept {
            if k < self.size() {
                return Err(Error::ZeroSingularValue { mode: k, kept: self.kept });
            }
            return Err(Error::IndexOutOfRange { index: k, size: self.size() });
        }
        Ok(())
    }

    fn check_mode(&self, k: usize, size: usize) -> Result<()> {
        if k < size { Ok(()) } else { Err(Error::IndexOutOfRange { index: k, size }) }
    }
}
