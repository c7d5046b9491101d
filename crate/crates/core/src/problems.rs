//! Ready-made problem instances: the two circle experiments and the
//! spherical downward-continuation and coupled-field settings.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{invalid, Result};
use crate::operator::{couple, DiagonalOperator};
use crate::slepian::{SlepianSystem, DEFAULT_THRESHOLD_RATIO};
use crate::spaces::{BasisSystem, Domain1D, Layout, RegionQuadrature, SphereDomain};

pub const DEFAULT_INTERVAL_NODES: usize = 1001;
pub const DEFAULT_CAP_THETA_NODES: usize = 64;
pub const DEFAULT_CAP_PHI_NODES: usize = 128;

#[derive(Clone, Debug)]
pub struct ProblemInstance {
    pub name: String,
    pub operator: Arc<DiagonalOperator>,
    pub region: Arc<RegionQuadrature>,
    pub default_threshold: f64,
    pub notes: String,
}

impl ProblemInstance {
    pub fn build(&self) -> Result<SlepianSystem> {
        self.build_with_threshold(self.default_threshold)
    }

    pub fn build_with_threshold(&self, threshold_ratio: f64) -> Result<SlepianSystem> {
        SlepianSystem::build(self.operator.clone(), self.region.clone(), threshold_ratio)
    }

    /// Same operator on a different region.
    pub fn with_region(&self, region: RegionQuadrature) -> Self {
        Self { region: Arc::new(region), ..self.clone() }
    }
}

fn half_circle(region_nodes: usize) -> Result<RegionQuadrature> {
    RegionQuadrature::interval(Domain1D::circle(), PI / 2.0, 1.5 * PI, region_nodes)
}

/// Approximation problem: `T = Id` on the Fourier system, `R = [π/2, 3π/2]`.
pub fn circle_identity(bandlimit: usize, region_nodes: usize) -> Result<ProblemInstance> {
    let basis = Arc::new(BasisSystem::fourier(bandlimit)?);
    Ok(ProblemInstance {
        name: "identity".into(),
        operator: Arc::new(DiagonalOperator::identity(basis)),
        region: Arc::new(half_circle(region_nodes)?),
        default_threshold: DEFAULT_THRESHOLD_RATIO,
        notes: format!("T = Id on the circle, bandlimit {bandlimit}, R = [pi/2, 3pi/2]"),
    })
}

/// Ill-posed problem: `σ_{n,j} = 1/(n+1)` on the Fourier system, `R = [π/2, 3π/2]`.
pub fn circle_ill_posed(bandlimit: usize, region_nodes: usize) -> Result<ProblemInstance> {
    let basis = Arc::new(BasisSystem::fourier(bandlimit)?);
    let op = DiagonalOperator::by_degree(basis, |n| 1.0 / (n as f64 + 1.0))?;
    Ok(ProblemInstance {
        name: "ill_posed".into(),
        operator: Arc::new(op),
        region: Arc::new(half_circle(region_nodes)?),
        default_threshold: DEFAULT_THRESHOLD_RATIO,
        notes: format!("sigma_n = 1/(n+1) on the circle, bandlimit {bandlimit}, R = [pi/2, 3pi/2]"),
    })
}

/// Upward continuation from the sphere of radius `r_p` to `r_s`,
/// `σ_{l,m} = (r_p / r_s)^l`, with data on a polar cap of the outer sphere.
pub fn sphere_downward_continuation(
    max_degree: usize,
    r_p: f64,
    r_s: f64,
    cap_angle: f64,
) -> Result<ProblemInstance> {
    sphere_downward_continuation_with(max_degree, r_p, r_s, cap_angle, DEFAULT_CAP_THETA_NODES, DEFAULT_CAP_PHI_NODES)
}

pub fn sphere_downward_continuation_with(
    max_degree: usize,
    r_p: f64,
    r_s: f64,
    cap_angle: f64,
    n_theta: usize,
    n_phi: usize,
) -> Result<ProblemInstance> {
    if !(r_p > 0.0 && r_p < r_s) {
        return Err(invalid(format!("downward continuation needs 0 < r_p < r_s, got r_p={r_p}, r_s={r_s}")));
    }
    let op = internal_operator(max_degree, r_p, r_s)?;
    Ok(ProblemInstance {
        name: "downward".into(),
        operator: Arc::new(op),
        region: Arc::new(RegionQuadrature::polar_cap(r_s, cap_angle, n_theta, n_phi)?),
        default_threshold: DEFAULT_THRESHOLD_RATIO,
        notes: format!("(r_p/r_s)^l, L = {max_degree}, r_p = {r_p}, r_s = {r_s}, cap angle {cap_angle}"),
    })
}

fn internal_operator(max_degree: usize, r_p: f64, r_s: f64) -> Result<DiagonalOperator> {
    let u = Arc::new(BasisSystem::spherical(max_degree, SphereDomain::new(r_p)?));
    let v = Arc::new(BasisSystem::spherical(max_degree, SphereDomain::new(r_s)?));
    let ratio = r_p / r_s;
    DiagonalOperator::from_fn(u.clone(), v, |k| ratio.powi(u.degree(k).unwrap_or(0) as i32))
}

fn external_operator(max_degree: usize, r_s: f64, r_e: f64) -> Result<DiagonalOperator> {
    let u = Arc::new(BasisSystem::spherical(max_degree, SphereDomain::new(r_e)?));
    let v = Arc::new(BasisSystem::spherical(max_degree, SphereDomain::new(r_s)?));
    let ratio = r_s / r_e;
    DiagonalOperator::from_fn(u.clone(), v, |k| ratio.powi(u.degree(k).unwrap_or(0) as i32 + 1))
}

/// Internal field `(r_p/r_s)^l` plus external field `(r_s/r_e)^{l+1}`,
/// both observed on a cap of the satellite sphere.
pub fn coupled_fields(
    max_degree: usize,
    r_p: f64,
    r_s: f64,
    r_e: f64,
    cap_angle: f64,
    layout: Layout,
) -> Result<ProblemInstance> {
    coupled_fields_with(max_degree, r_p, r_s, r_e, cap_angle, layout, DEFAULT_CAP_THETA_NODES, DEFAULT_CAP_PHI_NODES)
}

#[allow(clippy::too_many_arguments)]
pub fn coupled_fields_with(
    max_degree: usize,
    r_p: f64,
    r_s: f64,
    r_e: f64,
    cap_angle: f64,
    layout: Layout,
    n_theta: usize,
    n_phi: usize,
) -> Result<ProblemInstance> {
    if !(r_p > 0.0 && r_p < r_s && r_s < r_e) {
        return Err(invalid(format!(
            "coupled fields need 0 < r_p < r_s < r_e, got {r_p}, {r_s}, {r_e}"
        )));
    }
    let op = couple(
        &internal_operator(max_degree, r_p, r_s)?,
        &external_operator(max_degree, r_s, r_e)?,
        layout,
    )?;
    Ok(ProblemInstance {
        name: "coupled".into(),
        operator: Arc::new(op),
        region: Arc::new(RegionQuadrature::polar_cap(r_s, cap_angle, n_theta, n_phi)?),
        default_threshold: DEFAULT_THRESHOLD_RATIO,
        notes: format!(
            "internal (r_p/r_s)^l + external (r_s/r_e)^(l+1), L = {max_degree}, {layout:?} layout"
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use crate::spaces::Label;

    fn sorted_desc(mut v: Vec<f64>) -> Vec<f64> {
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }

    #[test]
    fn circle_identity_spectrum() {
        let p = circle_identity(50, 1001).unwrap();
        assert_eq!(p.operator.size(), 101);
        assert!(p.operator.sigmas().iter().all(|s| *s == 1.0));
        assert_eq!(circle_identity(1, 11).unwrap().operator.size(), 3);
    }

    #[test]
    fn circle_ill_posed_spectrum() {
        let p = circle_ill_posed(50, 1001).unwrap();
        let s = p.operator.sigmas();
        assert_eq!(s[0], 1.0);
        assert_eq!(s[1], 0.5);
        assert_eq!(s[2], 0.5);
        assert_abs_diff_eq!(s[100], 1.0 / 51.0, epsilon = 1e-15);
    }

    #[test]
    fn ill_posed_is_worse_conditioned() {
        let a = circle_identity(50, 1001).unwrap().build().unwrap();
        let b = circle_ill_posed(50, 1001).unwrap().build().unwrap();
        let ratio = |s: &SlepianSystem, k: usize| s.taus()[0] / s.taus()[k];
        // well inside the concentrated band the identity spectrum is flat
        assert!(ratio(&a, 24) < 1.0 + 1e-9);
        assert!(ratio(&b, 24) > 10.0);
        assert!(b.condition_number() > a.condition_number());
    }

    #[test]
    fn downward_spectrum() {
        let p = sphere_downward_continuation(10, 6371.0, 6771.0, PI / 3.0).unwrap();
        let basis = p.operator.u_basis();
        let ratio: f64 = 6371.0 / 6771.0;
        assert_eq!(p.operator.sigmas()[0], 1.0);
        let k = basis.index_of(Label::Harmonic { l: 10, m: -3 }).unwrap();
        assert_abs_diff_eq!(p.operator.sigmas()[k], ratio.powi(10), epsilon = 1e-15);
        assert_abs_diff_eq!(p.operator.sigmas()[k], 0.543936137, epsilon = 1e-9);
        assert!(sphere_downward_continuation(3, 2.0, 1.0, 1.0).is_err());
        assert!(sphere_downward_continuation(3, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn full_sphere_eigenvalues_are_squared_sigmas() {
        let p = sphere_downward_continuation_with(4, 1.0, 1.2, PI, 16, 32).unwrap();
        let sys = p.build_with_threshold(0.0).unwrap();
        let expect = sorted_desc(p.operator.sigmas().iter().map(|s| s * s).collect());
        for (a, b) in sys.rhos().iter().zip(&expect) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
    }

    #[test]
    fn coupled_validation_and_external_degree_zero() {
        assert!(coupled_fields(2, 1.0, 1.1, 1.05, 1.0, Layout::Concatenated).is_err());
        assert!(coupled_fields(2, 1.2, 1.1, 1.5, 1.0, Layout::Concatenated).is_err());
        let p = coupled_fields_with(2, 1.0, 1.1, 1.5, 1.0, Layout::Concatenated, 8, 16).unwrap();
        assert_eq!(p.operator.size(), 18);
        assert_abs_diff_eq!(p.operator.sigmas()[9], 1.1 / 1.5, epsilon = 1e-15);
    }

    #[test]
    fn distant_external_field_decouples() {
        let (l, rp, rs) = (4, 1.0, 1.1);
        let coupled = coupled_fields_with(l, rp, rs, 1e6 * rs, 1.0, Layout::Concatenated, 16, 32)
            .unwrap()
            .build_with_threshold(0.0)
            .unwrap();
        let internal = sphere_downward_continuation_with(l, rp, rs, 1.0, 16, 32)
            .unwrap()
            .build_with_threshold(0.0)
            .unwrap();
        for k in 0..10 {
            assert_abs_diff_eq!(coupled.rhos()[k], internal.rhos()[k], epsilon = 1e-6);
        }
    }

    #[test]
    fn layouts_give_same_spectrum() {
        let build = |layout| {
            coupled_fields_with(3, 1.0, 1.1, 1.4, 0.9, layout, 16, 32)
                .unwrap()
                .build_with_threshold(0.0)
                .unwrap()
        };
        let a = build(Layout::Interleaved);
        let b = build(Layout::Concatenated);
        for (x, y) in a.rhos().iter().zip(b.rhos()) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-10);
        }
    }
}
