//! Structured text configuration (TOML) for bases, regions, problems and
//! experiments.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problems::{self, ProblemInstance};
use crate::spaces::{BasisSystem, Domain1D, Layout, RegionQuadrature, RegionSpec, SphereDomain};

/// Serializable basis description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BasisSpec {
    Fourier { bandlimit: usize },
    Spherical { max_degree: usize, radius: f64 },
}

impl BasisSpec {
    pub fn build(&self) -> Result<BasisSystem> {
        match *self {
            BasisSpec::Fourier { bandlimit } => BasisSystem::fourier(bandlimit),
            BasisSpec::Spherical { max_degree, radius } => {
                Ok(BasisSystem::spherical(max_degree, SphereDomain::new(radius)?))
            }
        }
    }
}

impl RegionSpec {
    pub fn build(&self) -> Result<RegionQuadrature> {
        RegionQuadrature::from_spec(self, Domain1D::circle())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    #[default]
    Identity,
    #[serde(alias = "reciprocal_degree")]
    IllPosed,
    #[serde(alias = "upward_continuation")]
    Downward,
    Coupled,
}

impl ProblemKind {
    pub fn is_circle(self) -> bool {
        matches!(self, ProblemKind::Identity | ProblemKind::IllPosed)
    }
}

impl std::str::FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" => Ok(Self::Identity),
            "ill_posed" | "reciprocal_degree" => Ok(Self::IllPosed),
            "downward" | "upward_continuation" => Ok(Self::Downward),
            "coupled" => Ok(Self::Coupled),
            other => Err(Error::Config(format!("unknown problem kind {other:?}"))),
        }
    }
}

/// Parameters selecting and sizing a [`ProblemInstance`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProblemConfig {
    pub kind: ProblemKind,
    /// Fourier bandlimit `N` (circle problems).
    pub bandlimit: usize,
    /// Maximal spherical-harmonic degree `L` (sphere problems).
    pub max_degree: usize,
    /// Region `[a, b]` on the circle.
    pub bounds: [f64; 2],
    /// Simpson nodes used for the Gram matrix on the circle.
    pub region_nodes: usize,
    pub r_p: f64,
    pub r_s: f64,
    pub r_e: f64,
    pub cap_angle: f64,
    pub n_theta: usize,
    pub n_phi: usize,
    pub layout: Layout,
}

impl Default for ProblemConfig {
    fn default() -> Self {
        Self {
            kind: ProblemKind::Identity,
            bandlimit: 50,
            max_degree: 10,
            bounds: [PI / 2.0, 1.5 * PI],
            region_nodes: problems::DEFAULT_INTERVAL_NODES,
            r_p: 6371.0,
            r_s: 6771.0,
            r_e: 10_000.0,
            cap_angle: PI / 3.0,
            n_theta: problems::DEFAULT_CAP_THETA_NODES,
            n_phi: problems::DEFAULT_CAP_PHI_NODES,
            layout: Layout::Concatenated,
        }
    }
}

impl ProblemConfig {
    pub fn instance(&self) -> Result<ProblemInstance> {
        match self.kind {
            ProblemKind::Identity | ProblemKind::IllPosed => {
                let base = if self.kind == ProblemKind::Identity {
                    problems::circle_identity(self.bandlimit, self.region_nodes)?
                } else {
                    problems::circle_ill_posed(self.bandlimit, self.region_nodes)?
                };
                let [a, b] = self.bounds;
                if [a, b] == [PI / 2.0, 1.5 * PI] {
                    Ok(base)
                } else {
                    let region = RegionQuadrature::interval(Domain1D::circle(), a, b, self.region_nodes)?;
                    Ok(base.with_region(region))
                }
            }
            ProblemKind::Downward => problems::sphere_downward_continuation_with(
                self.max_degree,
                self.r_p,
                self.r_s,
                self.cap_angle,
                self.n_theta,
                self.n_phi,
            ),
            ProblemKind::Coupled => problems::coupled_fields_with(
                self.max_degree,
                self.r_p,
                self.r_s,
                self.r_e,
                self.cap_angle,
                self.layout,
                self.n_theta,
                self.n_phi,
            ),
        }
    }
}

pub fn from_toml<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
}

pub fn to_toml<T: Serialize>(value: &T) -> Result<String> {
    toml::to_string(value).map_err(|e| Error::Config(e.to_string()))
}

pub fn load<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_owned(), source })?;
    from_toml(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_and_region_specs_from_text() {
        let b: BasisSpec = from_toml("kind = \"fourier\"\nbandlimit = 7\n").unwrap();
        assert_eq!(b.build().unwrap().size(), 15);
        let s: BasisSpec = from_toml("kind = \"spherical\"\nmax_degree = 3\nradius = 2.0\n").unwrap();
        assert_eq!(s.build().unwrap().size(), 16);
        let r: RegionSpec = from_toml("kind = \"interval\"\nlower = 1.0\nupper = 2.0\nnodes = 11\n").unwrap();
        assert!((r.build().unwrap().measure() - 1.0).abs() < 1e-14);
        let c: RegionSpec =
            from_toml("kind = \"cap\"\nradius = 1.0\ncap_angle = 1.0\nn_theta = 8\nn_phi = 16\n").unwrap();
        assert_eq!(c.build().unwrap().len(), 128);
        assert_eq!(from_toml::<RegionSpec>(&to_toml(&c).unwrap()).unwrap(), c);
    }

    #[test]
    fn problem_config_defaults_and_aliases() {
        let p: ProblemConfig = from_toml("kind = \"reciprocal_degree\"\nbandlimit = 5\nregion_nodes = 101\n").unwrap();
        assert_eq!(p.kind, ProblemKind::IllPosed);
        let inst = p.instance().unwrap();
        assert_eq!(inst.operator.size(), 11);
        assert_eq!(inst.operator.sigmas()[1], 0.5);
        assert!(from_toml::<ProblemConfig>("kind = \"nope\"").is_err());
        assert!(from_toml::<ProblemConfig>("bandwidth = 3").is_err());
        assert_eq!("upward_continuation".parse::<ProblemKind>().unwrap(), ProblemKind::Downward);
    }

    #[test]
    fn custom_bounds_build_custom_region() {
        let p = ProblemConfig { bandlimit: 4, bounds: [1.0, 2.0], region_nodes: 21, ..Default::default() };
        let inst = p.instance().unwrap();
        assert!((inst.region.measure() - 1.0).abs() < 1e-14);
    }
}
