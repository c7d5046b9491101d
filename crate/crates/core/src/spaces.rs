//! Global domains, orthonormal basis systems and regional quadrature.
//!
//! Everything here is immutable after construction. Basis functions are
//! addressed by a 0-based linear index; [`Label`] carries the `(n, j)` or
//! `(l, m)` meaning of each index.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::harmonics::{harmonic_index, harmonic_label, real_harmonics};
use crate::quadrature::{composite_simpson, gauss_legendre, periodic_trapezoid};

/// Slack used when deciding whether a point sits inside a closed region.
const BOUNDARY_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Domain1D {
    pub lower: f64,
    pub upper: f64,
    pub periodic: bool,
}

impl Domain1D {
    pub fn new(lower: f64, upper: f64, periodic: bool) -> Result<Self> {
        if !(lower < upper) || !lower.is_finite() || !upper.is_finite() {
            return Err(invalid(format!("domain bounds [{lower}, {upper}]")));
        }
        Ok(Self { lower, upper, periodic })
    }

    /// The circle `[0, 2π]` with its endpoints identified.
    pub fn circle() -> Self {
        Self { lower: 0.0, upper: TAU, periodic: true }
    }

    pub fn length(&self) -> f64 {
        self.upper - self.lower
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphereDomain {
    pub radius: f64,
}

impl SphereDomain {
    pub fn new(radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(invalid(format!("sphere radius must be positive, got {radius}")));
        }
        Ok(Self { radius })
    }

    pub fn area(&self) -> f64 {
        4.0 * PI * self.radius * self.radius
    }
}

/// A point of a global domain. Sphere points are angular; the radius
/// belongs to the basis or region that interprets them.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Point {
    Line(f64),
    Sphere { colatitude: f64, longitude: f64 },
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Line(x) => write!(f, "x={x}"),
            Point::Sphere { colatitude, longitude } => {
                write!(f, "(colatitude={colatitude}, longitude={longitude})")
            }
        }
    }
}

/// How two index sets are merged into one.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layout {
    /// Alternate first/second, starting with the first; the tail of the
    /// longer system follows once the shorter one is exhausted.
    Interleaved,
    /// All of the first system, then all of the second.
    #[default]
    Concatenated,
}

impl Layout {
    /// Position-to-`(part, local index)` table for sizes `n1`, `n2`.
    pub fn index_map(self, n1: usize, n2: usize) -> Vec<(usize, usize)> {
        match self {
            Layout::Concatenated => (0..n1)
                .map(|i| (0, i))
                .chain((0..n2).map(|i| (1, i)))
                .collect(),
            Layout::Interleaved => {
                let mut out = Vec::with_capacity(n1 + n2);
                for i in 0..n1.max(n2) {
                    if i < n1 {
                        out.push((0, i));
                    }
                    if i < n2 {
                        out.push((1, i));
                    }
                }
                out
            }
        }
    }
}

/// Meaning of a single basis index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Label {
    /// `n = 0` is the constant (with `j = 1`); `j = 1` is cosine, `j = 2` sine.
    Fourier { n: usize, j: u8 },
    /// Degree and order of a real spherical harmonic.
    Harmonic { l: usize, m: i64 },
    /// Index inside one part of a coupled system.
    Part { part: usize, local: usize },
}

#[derive(Clone, Debug)]
enum BasisKind {
    Fourier { bandlimit: usize, domain: Domain1D },
    Spherical { max_degree: usize, sphere: SphereDomain },
    Union { parts: [Arc<BasisSystem>; 2], map: Vec<(usize, usize)>, layout: Layout },
}

/// A finite orthonormal family of real functions on a global domain.
///
/// Union systems (built by coupling) are the exception: as a `v`-system
/// they are generally not orthonormal, and as a `u`-system they live on a
/// product space whose components are evaluated with [`values_in_part`].
///
/// [`values_in_part`]: BasisSystem::values_in_part
#[derive(Clone, Debug)]
pub struct BasisSystem {
    kind: BasisKind,
    size: usize,
}

impl BasisSystem {
    /// Trigonometric system `1/√(2π), cos(nx)/√π, sin(nx)/√π` for `n <= bandlimit`.
    pub fn fourier(bandlimit: usize) -> Result<Self> {
        Self::fourier_on(bandlimit, Domain1D::circle())
    }

    /// Trigonometric system adapted to an arbitrary periodic interval.
    pub fn fourier_on(bandlimit: usize, domain: Domain1D) -> Result<Self> {
        if bandlimit == 0 {
            return Err(invalid("Fourier bandlimit must be at least 1"));
        }
        if !domain.periodic {
            return Err(invalid("Fourier basis requires a periodic domain"));
        }
        Ok(Self {
            kind: BasisKind::Fourier { bandlimit, domain },
            size: 2 * bandlimit + 1,
        })
    }

    /// Real spherical harmonics up to `max_degree`, scaled by `1/r` so they
    /// are orthonormal on the sphere of radius `r`.
    pub fn spherical(max_degree: usize, sphere: SphereDomain) -> Self {
        Self {
            kind: BasisKind::Spherical { max_degree, sphere },
            size: (max_degree + 1) * (max_degree + 1),
        }
    }

    pub(crate) fn union(first: Arc<BasisSystem>, second: Arc<BasisSystem>, layout: Layout) -> Self {
        let map = layout.index_map(first.size, second.size);
        Self {
            size: map.len(),
            kind: BasisKind::Union { parts: [first, second], map, layout },
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn is_union(&self) -> bool {
        matches!(self.kind, BasisKind::Union { .. })
    }

    /// Number of product-space components (1 unless coupled).
    pub fn part_count(&self) -> usize {
        if self.is_union() { 2 } else { 1 }
    }

    /// The layout of a union system.
    pub fn layout(&self) -> Option<Layout> {
        match &self.kind {
            BasisKind::Union { layout, .. } => Some(*layout),
            _ => None,
        }
    }

    /// Whether two systems act on the same kind of domain with the same
    /// evaluation semantics (same circle, or same-radius sphere).
    pub fn same_domain(&self, other: &BasisSystem) -> bool {
        match (&self.kind, &other.kind) {
            (BasisKind::Fourier { domain: a, .. }, BasisKind::Fourier { domain: b, .. }) => a == b,
            (BasisKind::Spherical { sphere: a, .. }, BasisKind::Spherical { sphere: b, .. }) => {
                a == b
            }
            (BasisKind::Union { parts, .. }, _) => {
                parts[0].same_domain(other) && parts[1].same_domain(other)
            }
            (_, BasisKind::Union { parts, .. }) => {
                self.same_domain(&parts[0]) && self.same_domain(&parts[1])
            }
            _ => false,
        }
    }

    pub fn label(&self, k: usize) -> Result<Label> {
        self.check_index(k)?;
        Ok(match &self.kind {
            BasisKind::Fourier { .. } => {
                if k == 0 {
                    Label::Fourier { n: 0, j: 1 }
                } else {
                    Label::Fourier { n: k.div_ceil(2), j: if k % 2 == 1 { 1 } else { 2 } }
                }
            }
            BasisKind::Spherical { .. } => {
                let (l, m) = harmonic_label(k);
                Label::Harmonic { l, m }
            }
            BasisKind::Union { map, .. } => {
                let (part, local) = map[k];
                Label::Part { part, local }
            }
        })
    }

    /// Inverse of [`label`](Self::label).
    pub fn index_of(&self, label: Label) -> Result<usize> {
        let k = match (&self.kind, label) {
            (BasisKind::Fourier { .. }, Label::Fourier { n: 0, j: 1 }) => 0,
            (BasisKind::Fourier { .. }, Label::Fourier { n, j }) if n >= 1 && (j == 1 || j == 2) => {
                // 1-based k(n, j) = 2(n-1) + j + 1
                2 * (n - 1) + j as usize
            }
            (BasisKind::Spherical { .. }, Label::Harmonic { l, m }) if m.unsigned_abs() as usize <= l => {
                harmonic_index(l, m)
            }
            (BasisKind::Union { map, .. }, Label::Part { part, local }) => map
                .iter()
                .position(|&e| e == (part, local))
                .ok_or_else(|| invalid(format!("no index for {label:?}")))?,
            _ => return Err(invalid(format!("label {label:?} does not belong to this basis"))),
        };
        self.check_index(k)?;
        Ok(k)
    }

    /// Degree of the `k`-th function (`n` for Fourier, `l` for harmonics).
    pub fn degree(&self, k: usize) -> Result<usize> {
        match self.label(k)? {
            Label::Fourier { n, .. } => Ok(n),
            Label::Harmonic { l, .. } => Ok(l),
            Label::Part { part, local } => match &self.kind {
                BasisKind::Union { parts, .. } => parts[part].degree(local),
                _ => unreachable!(),
            },
        }
    }

    /// Value of the `k`-th function at `point`.
    pub fn eval(&self, k: usize, point: Point) -> Result<f64> {
        self.check_index(k)?;
        Ok(self.values(point)?[k])
    }

    /// Values of every function at `point`.
    ///
    /// For a union system each entry is the value of the corresponding part
    /// function, which is the `v`-side reading of a coupled operator.
    pub fn values(&self, point: Point) -> Result<Vec<f64>> {
        match (&self.kind, point) {
            (BasisKind::Fourier { bandlimit, domain }, Point::Line(x)) => {
                let len = domain.length();
                let omega = TAU / len;
                let c0 = 1.0 / len.sqrt();
                let c = (2.0 / len).sqrt();
                let t = x - domain.lower;
                let mut out = Vec::with_capacity(self.size);
                out.push(c0);
                for n in 1..=*bandlimit {
                    let (s, co) = (n as f64 * omega * t).sin_cos();
                    out.push(c * co);
                    out.push(c * s);
                }
                Ok(out)
            }
            (BasisKind::Spherical { max_degree, sphere }, Point::Sphere { colatitude, longitude }) => {
                let inv_r = 1.0 / sphere.radius;
                let mut y = real_harmonics(*max_degree, colatitude, longitude);
                y.iter_mut().for_each(|v| *v *= inv_r);
                Ok(y)
            }
            (BasisKind::Union { parts, map, .. }, p) => {
                let a = parts[0].values(p)?;
                let b = parts[1].values(p)?;
                Ok(map
                    .iter()
                    .map(|&(part, i)| if part == 0 { a[i] } else { b[i] })
                    .collect())
            }
            (_, p) => Err(invalid(format!("point {p} does not belong to this basis domain"))),
        }
    }

    /// Values at `point` of the component `part` of each product-space basis
    /// element; entries belonging to the other part are zero.
    pub fn values_in_part(&self, part: usize, point: Point) -> Result<Vec<f64>> {
        match &self.kind {
            BasisKind::Union { parts, map, .. } => {
                if part > 1 {
                    return Err(Error::IndexOutOfRange { index: part, size: 2 });
                }
                let v = parts[part].values(point)?;
                Ok(map
                    .iter()
                    .map(|&(p, i)| if p == part { v[i] } else { 0.0 })
                    .collect())
            }
            _ if part == 0 => self.values(point),
            _ => Err(Error::IndexOutOfRange { index: part, size: 1 }),
        }
    }

    /// The component system of a union, or the system itself.
    pub fn part(&self, part: usize) -> Result<&BasisSystem> {
        match (&self.kind, part) {
            (BasisKind::Union { parts, .. }, 0 | 1) => Ok(&parts[part]),
            (BasisKind::Union { .. }, _) => Err(Error::IndexOutOfRange { index: part, size: 2 }),
            (_, 0) => Ok(self),
            _ => Err(Error::IndexOutOfRange { index: part, size: 1 }),
        }
    }

    /// Full-domain quadrature accurate for products of any two functions of
    /// a non-union system.
    pub fn reference_quadrature(&self) -> Result<RegionQuadrature> {
        match &self.kind {
            BasisKind::Fourier { bandlimit, domain } => {
                // equal weights on a periodic grid are exact below 2*bandlimit+1
                let n = 4 * bandlimit + 8;
                let h = domain.length() / n as f64;
                let nodes = (0..n).map(|i| Point::Line(domain.lower + i as f64 * h)).collect();
                Ok(RegionQuadrature {
                    nodes,
                    weights: vec![h; n],
                    spec: RegionSpec::Interval {
                        lower: domain.lower,
                        upper: domain.upper,
                        nodes: n,
                    },
                })
            }
            BasisKind::Spherical { max_degree, sphere } => RegionQuadrature::polar_cap(
                sphere.radius,
                PI,
                max_degree + 2,
                2 * max_degree + 4,
            ),
            BasisKind::Union { .. } => {
                Err(invalid("union systems have no single reference quadrature"))
            }
        }
    }

    fn check_index(&self, k: usize) -> Result<()> {
        if k < self.size {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index: k, size: self.size })
        }
    }
}

/// Serializable description of a region, kept alongside its quadrature.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RegionSpec {
    /// Closed interval with composite Simpson nodes.
    Interval { lower: f64, upper: f64, nodes: usize },
    /// Axisymmetric cap around the north pole of a sphere.
    Cap { radius: f64, cap_angle: f64, n_theta: usize, n_phi: usize },
}

impl fmt::Display for RegionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegionSpec::Interval { lower, upper, nodes } => {
                write!(f, "interval [{lower}, {upper}] ({nodes} Simpson nodes)")
            }
            RegionSpec::Cap { radius, cap_angle, n_theta, n_phi } => write!(
                f,
                "polar cap of angle {cap_angle} on radius {radius} ({n_theta}x{n_phi} nodes)"
            ),
        }
    }
}

/// A subregion `R` with the quadrature defining its `L²(R)` inner product.
#[derive(Clone, Debug)]
pub struct RegionQuadrature {
    nodes: Vec<Point>,
    weights: Vec<f64>,
    spec: RegionSpec,
}

impl RegionQuadrature {
    /// Composite Simpson quadrature on `[a, b] ⊂ domain`.
    pub fn interval(domain: Domain1D, a: f64, b: f64, n_nodes: usize) -> Result<Self> {
        if a < domain.lower || b > domain.upper {
            return Err(invalid(format!(
                "interval [{a}, {b}] leaves the domain [{}, {}]",
                domain.lower, domain.upper
            )));
        }
        let (x, w) = composite_simpson(a, b, n_nodes)?;
        Ok(Self {
            nodes: x.into_iter().map(Point::Line).collect(),
            weights: w,
            spec: RegionSpec::Interval { lower: a, upper: b, nodes: n_nodes },
        })
    }

    /// Cap `{θ <= cap_angle}` on a sphere of `radius`: Gauss-Legendre in
    /// `cos θ` times a periodic trapezoid in longitude, scaled by `radius²`.
    pub fn polar_cap(radius: f64, cap_angle: f64, n_theta: usize, n_phi: usize) -> Result<Self> {
        SphereDomain::new(radius)?;
        if !(cap_angle > 0.0 && cap_angle <= PI) {
            return Err(invalid(format!("cap angle must lie in (0, π], got {cap_angle}")));
        }
        let (t, wt) = gauss_legendre(cap_angle.cos(), 1.0, n_theta)?;
        let (phi, wp) = periodic_trapezoid(n_phi)?;
        let r2 = radius * radius;
        let mut nodes = Vec::with_capacity(n_theta * n_phi);
        let mut weights = Vec::with_capacity(n_theta * n_phi);
        for (ti, wi) in t.iter().zip(&wt) {
            let colatitude = ti.clamp(-1.0, 1.0).acos();
            for (pj, wj) in phi.iter().zip(&wp) {
                nodes.push(Point::Sphere { colatitude, longitude: *pj });
                weights.push(r2 * wi * wj);
            }
        }
        Ok(Self {
            nodes,
            weights,
            spec: RegionSpec::Cap { radius, cap_angle, n_theta, n_phi },
        })
    }

    /// Rebuild from a serialized description.
    pub fn from_spec(spec: &RegionSpec, domain: Domain1D) -> Result<Self> {
        match *spec {
            RegionSpec::Interval { lower, upper, nodes } => Self::interval(domain, lower, upper, nodes),
            RegionSpec::Cap { radius, cap_angle, n_theta, n_phi } => {
                Self::polar_cap(radius, cap_angle, n_theta, n_phi)
            }
        }
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn spec(&self) -> &RegionSpec {
        &self.spec
    }

    /// Measure of the region according to the quadrature.
    pub fn measure(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Closed-region membership.
    pub fn contains(&self, point: Point) -> bool {
        match (&self.spec, point) {
            (RegionSpec::Interval { lower, upper, .. }, Point::Line(x)) => {
                x >= lower - BOUNDARY_SLACK && x <= upper + BOUNDARY_SLACK
            }
            (RegionSpec::Cap { cap_angle, .. }, Point::Sphere { colatitude, .. }) => {
                colatitude >= -BOUNDARY_SLACK && colatitude <= cap_angle + BOUNDARY_SLACK
            }
            _ => false,
        }
    }

    /// `Σ_q w_q a_q b_q`.
    pub fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        self.weights
            .iter()
            .zip(a.iter().zip(b))
            .map(|(w, (a, b))| w * a * b)
            .sum()
    }

    pub fn norm(&self, a: &[f64]) -> f64 {
        self.inner(a, a).sqrt()
    }
}

/// Equidistant grid on a closed interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub count: usize,
    pub lower: f64,
    pub upper: f64,
}

impl GridSpec {
    pub fn new(count: usize, lower: f64, upper: f64) -> Result<Self> {
        if count < 2 {
            return Err(invalid(format!("grid needs at least 2 points, got {count}")));
        }
        if !(lower < upper) {
            return Err(invalid(format!("grid span [{lower}, {upper}] is empty")));
        }
        Ok(Self { count, lower, upper })
    }

    pub fn coordinates(&self) -> Vec<f64> {
        let h = (self.upper - self.lower) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| if i + 1 == self.count { self.upper } else { self.lower + i as f64 * h })
            .collect()
    }

    pub fn points(&self) -> Vec<Point> {
        self.coordinates().into_iter().map(Point::Line).collect()
    }
}
