//! Slepian bases for linear compact operators restricted to a subregion.
//!
//! Given an operator with known singular system `T F = Σ σ_n ⟨F, u_n⟩ v_n`
//! and a region `R`, the crate builds the singular-value decomposition of
//! the projected operator `P T` (restriction of `T F` to `R`) and uses it to
//! regularize regional inverse problems by truncation or by multiscale
//! (scaling function / wavelet) filters.

pub mod config;
pub mod eigen;
pub mod error;
pub mod experiment;
pub mod harmonics;
pub mod operator;
pub mod problems;
pub mod quadrature;
pub mod regularization;
pub mod report;
pub mod rng;
pub mod slepian;
pub mod spaces;

pub use error::{Error, Result};
pub use operator::{couple, DiagonalOperator};
pub use slepian::{build_gram, build_slepian_matrix, GramMatrix, SlepianSystem};
pub use spaces::{BasisSystem, Domain1D, GridSpec, Label, Layout, Point, RegionQuadrature, SphereDomain};
