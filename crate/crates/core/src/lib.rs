//! Exact volume-fraction recovery for an elastic inclusion whose shear
//! modulus matches the surrounding body.
//!
//! When both phases share the shear modulus `μ` and the body is driven by a
//! far field `f = ∇g` with `Δg = C_g ≠ 0`, the displacement is a gradient and
//! its divergence is piecewise constant: `C₁ = (λ₂+2μ)/(λ₁+2μ)·C_g` in the
//! inclusion and `C₂ = C_g` outside. The divergence theorem then turns the
//! boundary flux `∮ u·n` into the exact inclusion area.
//!
//! The crate is organised around the disk `B_R` in two dimensions:
//!
//! - [`fourier`]: vector fields on a circle as truncated Fourier series.
//! - [`params`] and [`applied`]: material constants and the far field `g`.
//! - [`dtn`]: the exterior Dirichlet-to-Neumann map, in diagonal Fourier form
//!   and in the Han–Wu integral form.
//! - [`nonlocal`]: the boundary condition that makes a finite body behave as if
//!   embedded in an infinite matrix.
//! - [`annulus`]: closed-form forward model for a concentric circular inclusion.
//! - [`fd`]: staggered-grid finite-difference oracle for arbitrary inclusions.
//! - [`estimator`]: the volume-fraction formula and its report.

pub mod annulus;
pub mod applied;
pub mod dtn;
pub mod error;
pub mod estimator;
pub mod fd;
pub mod fourier;
pub mod nonlocal;
pub mod params;

pub use annulus::AnnulusSolution;
pub use applied::{AppliedField, HarmonicMode};
pub use dtn::DtnOperator;
pub use error::{Error, Result};
pub use estimator::{DilatationConstants, VfReport};
pub use fd::{FdOptions, GridSolution, InclusionGeometry};
pub use fourier::{BoundaryField, Convention};
pub use nonlocal::{BoundaryDataSet, ResidualNorms};
pub use params::ElasticParams;

pub use num_complex::Complex64;
