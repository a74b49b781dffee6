//! Volume fraction from the boundary flux.
//!
//! Integrating `∇·u` over `Ω` with `∇·u = C₁` in `D` and `C₂` elsewhere gives
//! `∮ u·n = (C₁ − C₂)|D| + C₂|Ω|`, hence
//!
//! ```text
//! |D|/|Ω| = ((1/|Ω|)·∮ u·n − C₂) / (C₁ − C₂)
//! ```

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fourier::{same_radius, BoundaryField, Convention};
use crate::params::ElasticParams;

/// Dilatation inside (`c1`) and outside (`c2`) the inclusion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DilatationConstants {
    pub c1: f64,
    pub c2: f64,
    /// Set when `C₁ = C₂`, in which case the phases cannot be told apart.
    pub degenerate: bool,
}

impl DilatationConstants {
    pub fn compute(params: &ElasticParams, c_g: f64) -> Result<Self> {
        Self::from_moduli(params.mu(), params.lambda1(), params.lambda2(), c_g, params.dim())
    }

    /// Same as [`compute`](Self::compute) for moduli given in dimension `dim`.
    pub fn from_moduli(mu: f64, lambda1: f64, lambda2: f64, c_g: f64, dim: usize) -> Result<Self> {
        if !(dim == 2 || dim == 3) {
            return Err(Error::InvalidParameters(format!("dimension must be 2 or 3, got {dim}")));
        }
        if !(mu > 0.0) {
            return Err(Error::InvalidParameters(format!("mu must be positive, got {mu}")));
        }
        let d = dim as f64;
        if d * lambda1 + 2.0 * mu <= 0.0 || d * lambda2 + 2.0 * mu <= 0.0 {
            return Err(Error::InvalidParameters(format!(
                "moduli lambda1 = {lambda1}, lambda2 = {lambda2} are not admissible in {dim}-D"
            )));
        }
        if !c_g.is_finite() {
            return Err(Error::InvalidParameters(format!("C_g must be finite, got {c_g}")));
        }
        if c_g == 0.0 {
            return Err(Error::DegenerateField);
        }
        let c1 = (lambda2 + 2.0 * mu) / (lambda1 + 2.0 * mu) * c_g;
        Ok(Self { c1, c2: c_g, degenerate: c1 == c_g })
    }

    fn contrast(&self) -> Result<f64> {
        if self.degenerate || self.c1 == self.c2 {
            return Err(Error::IndistinguishablePhases);
        }
        Ok(self.c1 - self.c2)
    }
}

/// `∮ u·n dS = 2πR·Re(c₀)` for a polar displacement trace.
pub fn flux(u0: &BoundaryField, radius: f64) -> Result<f64> {
    u0.require(Convention::Polar)?;
    if !same_radius(u0.radius(), radius) {
        return Err(Error::Geometry(format!(
            "trace lives on radius {}, flux requested on {radius}",
            u0.radius()
        )));
    }
    Ok(2.0 * PI * radius * u0.coeff(0).re)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VfReport {
    pub flux: f64,
    pub domain_area: f64,
    pub c1: f64,
    pub c2: f64,
    pub vf_estimate: f64,
    pub vf_clamped: f64,
    pub vf_true: Option<f64>,
    pub abs_error: Option<f64>,
    /// `∂vf/∂flux = 1/((C₁ − C₂)|Ω|)`.
    pub flux_sensitivity: f64,
    /// `∂vf/∂Re(c₀) = 2πR/((C₁ − C₂)|Ω|)`, for disk data only.
    pub c0_sensitivity: Option<f64>,
}

impl VfReport {
    pub fn with_truth(mut self, vf_true: f64) -> Self {
        self.vf_true = Some(vf_true);
        self.abs_error = Some((self.vf_estimate - vf_true).abs());
        self
    }

    pub const CSV_HEADER: &'static str =
        "flux,domain_area,c1,c2,vf_estimate,vf_clamped,vf_true,abs_error,flux_sensitivity,c0_sensitivity";

    /// Comma separated fields in header order; absent values are empty.
    pub fn csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
        let mut s = String::new();
        let _ = write!(
            s,
            "{:e},{:e},{:e},{:e},{:e},{:e},{},{},{:e},{}",
            self.flux,
            self.domain_area,
            self.c1,
            self.c2,
            self.vf_estimate,
            self.vf_clamped,
            opt(self.vf_true),
            opt(self.abs_error),
            self.flux_sensitivity,
            opt(self.c0_sensitivity)
        );
        s
    }
}

/// Estimate from a polar displacement trace on `∂B_R`.
pub fn estimate(u0: &BoundaryField, radius: f64, params: &ElasticParams, c_g: f64) -> Result<VfReport> {
    let consts = DilatationConstants::compute(params, c_g)?;
    let q = flux(u0, radius)?;
    let mut report = estimate_from_flux(q, PI * radius * radius, &consts)?;
    report.c0_sensitivity = Some(2.0 * PI * radius * report.flux_sensitivity);
    Ok(report)
}

/// Estimate from an externally measured flux over a domain of area (or volume)
/// `domain_area`; the constants carry the dimension through their admissibility check.
pub fn estimate_from_flux(flux: f64, domain_area: f64, consts: &DilatationConstants) -> Result<VfReport> {
    if !(domain_area > 0.0 && domain_area.is_finite()) {
        return Err(Error::Geometry(format!("domain measure must be positive, got {domain_area}")));
    }
    let contrast = consts.contrast()?;
    let vf = (flux / domain_area - consts.c2) / contrast;
    Ok(VfReport {
        flux,
        domain_area,
        c1: consts.c1,
        c2: consts.c2,
        vf_estimate: vf,
        vf_clamped: vf.clamp(0.0, 1.0),
        vf_true: None,
        abs_error: None,
        flux_sensitivity: 1.0 / (contrast * domain_area),
        c0_sensitivity: None,
    })
}
