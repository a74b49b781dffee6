//! The nonlocal boundary condition `P(u′₀, t′₀, f₀, F₀) = t′₀ − Λ_E(u′₀ − f₀) − F₀ = 0`.
//!
//! Imposed on `∂B_R`, it makes the finite body respond exactly as the
//! restriction of the full-space problem with far field `f = ∇g`. The traction
//! `t′₀` is never derived from `u′₀` through a constitutive law, because the
//! interior geometry is unknown; closure always goes through the DtN map.

use serde::Serialize;

use crate::dtn::DtnOperator;
use crate::error::{Error, Result};
use crate::fourier::{same_radius, BoundaryField, Convention};
use crate::params::ElasticParams;

/// Displacement and traction traces on `∂B_R` together with the applied-field traces.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryDataSet {
    u0: BoundaryField,
    t0: BoundaryField,
    f0: BoundaryField,
    big_f0: BoundaryField,
}

impl BoundaryDataSet {
    /// All four fields must be polar, on the same radius and of the same order.
    pub fn new(
        u0: BoundaryField,
        t0: BoundaryField,
        f0: BoundaryField,
        big_f0: BoundaryField,
    ) -> Result<Self> {
        for (name, field) in [("u0", &u0), ("t0", &t0), ("f0", &f0), ("F0", &big_f0)] {
            if field.convention() != Convention::Polar {
                return Err(Error::Consistency(format!("{name} is not in polar convention")));
            }
            if !same_radius(field.radius(), u0.radius()) {
                return Err(Error::Consistency(format!(
                    "{name} has radius {}, u0 has {}",
                    field.radius(),
                    u0.radius()
                )));
            }
            if field.order() != u0.order() {
                return Err(Error::Consistency(format!(
                    "{name} has order {}, u0 has {}",
                    field.order(),
                    u0.order()
                )));
            }
        }
        Ok(Self { u0, t0, f0, big_f0 })
    }

    pub fn u0(&self) -> &BoundaryField {
        &self.u0
    }

    pub fn t0(&self) -> &BoundaryField {
        &self.t0
    }

    pub fn f0(&self) -> &BoundaryField {
        &self.f0
    }

    pub fn big_f0(&self) -> &BoundaryField {
        &self.big_f0
    }

    pub fn radius(&self) -> f64 {
        self.u0.radius()
    }

    pub fn order(&self) -> usize {
        self.u0.order()
    }

    /// Same traces with `u0` replaced; the replacement must match the others.
    pub fn with_u0(&self, u0: BoundaryField) -> Result<Self> {
        Self::new(u0, self.t0.clone(), self.f0.clone(), self.big_f0.clone())
    }

    pub fn with_t0(&self, t0: BoundaryField) -> Result<Self> {
        Self::new(self.u0.clone(), t0, self.f0.clone(), self.big_f0.clone())
    }
}

/// Coefficient norms of a residual field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualNorms {
    pub max_abs: f64,
    pub l2: f64,
}

impl ResidualNorms {
    pub fn of(field: &BoundaryField) -> Self {
        Self { max_abs: field.max_abs(), l2: field.l2_norm() }
    }
}

/// Fourier coefficients of `P`, one relation per index:
///
/// ```text
/// n ≥ −1:  t′_n − F_n + (2μ/R)(n+1)(u′_n − f_n)
/// n ≥ 2:   t′_−n − F_−n + (2μ/(Rρ_E))(n−1)(u′_−n − f_−n)
/// ```
///
/// At `n = −1` the displacement factor vanishes, so that index constrains
/// the traction alone.
pub fn residual(data: &BoundaryDataSet, params: &ElasticParams) -> Result<BoundaryField> {
    let r = data.radius();
    let mu = params.mu();
    let rho = params.rho_e();
    let mut out = BoundaryField::zeros(r, data.order(), Convention::Polar)?;
    for n in out.indices() {
        let jump = data.u0.coeff(n) - data.f0.coeff(n);
        let stiffness = if n >= -1 {
            2.0 * mu / r * (n + 1) as f64
        } else {
            2.0 * mu / (r * rho) * (-n - 1) as f64
        };
        *out.coeff_mut(n) = data.t0.coeff(n) - data.big_f0.coeff(n) + jump * stiffness;
    }
    Ok(out)
}

/// Completes displacement data with the traction that satisfies the condition:
/// `t0 = Λ_E(u0 − f0) + F0`.
pub fn close_traction(
    u0: &BoundaryField,
    f0: &BoundaryField,
    big_f0: &BoundaryField,
    params: &ElasticParams,
) -> Result<BoundaryField> {
    let dtn = DtnOperator::new(*params, u0.radius())?;
    dtn.apply(&u0.sub(f0)?)?.add(big_f0)
}
