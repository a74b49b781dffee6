use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Planar isotropic moduli of the two-phase body and of the surrounding matrix.
///
/// Both phases share the shear modulus `mu`. The exterior medium has Lamé
/// modulus `lambda_e`, which always equals the matrix modulus `lambda2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElasticParams {
    mu: f64,
    lambda1: f64,
    lambda2: f64,
    lambda_e: f64,
}

impl ElasticParams {
    pub const DIM: usize = 2;

    /// Requires `μ > 0` and `dλ_j + 2μ > 0` for both phases.
    pub fn new(mu: f64, lambda1: f64, lambda2: f64) -> Result<Self> {
        if !(mu.is_finite() && lambda1.is_finite() && lambda2.is_finite()) {
            return Err(Error::InvalidParameters("moduli must be finite".into()));
        }
        if mu <= 0.0 {
            return Err(Error::InvalidParameters(format!("mu must be positive, got {mu}")));
        }
        let d = Self::DIM as f64;
        for (name, lambda) in [("lambda1", lambda1), ("lambda2", lambda2)] {
            if d * lambda + 2.0 * mu <= 0.0 {
                return Err(Error::InvalidParameters(format!(
                    "{name} = {lambda} violates d*lambda + 2*mu > 0 (mu = {mu})"
                )));
            }
        }
        Ok(Self { mu, lambda1, lambda2, lambda_e: lambda2 })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }

    pub fn lambda2(&self) -> f64 {
        self.lambda2
    }

    pub fn lambda_e(&self) -> f64 {
        self.lambda_e
    }

    pub fn dim(&self) -> usize {
        Self::DIM
    }

    /// Kolosov constant of the exterior medium, `(λ_E+3μ)/(λ_E+μ)`.
    ///
    /// The denominator uses `λ_E`; with `λ_E = λ₂` there is only one
    /// exterior Lamé modulus it could refer to.
    pub fn rho_e(&self) -> f64 {
        (self.lambda_e + 3.0 * self.mu) / (self.lambda_e + self.mu)
    }

    /// `μ/(λ_E+μ)`, the constant of the Han–Wu integral form. `1 + 2η = ρ_E`.
    pub fn eta(&self) -> f64 {
        self.mu / (self.lambda_e + self.mu)
    }

    /// Lamé modulus at a point, by phase.
    pub fn lambda(&self, in_inclusion: bool) -> f64 {
        if in_inclusion {
            self.lambda1
        } else {
            self.lambda2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_constants() {
        let p = ElasticParams::new(1.0, 3.0, 1.0).unwrap();
        assert_eq!(p.lambda_e(), 1.0);
        assert_eq!(p.rho_e(), 2.0);
        assert_eq!(p.eta(), 0.5);
        assert!((1.0 + 2.0 * p.eta() - p.rho_e()).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_moduli() {
        assert!(ElasticParams::new(0.0, 1.0, 1.0).is_err());
        assert!(ElasticParams::new(1.0, -1.0, 1.0).is_err());
        assert!(ElasticParams::new(1.0, 1.0, -1.5).is_err());
        assert!(ElasticParams::new(1.0, f64::NAN, 1.0).is_err());
        // λ slightly above −μ is still admissible in 2-D
        assert!(ElasticParams::new(1.0, -0.99, 1.0).is_ok());
    }
}
