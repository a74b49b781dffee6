//! Closed-form full-space solution for a concentric circular inclusion.
//!
//! With equal shear moduli the displacement is `u = ∇φ` and only the radial
//! mode of `φ` is scattered:
//!
//! ```text
//! r < a:  φ = C₁r²/4 + k + g_h
//! r > a:  φ = C_g r²/4 + β·ln r + g_h
//! ```
//!
//! Continuity of `u_r` at `r = a` fixes `β = a²(C₁ − C_g)/2`, and the
//! additive constant `k` makes `φ` itself continuous. Harmonic modes of the
//! applied field pass through the interface untouched.

use num_complex::Complex64;
use serde::Serialize;

use crate::applied::{analyze_on_circle, traction_to_polar, AppliedField, Mat2};
use crate::error::{Error, Result};
use crate::estimator::DilatationConstants;
use crate::nonlocal::BoundaryDataSet;
use crate::params::ElasticParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Inclusion,
    Matrix,
}

/// Interior and exterior coefficients of one applied harmonic mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeCoefficients {
    pub n: u32,
    pub interior: Complex64,
    pub exterior_decay: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnulusSolution {
    a: f64,
    params: ElasticParams,
    af: AppliedField,
    c1: f64,
    c2: f64,
    beta: f64,
    interior_constant: f64,
}

impl AnnulusSolution {
    pub fn solve(a: f64, params: ElasticParams, af: AppliedField) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::Geometry(format!("inclusion radius must be positive, got {a}")));
        }
        let consts = DilatationConstants::compute(&params, af.c_g())?;
        let (c1, c2) = (consts.c1, consts.c2);
        let beta = a * a * (c1 - c2) / 2.0;
        let interior_constant = (c2 - c1) * a * a / 4.0 + beta * a.ln();

        let mu = params.mu();
        let inner = (params.lambda1() + mu) * c1;
        let outer = (params.lambda2() + mu) * c2 - 2.0 * mu * beta / (a * a);
        debug_assert!(
            (inner - outer).abs() <= 1e-12 * (1.0 + inner.abs()),
            "radial traction jump {} at r = a",
            inner - outer
        );

        Ok(Self { a, params, af, c1, c2, beta, interior_constant })
    }

    pub fn radius(&self) -> f64 {
        self.a
    }

    pub fn params(&self) -> &ElasticParams {
        &self.params
    }

    pub fn applied(&self) -> &AppliedField {
        &self.af
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }

    /// Coefficient of `ln r` in the exterior potential.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn interior_constant(&self) -> f64 {
        self.interior_constant
    }

    pub fn mode_coefficients(&self) -> Vec<ModeCoefficients> {
        self.af
            .modes()
            .iter()
            .map(|m| ModeCoefficients {
                n: m.n,
                interior: m.amplitude,
                exterior_decay: Complex64::new(0.0, 0.0),
            })
            .collect()
    }

    pub fn phase_at(&self, x: f64, y: f64) -> Phase {
        if x * x + y * y < self.a * self.a {
            Phase::Inclusion
        } else {
            Phase::Matrix
        }
    }

    pub fn potential(&self, x: f64, y: f64) -> f64 {
        self.potential_on(self.phase_at(x, y), x, y)
    }

    /// Potential using the formula of `phase`, whichever side `(x, y)` is on.
    pub fn potential_on(&self, phase: Phase, x: f64, y: f64) -> f64 {
        let r2 = x * x + y * y;
        let harmonic = self.af.eval_g_xy(x, y) - self.af.c_g() / 4.0 * r2;
        match phase {
            Phase::Inclusion => self.c1 / 4.0 * r2 + self.interior_constant + harmonic,
            Phase::Matrix => self.c2 / 4.0 * r2 + self.beta * r2.ln() / 2.0 + harmonic,
        }
    }

    /// `u_x + i·u_y`.
    pub fn displacement(&self, x: f64, y: f64) -> Complex64 {
        self.displacement_on(self.phase_at(x, y), x, y)
    }

    pub fn displacement_on(&self, phase: Phase, x: f64, y: f64) -> Complex64 {
        let z = Complex64::new(x, y);
        let h = self.af.harmonic_gradient(x, y);
        match phase {
            Phase::Inclusion => z * (self.c1 / 2.0) + h,
            Phase::Matrix => z * (self.c2 / 2.0) + z * (self.beta / z.norm_sqr()) + h,
        }
    }

    /// `u_r + i·u_θ` at polar position `(r, θ)`.
    pub fn displacement_polar(&self, r: f64, theta: f64) -> Complex64 {
        let (x, y) = (r * theta.cos(), r * theta.sin());
        self.displacement(x, y) * Complex64::from_polar(1.0, -theta)
    }

    /// `∇∇φ`.
    pub fn strain(&self, x: f64, y: f64) -> Mat2 {
        self.strain_on(self.phase_at(x, y), x, y)
    }

    pub fn strain_on(&self, phase: Phase, x: f64, y: f64) -> Mat2 {
        let mut e = self.af.harmonic_hessian(x, y);
        match phase {
            Phase::Inclusion => {
                e[0][0] += self.c1 / 2.0;
                e[1][1] += self.c1 / 2.0;
            }
            Phase::Matrix => {
                let r2 = x * x + y * y;
                let s = self.beta / (r2 * r2);
                e[0][0] += self.c2 / 2.0 + s * (y * y - x * x);
                e[1][1] += self.c2 / 2.0 + s * (x * x - y * y);
                e[0][1] -= 2.0 * s * x * y;
                e[1][0] -= 2.0 * s * x * y;
            }
        }
        e
    }

    /// `σ = λ Δφ I + 2μ ∇∇φ`.
    pub fn stress(&self, x: f64, y: f64) -> Mat2 {
        self.stress_on(self.phase_at(x, y), x, y)
    }

    pub fn stress_on(&self, phase: Phase, x: f64, y: f64) -> Mat2 {
        let e = self.strain_on(phase, x, y);
        let iso = match phase {
            Phase::Inclusion => self.params.lambda1() * self.c1,
            Phase::Matrix => self.params.lambda2() * self.c2,
        };
        let mu2 = 2.0 * self.params.mu();
        [[iso + mu2 * e[0][0], mu2 * e[0][1]], [mu2 * e[1][0], iso + mu2 * e[1][1]]]
    }

    /// `∇·u`: `C₁` inside the inclusion, `C_g` outside.
    pub fn dilatation(&self, r: f64, _theta: f64) -> Result<f64> {
        if r == self.a {
            return Err(Error::InterfacePoint(r));
        }
        if r < 0.0 {
            return Err(Error::Domain { r, radius: 0.0 });
        }
        Ok(if r < self.a { self.c1 } else { self.c2 })
    }

    /// Traces on `∂B_R` sampled from the solution and analyzed at `2N+1` points.
    pub fn boundary_data(&self, radius: f64, order: usize) -> Result<BoundaryDataSet> {
        if !(radius > self.a) {
            return Err(Error::Geometry(format!(
                "boundary radius {radius} must exceed the inclusion radius {}",
                self.a
            )));
        }
        let f0 = self.af.trace_displacement(radius, order)?;
        let big_f0 = self.af.trace_traction(&self.params, radius, order)?;
        let u0 = analyze_on_circle(radius, order, |t| {
            self.displacement_on(Phase::Matrix, radius * t.cos(), radius * t.sin())
                * Complex64::from_polar(1.0, -t)
        })?;
        let t0 = analyze_on_circle(radius, order, |t| {
            traction_to_polar(&self.stress_on(Phase::Matrix, radius * t.cos(), radius * t.sin()), t)
        })?;
        BoundaryDataSet::new(u0, t0, f0, big_f0)
    }

    /// Largest displacement and traction jumps across `r = a` over `m` angles.
    pub fn transmission_jumps(&self, m: usize) -> (f64, f64) {
        let mut du: f64 = 0.0;
        let mut dt: f64 = 0.0;
        for theta in crate::fourier::sample_angles(m) {
            let (x, y) = (self.a * theta.cos(), self.a * theta.sin());
            let ui = self.displacement_on(Phase::Inclusion, x, y);
            let uo = self.displacement_on(Phase::Matrix, x, y);
            du = du.max((ui - uo).norm());
            let ti = traction_to_polar(&self.stress_on(Phase::Inclusion, x, y), theta);
            let to = traction_to_polar(&self.stress_on(Phase::Matrix, x, y), theta);
            dt = dt.max((ti - to).norm());
        }
        (du, dt)
    }
}
