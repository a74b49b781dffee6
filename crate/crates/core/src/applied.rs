//! The far field `f = ∇g` applied at infinity.
//!
//! `g = (C_g/4)|x|² + Σ Re(α_n z^n)` with `z = x + iy`. The quadratic part is
//! normalized so that `Δg = C_g` holds literally in two dimensions; the
//! harmonic polynomial modes are divergence free and carry no flux.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{BoundaryField, Convention};
use crate::params::ElasticParams;

pub type Mat2 = [[f64; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarmonicMode {
    /// Polynomial degree, at least 1.
    pub n: u32,
    pub amplitude: Complex64,
}

/// A term `coef·r^power` of the radial Fourier coefficient `g_m(r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct RadialTerm {
    m: i64,
    coef: Complex64,
    power: i32,
}

impl RadialTerm {
    fn value(&self, r: f64) -> Complex64 {
        self.coef * r.powi(self.power)
    }

    fn d1(&self, r: f64) -> Complex64 {
        if self.power == 0 {
            return Complex64::new(0.0, 0.0);
        }
        self.coef * (self.power as f64) * r.powi(self.power - 1)
    }

    fn d2(&self, r: f64) -> Complex64 {
        if self.power < 2 {
            return Complex64::new(0.0, 0.0);
        }
        let p = self.power as f64;
        self.coef * p * (p - 1.0) * r.powi(self.power - 2)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AppliedField {
    c_g: f64,
    modes: Vec<HarmonicMode>,
}

impl AppliedField {
    pub fn new(c_g: f64, modes: Vec<HarmonicMode>) -> Result<Self> {
        if !c_g.is_finite() {
            return Err(Error::InvalidParameters(format!("C_g must be finite, got {c_g}")));
        }
        if c_g == 0.0 {
            return Err(Error::DegenerateField);
        }
        if let Some(bad) = modes.iter().find(|m| m.n == 0) {
            return Err(Error::InvalidParameters(format!(
                "harmonic modes need degree >= 1, got {:?}",
                bad
            )));
        }
        Ok(Self { c_g, modes })
    }

    pub fn quadratic(c_g: f64) -> Result<Self> {
        Self::new(c_g, Vec::new())
    }

    pub fn with_mode(mut self, n: u32, amplitude: Complex64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameters("harmonic mode degree must be >= 1".into()));
        }
        self.modes.push(HarmonicMode { n, amplitude });
        Ok(self)
    }

    /// `s·g`; rejects `s = 0`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        let modes = self
            .modes
            .iter()
            .map(|m| HarmonicMode { n: m.n, amplitude: m.amplitude * s })
            .collect();
        Self::new(self.c_g * s, modes)
    }

    pub fn c_g(&self) -> f64 {
        self.c_g
    }

    pub fn modes(&self) -> &[HarmonicMode] {
        &self.modes
    }

    /// Highest harmonic degree, 0 if there are none.
    pub fn max_degree(&self) -> u32 {
        self.modes.iter().map(|m| m.n).max().unwrap_or(0)
    }

    /// `∇·f = Δg`.
    pub fn divergence_of_f(&self) -> f64 {
        self.c_g
    }

    pub fn eval_g(&self, r: f64, theta: f64) -> f64 {
        let z = Complex64::from_polar(r, theta);
        self.c_g / 4.0 * r * r + self.harmonic(z)
    }

    pub fn eval_g_xy(&self, x: f64, y: f64) -> f64 {
        let z = Complex64::new(x, y);
        self.c_g / 4.0 * z.norm_sqr() + self.harmonic(z)
    }

    fn harmonic(&self, z: Complex64) -> f64 {
        self.modes.iter().map(|m| (m.amplitude * z.powu(m.n)).re).sum()
    }

    /// `f_x + i·f_y` at `(x, y)`.
    ///
    /// For `h = Re F(z)` we have `h_x + i·h_y = conj(F'(z))`.
    pub fn gradient(&self, x: f64, y: f64) -> Complex64 {
        Complex64::new(x, y) * (self.c_g / 2.0) + self.harmonic_gradient(x, y)
    }

    /// `∇g_h` as `∂_x g_h + i·∂_y g_h`.
    pub fn harmonic_gradient(&self, x: f64, y: f64) -> Complex64 {
        let z = Complex64::new(x, y);
        self.modes
            .iter()
            .map(|m| (m.amplitude * (m.n as f64) * z.powu(m.n - 1)).conj())
            .sum()
    }

    /// `f_r + i·f_θ` at polar position `(r, θ)`.
    pub fn displacement_polar(&self, r: f64, theta: f64) -> Complex64 {
        let (x, y) = (r * theta.cos(), r * theta.sin());
        self.gradient(x, y) * Complex64::from_polar(1.0, -theta)
    }

    /// `∇∇g` at `(x, y)`.
    pub fn hessian(&self, x: f64, y: f64) -> Mat2 {
        let q = self.c_g / 2.0;
        let h = self.harmonic_hessian(x, y);
        [[q + h[0][0], h[0][1]], [h[1][0], q + h[1][1]]]
    }

    /// `∇∇g_h`, trace free.
    pub fn harmonic_hessian(&self, x: f64, y: f64) -> Mat2 {
        let z = Complex64::new(x, y);
        let (mut hxx, mut hxy) = (0.0, 0.0);
        for m in self.modes.iter().filter(|m| m.n >= 2) {
            let n = m.n as f64;
            let f2 = m.amplitude * n * (n - 1.0) * z.powu(m.n - 2);
            hxx += f2.re;
            hxy -= f2.im;
        }
        [[hxx, hxy], [hxy, -hxx]]
    }

    /// `F = S_E f = λ_E Δg I + 2μ ∇∇g`.
    pub fn stress(&self, params: &ElasticParams, x: f64, y: f64) -> Mat2 {
        let h = self.hessian(x, y);
        let iso = params.lambda_e() * self.c_g;
        let mu2 = 2.0 * params.mu();
        [
            [iso + mu2 * h[0][0], mu2 * h[0][1]],
            [mu2 * h[1][0], iso + mu2 * h[1][1]],
        ]
    }

    /// `F_rr + i·F_rθ` on the circle of radius `r` at angle `θ`.
    pub fn traction_polar(&self, params: &ElasticParams, r: f64, theta: f64) -> Complex64 {
        let s = self.stress(params, r * theta.cos(), r * theta.sin());
        traction_to_polar(&s, theta)
    }

    /// Radial Fourier coefficients `g_m(r) = (1/2π)∫ g(r,θ) e^{-imθ} dθ`, as
    /// monomials: `g_0 = C_g r²/4`, `g_n = α_n rⁿ/2`, `g_{-n} = conj(α_n) rⁿ/2`.
    fn radial_terms(&self) -> Vec<RadialTerm> {
        let mut terms = vec![RadialTerm { m: 0, coef: Complex64::new(self.c_g / 4.0, 0.0), power: 2 }];
        for mode in &self.modes {
            let n = mode.n as i64;
            let p = mode.n as i32;
            terms.push(RadialTerm { m: n, coef: mode.amplitude / 2.0, power: p });
            terms.push(RadialTerm { m: -n, coef: mode.amplitude.conj() / 2.0, power: p });
        }
        terms
    }

    fn check_fits(&self, order: usize) -> Result<()> {
        match self.modes.iter().find(|m| m.n as usize > order) {
            Some(m) => Err(Error::TruncationTooSmall { mode: m.n, order }),
            None => Ok(()),
        }
    }

    /// Polar Fourier coefficients `f_{0,n}` of `f` on `∂B_R`.
    ///
    /// Each `g_m` contributes `g_m'(R) − (m/R)·g_m(R)` at index `m`, which is
    /// `∂_r g + (i/r)∂_θ g` written mode by mode. The quadratic part gives
    /// `C_g R/2` at index 0 and a mode `α_n` gives `n·conj(α_n)·R^{n−1}` at `−n`.
    pub fn trace_displacement(&self, radius: f64, order: usize) -> Result<BoundaryField> {
        self.check_fits(order)?;
        let mut out = BoundaryField::zeros(radius, order, Convention::Polar)?;
        for t in self.radial_terms() {
            *out.coeff_mut(t.m) += t.d1(radius) - t.value(radius) * (t.m as f64 / radius);
        }
        Ok(out)
    }

    /// Polar Fourier coefficients `F_{0,n}` of `F·n` on `∂B_R`, from the radial
    /// coefficients `g_n(r)`:
    ///
    /// `F_{0,n} = (λ_E+2μ)g_n'' + λ_E[g_n'/R − n²g_n/R²] + 2μ[−n·g_n'/R + n·g_n/R²]`.
    pub fn trace_traction(
        &self,
        params: &ElasticParams,
        radius: f64,
        order: usize,
    ) -> Result<BoundaryField> {
        self.check_fits(order)?;
        let (lam, mu) = (params.lambda_e(), params.mu());
        let r = radius;
        let mut out = BoundaryField::zeros(radius, order, Convention::Polar)?;
        for t in self.radial_terms() {
            let n = t.m as f64;
            let (g, g1, g2) = (t.value(r), t.d1(r), t.d2(r));
            *out.coeff_mut(t.m) += g2 * (lam + 2.0 * mu)
                + (g1 / r - g * (n * n / (r * r))) * lam
                + (-g1 * (n / r) + g * (n / (r * r))) * (2.0 * mu);
        }
        Ok(out)
    }
}

/// Polar traction `σ_rr + i·σ_rθ` of a Cartesian stress tensor on the circle
/// through angle `θ`.
pub fn traction_to_polar(s: &Mat2, theta: f64) -> Complex64 {
    let (c, sn) = (theta.cos(), theta.sin());
    let tx = s[0][0] * c + s[0][1] * sn;
    let ty = s[1][0] * c + s[1][1] * sn;
    Complex64::new(tx, ty) * Complex64::from_polar(1.0, -theta)
}

/// Pointwise samples of a polar quantity on the circle, analyzed to a field.
pub(crate) fn analyze_on_circle(
    radius: f64,
    order: usize,
    mut f: impl FnMut(f64) -> Complex64,
) -> Result<BoundaryField> {
    let m = 2 * order + 1;
    let samples: Vec<_> = (0..m).map(|k| f(2.0 * PI * k as f64 / m as f64)).collect();
    BoundaryField::analyze(&samples, radius, Convention::Polar)
}
