//! Exterior Dirichlet-to-Neumann map of the disk `B_R`.
//!
//! For a displacement `ũ` prescribed on `∂B_R`, the exterior Lamé problem with
//! decay at infinity has a unique solution `ũ_E`; the map returns its traction
//! `σ̃_E·n` on `∂B_R⁺`. In polar Fourier coefficients the map is diagonal:
//!
//! ```text
//! σ̃_n  = −(2μ/R)(n+1)·ũ_n          n ≥ 0
//! σ̃_−n = −(2μ/(Rρ_E))(n−1)·ũ_−n    n ≥ 1
//! ```
//!
//! The Han–Wu form ([`DtnOperator::hanwu_apply`]) computes the same traction
//! in Cartesian components from kernel integrals of `d²ũ/dθ²` and is kept as
//! an independent route.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fourier::{same_radius, BoundaryField, Convention};
use crate::params::ElasticParams;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DtnOperator {
    params: ElasticParams,
    radius: f64,
}

impl DtnOperator {
    pub fn new(params: ElasticParams, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Geometry(format!("DtN radius must be positive, got {radius}")));
        }
        Ok(Self { params, radius })
    }

    pub fn params(&self) -> &ElasticParams {
        &self.params
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Multiplier applied to polar coefficient `n`.
    pub fn symbol(&self, n: i64) -> f64 {
        let mu = self.params.mu();
        let r = self.radius;
        if n >= 0 {
            -2.0 * mu / r * (n + 1) as f64
        } else {
            -2.0 * mu / (r * self.params.rho_e()) * (-n - 1) as f64
        }
    }

    fn check_field(&self, u: &BoundaryField, convention: Convention) -> Result<()> {
        u.require(convention)?;
        if !same_radius(u.radius(), self.radius) {
            return Err(Error::Geometry(format!(
                "field lives on radius {} but the operator on {}",
                u.radius(),
                self.radius
            )));
        }
        Ok(())
    }

    /// Polar traction coefficients of the exterior solution with trace `u`.
    pub fn apply(&self, u: &BoundaryField) -> Result<BoundaryField> {
        self.check_field(u, Convention::Polar)?;
        Ok(u.map(|n, c| c * self.symbol(n)))
    }

    /// `ũ_{E,r} + i·ũ_{E,θ}` at `(r, θ)`, `r ≥ R`, components referenced to `θ`.
    ///
    /// ```text
    /// ũ₀Rr⁻¹ + Σ_{n≥1} ũ_{−n}(R/r)^{n−1} e^{−inθ}
    ///        + Σ_{n≥1} [ũ_n(R/r)^{n+1} + ((n−1)/ρ_E)·conj(ũ_{−n})R^{n−1}r^{−(n+1)}(r²−R²)] e^{inθ}
    /// ```
    pub fn exterior_eval(&self, u: &BoundaryField, r: f64, theta: f64) -> Result<Complex64> {
        self.check_field(u, Convention::Polar)?;
        let big_r = self.radius;
        if r < big_r && !same_radius(r, big_r) {
            return Err(Error::Domain { r, radius: big_r });
        }
        Ok(self.series(u, r, theta))
    }

    /// The exterior series without the `r ≥ R` check; it continues analytically inside.
    fn series(&self, u: &BoundaryField, r: f64, theta: f64) -> Complex64 {
        let big_r = self.radius;
        let rho = self.params.rho_e();
        let q = big_r / r;
        let mut w = u.coeff(0) * q;
        for n in 1..=u.order() as i64 {
            let nf = n as f64;
            let neg = u.coeff(-n);
            let pos = u.coeff(n);
            let decay_lo = q.powi(n as i32 - 1);
            let decay_hi = q.powi(n as i32 + 1);
            w += neg * decay_lo * Complex64::from_polar(1.0, -nf * theta);
            // R^{n−1} r^{−(n+1)} (r² − R²) = (R/r)^{n−1}·(1 − (R/r)²)
            let coupling = neg.conj() * ((nf - 1.0) / rho) * decay_lo * (1.0 - q * q);
            w += (pos * decay_hi + coupling) * Complex64::from_polar(1.0, nf * theta);
        }
        w
    }

    /// Han–Wu form of the map, on Cartesian components `ũ + i·ṽ`.
    ///
    /// The `θ′` integrals use the trapezoid rule on `quad_points` nodes and the
    /// kernel series is cut at the input order `N`. The second derivatives of
    /// `ũ` and `ṽ` are taken spectrally. Requires `quad_points ≥ 4N+1`.
    pub fn hanwu_apply(&self, u_cart: &BoundaryField, quad_points: usize) -> Result<BoundaryField> {
        self.check_field(u_cart, Convention::Cartesian)?;
        let order = u_cart.order();
        let required = 4 * order + 1;
        if quad_points < required {
            return Err(Error::Quadrature { got: quad_points, required });
        }

        // Fourier coefficients of the real components ũ = Re w and ṽ = Im w.
        let i = Complex64::new(0.0, 1.0);
        let re_part = |k: i64| (u_cart.coeff(k) + u_cart.coeff(-k).conj()) * 0.5;
        let im_part = |k: i64| (u_cart.coeff(k) - u_cart.coeff(-k).conj()) / (2.0 * i);

        let weight = 2.0 * PI / quad_points as f64;
        let nodes: Vec<f64> = (0..quad_points)
            .map(|j| 2.0 * PI * j as f64 / quad_points as f64)
            .collect();
        let second_derivative = |coef: &dyn Fn(i64) -> Complex64, t: f64| -> f64 {
            u_cart
                .indices()
                .map(|k| (coef(k) * Complex64::from_polar(-(k * k) as f64, k as f64 * t)).re)
                .sum()
        };
        let u2: Vec<f64> = nodes.iter().map(|&t| second_derivative(&re_part, t)).collect();
        let v2: Vec<f64> = nodes.iter().map(|&t| second_derivative(&im_part, t)).collect();

        let eta = self.params.eta();
        let scale = self.params.mu() / (PI * self.radius);
        let ka = (2.0 + 2.0 * eta) / (1.0 + 2.0 * eta) * scale;
        let kb = 2.0 * eta / (1.0 + 2.0 * eta) * scale;

        let mut out = BoundaryField::zeros(self.radius, order, Convention::Cartesian)?;
        for n in 1..=order as i64 {
            let nf = n as f64;
            let (mut cu, mut su, mut cv, mut sv) = (0.0, 0.0, 0.0, 0.0);
            for (j, &t) in nodes.iter().enumerate() {
                let (s, c) = (nf * t).sin_cos();
                cu += u2[j] * c;
                su += u2[j] * s;
                cv += v2[j] * c;
                sv += v2[j] * s;
            }
            let (cu, su, cv, sv) = (cu * weight, su * weight, cv * weight, sv * weight);

            // ∫ u'' cos n(θ−θ') = cos nθ·cu + sin nθ·su
            // ∫ v'' sin n(θ−θ') = sin nθ·cv − cos nθ·sv
            let px = (ka * cu + kb * sv) / nf;
            let qx = (ka * su - kb * cv) / nf;
            let py = (ka * cv - kb * su) / nf;
            let qy = (ka * sv + kb * cu) / nf;

            // p cos nθ + q sin nθ has coefficients (p ∓ iq)/2 at ±n.
            let x_pos = Complex64::new(px, -qx) * 0.5;
            let x_neg = Complex64::new(px, qx) * 0.5;
            let y_pos = Complex64::new(py, -qy) * 0.5;
            let y_neg = Complex64::new(py, qy) * 0.5;
            *out.coeff_mut(n) = x_pos + i * y_pos;
            *out.coeff_mut(-n) = x_neg + i * y_neg;
        }
        Ok(out)
    }

    /// [`hanwu_apply`](Self::hanwu_apply) with `4N+2` quadrature nodes.
    pub fn hanwu_apply_default(&self, u_cart: &BoundaryField) -> Result<BoundaryField> {
        self.hanwu_apply(u_cart, 4 * u_cart.order() + 2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::applied::Mat2;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn unit_op(lambda: f64) -> DtnOperator {
        DtnOperator::new(ElasticParams::new(1.0, 5.0, lambda).unwrap(), 1.0).unwrap()
    }

    fn single(order: usize, n: i64, v: Complex64, conv: Convention) -> BoundaryField {
        let mut f = BoundaryField::zeros(1.0, order, conv).unwrap();
        *f.coeff_mut(n) = v;
        f
    }

    #[test]
    fn apply_examples() {
        let op = unit_op(1.0);
        assert_eq!(op.params().rho_e(), 2.0);
        let s = op.apply(&single(3, 0, c(1.0, 0.0), Convention::Polar)).unwrap();
        assert_eq!(s.coeff(0), c(-2.0, 0.0));
        let s = op.apply(&single(3, -1, c(1.0, 0.0), Convention::Polar)).unwrap();
        assert_eq!(s.coeff(-1), c(0.0, 0.0));
        let s = op.apply(&single(3, -2, c(1.0, 0.0), Convention::Polar)).unwrap();
        assert_eq!(s.coeff(-2), c(-1.0, 0.0));
    }

    #[test]
    fn apply_rejects_radius_mismatch_and_cartesian_input() {
        let op = DtnOperator::new(ElasticParams::new(1.0, 2.0, 1.0).unwrap(), 2.0).unwrap();
        let u = single(2, 0, c(1.0, 0.0), Convention::Polar);
        assert!(matches!(op.apply(&u), Err(Error::Geometry(_))));
        let op = unit_op(1.0);
        let u = single(2, 0, c(1.0, 0.0), Convention::Cartesian);
        assert!(matches!(op.apply(&u), Err(Error::Convention { .. })));
    }

    #[test]
    fn exterior_eval_examples() {
        let op = unit_op(1.0);
        let u = single(2, 0, c(1.0, 0.0), Convention::Polar);
        assert!((op.exterior_eval(&u, 2.0, 0.4).unwrap() - c(0.5, 0.0)).norm() < 1e-15);
        assert!(matches!(op.exterior_eval(&u, 0.5, 0.0), Err(Error::Domain { .. })));
    }

    #[test]
    fn exterior_eval_mode_one() {
        // n = 1 term: ũ₁ (R/r)² e^{iθ}; the coupling term vanishes because n − 1 = 0.
        let op = unit_op(1.0);
        let u = single(2, 1, c(1.0, 0.0), Convention::Polar);
        let w = op.exterior_eval(&u, 2.0, 0.7).unwrap();
        assert!((w - Complex64::from_polar(0.25, 0.7)).norm() < 1e-15);
    }

    /// Stress of the exterior field by central differences of its Cartesian form.
    fn fd_stress(op: &DtnOperator, u: &BoundaryField, x: f64, y: f64, h: f64) -> Mat2 {
        let cart = |x: f64, y: f64| {
            let (r, t) = (x.hypot(y), y.atan2(x));
            op.series(u, r, t) * Complex64::from_polar(1.0, t)
        };
        let dx = (cart(x + h, y) - cart(x - h, y)) / (2.0 * h);
        let dy = (cart(x, y + h) - cart(x, y - h)) / (2.0 * h);
        let p = op.params();
        let div = dx.re + dy.im;
        let shear = dy.re + dx.im;
        [
            [p.lambda_e() * div + 2.0 * p.mu() * dx.re, p.mu() * shear],
            [p.mu() * shear, p.lambda_e() * div + 2.0 * p.mu() * dy.im],
        ]
    }

    #[test]
    fn exterior_field_solves_lame() {
        let op = unit_op(1.0);
        let u = single(3, 1, c(1.0, 0.0), Convention::Polar);
        let (x, y) = (2.0 * 0.7f64.cos(), 2.0 * 0.7f64.sin());
        let (h, hs) = (1e-3, 1e-5);
        let sx1 = fd_stress(&op, &u, x + h, y, hs);
        let sx0 = fd_stress(&op, &u, x - h, y, hs);
        let sy1 = fd_stress(&op, &u, x, y + h, hs);
        let sy0 = fd_stress(&op, &u, x, y - h, hs);
        for row in 0..2 {
            let div = (sx1[row][0] - sx0[row][0]) / (2.0 * h) + (sy1[row][1] - sy0[row][1]) / (2.0 * h);
            assert!(div.abs() < 1e-5, "row {row}: {div}");
        }
    }

    #[test]
    fn exterior_field_traction_matches_apply() {
        let p = ElasticParams::new(1.3, 2.0, 0.7).unwrap();
        let op = DtnOperator::new(p, 1.2).unwrap();
        let u = BoundaryField::from_fn(1.2, 4, Convention::Polar, |n| {
            c(0.3 + 0.1 * n as f64, (n as f64 * 1.7).sin())
        })
        .unwrap();
        let expected = op.apply(&u).unwrap();
        let m = 2 * u.order() + 5;
        let r = 1.2;
        let samples: Vec<_> = crate::fourier::sample_angles(m)
            .map(|t| {
                let s = fd_stress(&op, &u, r * t.cos(), r * t.sin(), 1e-5);
                crate::applied::traction_to_polar(&s, t)
            })
            .collect();
        let traction = BoundaryField::analyze(&samples, 1.2, Convention::Polar).unwrap();
        for (n, v) in expected.iter() {
            assert!((traction.coeff(n) - v).norm() < 1e-5, "n = {n}: {} vs {v}", traction.coeff(n));
        }
    }

    #[test]
    fn exterior_decay_rates() {
        let op = unit_op(1.0);
        for n in 0..4i64 {
            let u = single(4, n, c(1.0, 0.0), Convention::Polar);
            for r in [2.0, 4.0, 8.0] {
                let w = op.exterior_eval(&u, r, 0.3).unwrap().norm();
                assert!(w <= 1.0 / r + 1e-15, "mode {n} at r = {r}: {w}");
            }
        }
        for n in 1..5i64 {
            let u = single(4, -n, c(1.0, 0.0), Convention::Polar);
            let rho = op.params().rho_e();
            let bound = 1.0 + (n as f64 - 1.0) / rho;
            for r in [2.0f64, 4.0, 8.0] {
                let w = op.exterior_eval(&u, r, 0.3).unwrap().norm();
                assert!(w <= bound * r.powi(-(n as i32 - 1)) + 1e-15, "mode -{n} at r = {r}: {w}");
            }
        }
    }

    #[test]
    fn hanwu_kills_rigid_translation() {
        let op = unit_op(1.0);
        let u = single(4, 0, c(0.7, -1.1), Convention::Cartesian);
        let t = op.hanwu_apply_default(&u).unwrap();
        assert_eq!(t.max_abs(), 0.0);
    }

    #[test]
    fn hanwu_matches_fourier_on_radial_mode() {
        let op = unit_op(1.0);
        assert_eq!(op.params().eta(), 0.5);
        let polar = single(2, 0, c(1.0, 0.0), Convention::Polar);
        let cart = polar.convert(Convention::Cartesian);
        let hw = op.hanwu_apply_default(&cart).unwrap();
        let fourier = op.apply(&polar).unwrap().convert(Convention::Cartesian);
        for n in -4..=4 {
            assert!((hw.coeff(n) - fourier.coeff(n)).norm() < 1e-8, "n = {n}");
        }
    }

    #[test]
    fn hanwu_rejects_coarse_quadrature() {
        let op = unit_op(1.0);
        let u = single(4, 1, c(1.0, 0.0), Convention::Cartesian);
        assert!(matches!(
            op.hanwu_apply(&u, 16),
            Err(Error::Quadrature { got: 16, required: 17 })
        ));
        assert!(op.hanwu_apply(&u, 17).is_ok());
    }

    fn arb_polar(order: usize) -> impl Strategy<Value = BoundaryField> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2 * order + 1).prop_map(|v| {
            let coeffs = v.into_iter().map(|(a, b)| c(a, b)).collect();
            BoundaryField::from_coeffs(1.3, Convention::Polar, coeffs).unwrap()
        })
    }

    proptest! {
        #[test]
        fn apply_is_linear(u in arb_polar(6), v in arb_polar(6), a in -3.0f64..3.0, b in -3.0f64..3.0) {
            let op = DtnOperator::new(ElasticParams::new(0.9, 1.0, 2.0).unwrap(), 1.3).unwrap();
            let lhs = op.apply(&u.zip_with(&v, |x, y| x * a + y * b).unwrap()).unwrap();
            let (au, av) = (op.apply(&u).unwrap(), op.apply(&v).unwrap());
            let rhs = au.zip_with(&av, |x, y| x * a + y * b).unwrap();
            for (n, val) in lhs.iter() {
                prop_assert!((val - rhs.coeff(n)).norm() <= 1e-13 * (1.0 + val.norm()));
            }
        }

        #[test]
        fn translation_mode_carries_no_traction(u in arb_polar(5)) {
            let op = DtnOperator::new(ElasticParams::new(2.0, 1.0, 0.5).unwrap(), 1.3).unwrap();
            prop_assert_eq!(op.apply(&u).unwrap().coeff(-1), c(0.0, 0.0));
        }

        #[test]
        fn exterior_eval_has_boundary_trace(u in arb_polar(5), theta in 0.0f64..6.28) {
            let op = DtnOperator::new(ElasticParams::new(2.0, 1.0, 0.5).unwrap(), 1.3).unwrap();
            let w = op.exterior_eval(&u, 1.3, theta).unwrap();
            prop_assert!((w - u.synthesize(theta)).norm() <= 1e-12);
        }
    }
}
