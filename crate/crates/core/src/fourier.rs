//! Vector fields on the circle `∂B_R` as truncated complex Fourier series.
//!
//! A planar vector field `w` on the circle is packed into one complex
//! function of the angle. In the polar convention that function is
//! `w_r(θ) + i·w_θ(θ)`, in the Cartesian convention `w_x(θ) + i·w_y(θ)`.
//! Either way the field is stored as the coefficients `c_n`, `|n| ≤ N`, of
//! `Σ c_n e^{inθ}`.
//!
//! Samples always live on the grid `θ_k = 2πk/M`, `k = 0..M`, with no offset.

use std::f64::consts::PI;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default truncation order.
pub const DEFAULT_ORDER: usize = 64;

/// Relative tolerance used when deciding whether two fields live on the same circle.
const RADIUS_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// `w_r + i·w_θ`
    Polar,
    /// `w_x + i·w_y`
    Cartesian,
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Convention::Polar => f.write_str("polar"),
            Convention::Cartesian => f.write_str("cartesian"),
        }
    }
}

impl FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "polar" => Ok(Convention::Polar),
            "cartesian" => Ok(Convention::Cartesian),
            other => Err(Error::Parse(format!("unknown convention `{other}`"))),
        }
    }
}

/// The equispaced sampling angles `2πk/M`.
pub fn sample_angles(m: usize) -> impl Iterator<Item = f64> {
    (0..m).map(move |k| 2.0 * PI * k as f64 / m as f64)
}

/// Truncated Fourier series of a vector field on a circle.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryField {
    radius: f64,
    convention: Convention,
    order: usize,
    /// Dense storage, `coeffs[n + order]` holds `c_n`.
    coeffs: Vec<Complex64>,
}

impl BoundaryField {
    pub fn zeros(radius: f64, order: usize, convention: Convention) -> Result<Self> {
        check_radius(radius)?;
        if order == 0 {
            return Err(Error::Consistency("truncation order must be at least 1".into()));
        }
        Ok(Self {
            radius,
            convention,
            order,
            coeffs: vec![Complex64::new(0.0, 0.0); 2 * order + 1],
        })
    }

    /// Builds a field from `coeffs[k] = c_{k-N}`; the length must be `2N+1` with `N ≥ 1`.
    pub fn from_coeffs(radius: f64, convention: Convention, coeffs: Vec<Complex64>) -> Result<Self> {
        check_radius(radius)?;
        if coeffs.len() < 3 || coeffs.len() % 2 == 0 {
            return Err(Error::Consistency(format!(
                "coefficient vector must have odd length >= 3, got {}",
                coeffs.len()
            )));
        }
        let order = (coeffs.len() - 1) / 2;
        Ok(Self { radius, convention, order, coeffs })
    }

    pub fn from_fn(
        radius: f64,
        order: usize,
        convention: Convention,
        mut f: impl FnMut(i64) -> Complex64,
    ) -> Result<Self> {
        let mut field = Self::zeros(radius, order, convention)?;
        for n in field.indices() {
            *field.coeff_mut(n) = f(n);
        }
        Ok(field)
    }

    /// Estimates `c_n = (1/2π)∫ w(θ) e^{-inθ} dθ` from `M` equispaced samples
    /// with the trapezoid rule (a DFT). Returns order `N = ⌊(M−1)/2⌋`.
    pub fn analyze(samples: &[Complex64], radius: f64, convention: Convention) -> Result<Self> {
        let m = samples.len();
        if m < 3 {
            return Err(Error::InvalidSampling(m));
        }
        if samples.iter().any(|s| !s.re.is_finite() || !s.im.is_finite()) {
            return Err(Error::Consistency("non-finite sample".into()));
        }
        let order = (m - 1) / 2;
        let mut buf = samples.to_vec();
        FftPlanner::new().plan_fft_forward(m).process(&mut buf);
        let scale = 1.0 / m as f64;
        Self::from_fn(radius, order, convention, |n| {
            buf[n.rem_euclid(m as i64) as usize] * scale
        })
    }

    /// `Σ_{|n|≤N} c_n e^{inθ}`.
    pub fn synthesize(&self, theta: f64) -> Complex64 {
        self.iter()
            .map(|(n, c)| c * Complex64::from_polar(1.0, n as f64 * theta))
            .sum()
    }

    /// Values at the `M` equispaced angles.
    pub fn sample(&self, m: usize) -> Vec<Complex64> {
        sample_angles(m).map(|t| self.synthesize(t)).collect()
    }

    /// Re-expresses the field in the other component convention.
    ///
    /// Pointwise `w_x + i·w_y = e^{iθ}(w_r + i·w_θ)`, so polar `c_n` becomes
    /// Cartesian `c_{n+1}`. The order grows by one so no coefficient is lost.
    pub fn convert(&self, target: Convention) -> BoundaryField {
        if target == self.convention {
            return self.clone();
        }
        let shift: i64 = match target {
            Convention::Cartesian => 1,
            Convention::Polar => -1,
        };
        let order = self.order + 1;
        let mut out = Self {
            radius: self.radius,
            convention: target,
            order,
            coeffs: vec![Complex64::new(0.0, 0.0); 2 * order + 1],
        };
        for (n, c) in self.iter() {
            *out.coeff_mut(n + shift) = c;
        }
        out
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `c_n`, or zero when `|n| > N`.
    pub fn coeff(&self, n: i64) -> Complex64 {
        if n.unsigned_abs() as usize > self.order {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(n + self.order as i64) as usize]
        }
    }

    /// Panics if `|n| > N`.
    pub fn coeff_mut(&mut self, n: i64) -> &mut Complex64 {
        assert!(
            n.unsigned_abs() as usize <= self.order,
            "index {n} outside truncation order {}",
            self.order
        );
        &mut self.coeffs[(n + self.order as i64) as usize]
    }

    pub fn indices(&self) -> std::ops::RangeInclusive<i64> {
        -(self.order as i64)..=self.order as i64
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.indices().zip(self.coeffs.iter().copied())
    }

    /// Same field padded with zeros or truncated to order `order`.
    pub fn with_order(&self, order: usize) -> Result<Self> {
        Self::from_fn(self.radius, order, self.convention, |n| self.coeff(n))
    }

    pub fn map(&self, mut f: impl FnMut(i64, Complex64) -> Complex64) -> Self {
        let mut out = self.clone();
        for (n, c) in self.iter() {
            *out.coeff_mut(n) = f(n, c);
        }
        out
    }

    pub fn scaled(&self, s: f64) -> Self {
        self.map(|_, c| c * s)
    }

    /// Coefficient-wise combination of two fields on the same circle and in
    /// the same convention; the result has the larger of the two orders.
    pub fn zip_with(
        &self,
        other: &BoundaryField,
        mut f: impl FnMut(Complex64, Complex64) -> Complex64,
    ) -> Result<Self> {
        self.check_compatible(other)?;
        let order = self.order.max(other.order);
        Self::from_fn(self.radius, order, self.convention, |n| f(self.coeff(n), other.coeff(n)))
    }

    pub fn add(&self, other: &BoundaryField) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &BoundaryField) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn check_compatible(&self, other: &BoundaryField) -> Result<()> {
        if !same_radius(self.radius, other.radius) {
            return Err(Error::Geometry(format!(
                "radius mismatch: {} vs {}",
                self.radius, other.radius
            )));
        }
        if self.convention != other.convention {
            return Err(Error::Convention { expected: self.convention, got: other.convention });
        }
        Ok(())
    }

    pub fn require(&self, convention: Convention) -> Result<()> {
        if self.convention != convention {
            return Err(Error::Convention { expected: convention, got: self.convention });
        }
        Ok(())
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `(Σ|c_n|²)^{1/2}`, which by Parseval is the RMS of the field over the circle.
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Writes the line-oriented text record: `radius`, `convention` and
    /// `order` header lines followed by `2N+1` lines `n re im`.
    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "radius {:e}", self.radius)?;
        writeln!(w, "convention {}", self.convention)?;
        writeln!(w, "order {}", self.order)?;
        for (n, c) in self.iter() {
            writeln!(w, "{} {:e} {:e}", n, c.re, c.im)?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_text(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("record is ASCII")
    }

    pub fn read_text<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let mut header = |key: &str| -> Result<String> {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("missing `{key}` line")))??;
            let mut parts = line.split_whitespace();
            match (parts.next(), parts.next(), parts.next()) {
                (Some(k), Some(v), None) if k == key => Ok(v.to_string()),
                _ => Err(Error::Parse(format!("expected `{key} <value>`, got `{line}`"))),
            }
        };
        let radius: f64 = parse_num(&header("radius")?)?;
        let convention: Convention = header("convention")?.parse()?;
        let order: usize = parse_num(&header("order")?)?;

        let mut field = Self::zeros(radius, order, convention)?;
        let mut seen = 0usize;
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            let [n, re, im] = parts[..] else {
                return Err(Error::Parse(format!("expected `n re im`, got `{line}`")));
            };
            let n: i64 = parse_num(n)?;
            let expected = seen as i64 - order as i64;
            if n != expected {
                return Err(Error::Parse(format!("expected index {expected}, got {n}")));
            }
            *field.coeff_mut(n) = Complex64::new(parse_num(re)?, parse_num(im)?);
            seen += 1;
        }
        if seen != 2 * order + 1 {
            return Err(Error::Parse(format!(
                "expected {} coefficient lines, got {seen}",
                2 * order + 1
            )));
        }
        Ok(field)
    }
}

pub(crate) fn same_radius(a: f64, b: f64) -> bool {
    (a - b).abs() <= RADIUS_RTOL * a.abs().max(b.abs())
}

fn check_radius(radius: f64) -> Result<()> {
    if radius > 0.0 && radius.is_finite() {
        Ok(())
    } else {
        Err(Error::Geometry(format!("radius must be positive and finite, got {radius}")))
    }
}

fn parse_num<T: FromStr>(s: &str) -> Result<T> {
    s.parse().map_err(|_| Error::Parse(format!("bad number `{s}`")))
}
