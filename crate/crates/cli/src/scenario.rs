//! Scenario files.
//!
//! A scenario is a TOML document with a `schema_version` key and one section
//! per concern. See the README for an annotated example.

use std::path::{Path, PathBuf};

use incvol_core::{AppliedField, Complex64, ElasticParams, FdOptions, HarmonicMode, InclusionGeometry};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Analytic,
    Fd,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialSection {
    pub mu: f64,
    pub lambda1: f64,
    pub lambda2: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodySection {
    #[serde(default = "one")]
    pub radius: f64,
}

impl Default for BodySection {
    fn default() -> Self {
        Self { radius: 1.0 }
    }
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AppliedSection {
    pub c_g: f64,
    /// `[n, re, im]` triples.
    #[serde(default)]
    pub modes: Vec<(u32, f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub kind: SolverKind,
    #[serde(default = "default_order")]
    pub order: usize,
    pub h: Option<f64>,
    pub r_inf: Option<f64>,
    pub stretch: Option<f64>,
    pub core_half_width: Option<f64>,
}

fn default_order() -> usize {
    incvol_core::fourier::DEFAULT_ORDER
}

#[derive(Debug, Clone, PartialEq, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceSection {
    #[serde(default)]
    pub h: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
}

impl Default for NoiseSection {
    fn default() -> Self {
        Self { amplitude: default_amplitude(), trials: default_trials(), seed: 0 }
    }
}

fn default_amplitude() -> f64 {
    1e-3
}

fn default_trials() -> usize {
    100
}

#[derive(Debug, Clone, PartialEq, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
    /// Also write the grid displacement as a binary record (fd only).
    #[serde(default)]
    pub dump_grid: bool,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    schema_version: u32,
    material: MaterialSection,
    #[serde(default)]
    body: BodySection,
    geometry: InclusionGeometry,
    applied_field: AppliedSection,
    solver: SolverSection,
    #[serde(default)]
    convergence: ConvergenceSection,
    #[serde(default)]
    noise: NoiseSection,
    #[serde(default)]
    output: OutputSection,
}

/// A validated scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub params: ElasticParams,
    pub body_radius: f64,
    pub geometry: InclusionGeometry,
    pub applied: AppliedField,
    pub solver: SolverKind,
    pub order: usize,
    pub fd: Option<FdOptions>,
    pub convergence_h: Vec<f64>,
    pub noise: NoiseSection,
    pub output: OutputSection,
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let raw: RawScenario = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        if raw.schema_version != SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                raw.schema_version
            )));
        }
        let m = &raw.material;
        let params = ElasticParams::new(m.mu, m.lambda1, m.lambda2)?;
        let modes = raw
            .applied_field
            .modes
            .iter()
            .map(|&(n, re, im)| HarmonicMode { n, amplitude: Complex64::new(re, im) })
            .collect();
        let applied = AppliedField::new(raw.applied_field.c_g, modes)?;

        let body_radius = raw.body.radius;
        if !(body_radius > 0.0 && body_radius.is_finite()) {
            return Err(CliError::Config(format!("body radius must be positive, got {body_radius}")));
        }
        raw.geometry.validate()?;
        if !(raw.geometry.bounding_radius() < body_radius) {
            return Err(CliError::Config("inclusion must lie strictly inside the body".into()));
        }
        let s = &raw.solver;
        if s.order == 0 {
            return Err(CliError::Config("solver.order must be at least 1".into()));
        }
        if (applied.max_degree() as usize) > s.order {
            return Err(CliError::Config(format!(
                "applied mode of degree {} exceeds the truncation order {}",
                applied.max_degree(),
                s.order
            )));
        }
        let fd = match (s.h, s.r_inf) {
            (Some(h), Some(r_inf)) => {
                let mut o = FdOptions::new(h, r_inf).with_body_radius(body_radius);
                if let Some(q) = s.stretch {
                    o = o.with_stretch(q);
                }
                o.core_half_width = s.core_half_width;
                o.validate()?;
                Some(o)
            }
            (None, None) => None,
            _ => return Err(CliError::Config("solver.h and solver.r_inf go together".into())),
        };
        match s.kind {
            SolverKind::Analytic if !raw.geometry.is_concentric() => {
                return Err(CliError::Config("the analytic solver needs a concentric_disk geometry".into()))
            }
            SolverKind::Fd if fd.is_none() => {
                return Err(CliError::Config("the fd solver needs solver.h and solver.r_inf".into()))
            }
            _ => {}
        }
        if raw.convergence.h.iter().any(|&h| !(h > 0.0)) {
            return Err(CliError::Config("convergence.h entries must be positive".into()));
        }
        if !(raw.noise.amplitude >= 0.0 && raw.noise.amplitude.is_finite()) || raw.noise.trials < 2 {
            return Err(CliError::Config("noise needs amplitude >= 0 and at least 2 trials".into()));
        }
        Ok(Self {
            params,
            body_radius,
            geometry: raw.geometry,
            applied,
            solver: s.kind,
            order: s.order,
            fd,
            convergence_h: raw.convergence.h,
            noise: raw.noise,
            output: raw.output,
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// `|D|/|Ω|` of the configured geometry.
    pub fn true_fraction(&self) -> f64 {
        incvol_core::fd::true_fraction(&self.geometry, self.body_radius)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub const WORKED: &str = r#"
schema_version = 1

[material]
mu = 1.0
lambda1 = 3.0
lambda2 = 1.0

[geometry]
shape = "concentric_disk"
radius = 0.5

[applied_field]
c_g = 1.0
modes = [[2, 0.5, -0.25]]

[solver]
kind = "analytic"
order = 8
"#;

    #[test]
    fn parses_worked_scenario() {
        let s = Scenario::from_toml(WORKED).unwrap();
        assert_eq!(s.solver, SolverKind::Analytic);
        assert_eq!(s.order, 8);
        assert_eq!(s.body_radius, 1.0);
        assert_eq!(s.applied.modes().len(), 1);
        assert!((s.true_fraction() - 0.25).abs() < 1e-15);
        assert_eq!(s.noise.trials, 100);
    }

    #[test]
    fn rejects_schema_and_shape_errors() {
        let bad_version = WORKED.replace("schema_version = 1", "schema_version = 2");
        assert!(matches!(Scenario::from_toml(&bad_version), Err(CliError::Config(_))));

        let ecc = WORKED.replace(
            "shape = \"concentric_disk\"\nradius = 0.5",
            "shape = \"eccentric_disk\"\ncenter = [0.2, 0.0]\nradius = 0.3",
        );
        assert!(matches!(Scenario::from_toml(&ecc), Err(CliError::Config(_))));

        let unknown = WORKED.replace("[solver]", "[solver]\ntolerance = 1.0");
        assert!(matches!(Scenario::from_toml(&unknown), Err(CliError::Config(_))));

        let high_mode = WORKED.replace("[[2, 0.5, -0.25]]", "[[9, 1.0, 0.0]]");
        assert!(matches!(Scenario::from_toml(&high_mode), Err(CliError::Config(_))));
    }

    #[test]
    fn degenerate_field_has_its_own_class() {
        let s = WORKED.replace("c_g = 1.0", "c_g = 0.0");
        assert!(matches!(Scenario::from_toml(&s), Err(CliError::Core(incvol_core::Error::DegenerateField))));
    }

    #[test]
    fn fd_requires_grid_options() {
        let s = WORKED.replace("kind = \"analytic\"", "kind = \"fd\"");
        assert!(matches!(Scenario::from_toml(&s), Err(CliError::Config(_))));
        let s = s.replace("order = 8", "order = 8\nh = 0.0625\nr_inf = 8.0");
        let parsed = Scenario::from_toml(&s).unwrap();
        assert_eq!(parsed.fd.unwrap().stretch, 1.08);
    }
}
