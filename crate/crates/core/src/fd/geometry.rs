use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shape of the inclusion `D`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum InclusionGeometry {
    ConcentricDisk {
        radius: f64,
    },
    EccentricDisk {
        center: [f64; 2],
        radius: f64,
    },
    Ellipse {
        center: [f64; 2],
        semi_axes: [f64; 2],
        /// Rotation of the first semi-axis from the x axis, in radians.
        #[serde(default)]
        angle: f64,
    },
}

impl InclusionGeometry {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        match *self {
            Self::ConcentricDisk { radius } => x * x + y * y < radius * radius,
            Self::EccentricDisk { center, radius } => {
                let (dx, dy) = (x - center[0], y - center[1]);
                dx * dx + dy * dy < radius * radius
            }
            Self::Ellipse { center, semi_axes, angle } => {
                let (dx, dy) = (x - center[0], y - center[1]);
                let (s, c) = angle.sin_cos();
                let p = (c * dx + s * dy) / semi_axes[0];
                let q = (-s * dx + c * dy) / semi_axes[1];
                p * p + q * q < 1.0
            }
        }
    }

    pub fn exact_area(&self) -> f64 {
        match *self {
            Self::ConcentricDisk { radius } | Self::EccentricDisk { radius, .. } => PI * radius * radius,
            Self::Ellipse { semi_axes, .. } => PI * semi_axes[0] * semi_axes[1],
        }
    }

    /// Radius of a centered disk containing `D`.
    pub fn bounding_radius(&self) -> f64 {
        match *self {
            Self::ConcentricDisk { radius } => radius,
            Self::EccentricDisk { center, radius } => center[0].hypot(center[1]) + radius,
            Self::Ellipse { center, semi_axes, .. } => {
                center[0].hypot(center[1]) + semi_axes[0].max(semi_axes[1])
            }
        }
    }

    pub fn is_concentric(&self) -> bool {
        matches!(self, Self::ConcentricDisk { .. })
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Self::ConcentricDisk { radius } => radius > 0.0 && radius.is_finite(),
            Self::EccentricDisk { center, radius } => {
                radius > 0.0 && radius.is_finite() && center.iter().all(|c| c.is_finite())
            }
            Self::Ellipse { center, semi_axes, angle } => {
                semi_axes.iter().all(|&s| s > 0.0 && s.is_finite())
                    && center.iter().all(|c| c.is_finite())
                    && angle.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Geometry(format!("invalid inclusion {self:?}")))
        }
    }

    /// `D` must sit strictly inside `B_R` with at least two cells to spare.
    pub fn check_margin(&self, body_radius: f64, h: f64) -> Result<()> {
        self.validate()?;
        let reach = self.bounding_radius() + 2.0 * h;
        if reach > body_radius {
            return Err(Error::Geometry(format!(
                "inclusion reaches {} (with a two-cell margin), beyond the body radius {body_radius}",
                reach
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn membership_and_area() {
        let d = InclusionGeometry::EccentricDisk { center: [0.2, 0.0], radius: 0.3 };
        assert!(d.contains(0.45, 0.0));
        assert!(!d.contains(-0.15, 0.0));
        assert!((d.exact_area() - 0.09 * PI).abs() < 1e-15);
        assert!((d.bounding_radius() - 0.5).abs() < 1e-15);

        let e = InclusionGeometry::Ellipse { center: [0.0, 0.0], semi_axes: [0.5, 0.2], angle: PI / 2.0 };
        assert!(e.contains(0.0, 0.45));
        assert!(!e.contains(0.45, 0.0));
        assert!((e.exact_area() - 0.1 * PI).abs() < 1e-15);
    }

    #[test]
    fn margin_check() {
        let d = InclusionGeometry::ConcentricDisk { radius: 0.9 };
        assert!(d.check_margin(1.0, 0.01).is_ok());
        assert!(d.check_margin(1.0, 0.06).is_err());
        assert!(InclusionGeometry::ConcentricDisk { radius: -1.0 }.check_margin(1.0, 0.01).is_err());
    }

    #[test]
    fn sampled_area_converges() {
        let e = InclusionGeometry::Ellipse { center: [0.1, -0.1], semi_axes: [0.4, 0.25], angle: 0.3 };
        let n = 800;
        let h = 2.0 / n as f64;
        let mut count = 0usize;
        for j in 0..n {
            for i in 0..n {
                let (x, y) = (-1.0 + (i as f64 + 0.5) * h, -1.0 + (j as f64 + 0.5) * h);
                count += e.contains(x, y) as usize;
            }
        }
        let area = count as f64 * h * h;
        assert!((area - e.exact_area()).abs() / e.exact_area() < 2e-3);
    }

    #[test]
    fn serde_tagging() {
        let d: InclusionGeometry =
            serde_json::from_str(r#"{"shape":"eccentric_disk","center":[0.2,0.0],"radius":0.3}"#).unwrap();
        assert_eq!(d, InclusionGeometry::EccentricDisk { center: [0.2, 0.0], radius: 0.3 });
    }
}
