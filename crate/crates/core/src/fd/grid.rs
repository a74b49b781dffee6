use crate::error::{Error, Result};

/// Symmetric 1-D tensor axis: uniform spacing `h` on a core `[-c, c]`, then
/// geometrically growing cells out to the far boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    nodes: Vec<f64>,
    centers: Vec<f64>,
    h: f64,
    core_half: f64,
}

impl Axis {
    /// The outermost node lies one cell beyond `extent`.
    pub fn graded(h: f64, core_half: f64, extent: f64, stretch: f64) -> Result<Self> {
        if !(h > 0.0 && core_half > 0.0 && extent > core_half) {
            return Err(Error::Geometry(format!(
                "axis needs 0 < h, 0 < core ({core_half}) < extent ({extent}), got h = {h}"
            )));
        }
        if !(1.0..=1.5).contains(&stretch) {
            return Err(Error::InvalidParameters(format!("stretch ratio {stretch} outside [1, 1.5]")));
        }
        let k = (core_half / h - 1e-9).ceil() as usize;
        let mut half: Vec<f64> = (0..=k).map(|i| i as f64 * h).collect();
        let mut step = h;
        let mut beyond = 0;
        while beyond < 2 {
            step *= stretch;
            let next = half.last().unwrap() + step;
            half.push(next);
            if next > extent {
                beyond += 1;
            }
        }
        let mut nodes: Vec<f64> = half.iter().rev().map(|x| -x).collect();
        nodes.extend_from_slice(&half[1..]);
        let centers = nodes.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        Ok(Self { nodes, centers, h, core_half: k as f64 * h })
    }

    pub fn cells(&self) -> usize {
        self.centers.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    /// Spacing of the uniform core.
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn core_half(&self) -> f64 {
        self.core_half
    }

    pub fn width(&self, i: usize) -> f64 {
        self.nodes[i + 1] - self.nodes[i]
    }

    /// Distance between centers `i−1` and `i`.
    pub fn dual_width(&self, i: usize) -> f64 {
        self.centers[i] - self.centers[i - 1]
    }

    pub fn outer(&self) -> f64 {
        *self.nodes.last().unwrap()
    }
}

/// Interval index and fraction of `x` in a sorted coordinate list.
pub(crate) fn locate(coords: &[f64], x: f64) -> Option<(usize, f64)> {
    let n = coords.len();
    if n < 2 || !(x >= coords[0] && x <= coords[n - 1]) {
        return None;
    }
    let i = coords.partition_point(|&c| c <= x).clamp(1, n - 1) - 1;
    Some((i, (x - coords[i]) / (coords[i + 1] - coords[i])))
}

/// Bilinear interpolation of `values[j·xs.len() + i]` sampled at `(xs[i], ys[j])`.
pub(crate) fn bilinear(xs: &[f64], ys: &[f64], values: &[f64], x: f64, y: f64) -> Option<f64> {
    let (i, s) = locate(xs, x)?;
    let (j, t) = locate(ys, y)?;
    let w = xs.len();
    let v = |i: usize, j: usize| values[j * w + i];
    Some(
        (1.0 - s) * (1.0 - t) * v(i, j)
            + s * (1.0 - t) * v(i + 1, j)
            + (1.0 - s) * t * v(i, j + 1)
            + s * t * v(i + 1, j + 1),
    )
}
