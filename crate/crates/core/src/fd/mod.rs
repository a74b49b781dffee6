//! Finite-difference oracle for the full-space transmission problem.
//!
//! The plane is truncated to the disk `r < R_inf` where `u = ∇g` is imposed,
//! and the Lamé system is discretized on a staggered (MAC) tensor grid:
//! `u_x` lives on vertical cell faces, `u_y` on horizontal faces, `λ` is
//! constant per cell. The stiffness matrix is the Hessian of the discrete
//! strain energy
//!
//! ```text
//! E = ½ Σ_cells A [λ (∇·u)² + 2μ (ε_xx² + ε_yy²)] + ½ Σ_nodes A μ γ²
//! ```
//!
//! with `γ = ∂_y u_x + ∂_x u_y` at cell corners, so the system is symmetric
//! positive definite and is factored by a sparse Cholesky decomposition.
//! The grid has a uniform core of spacing `h` around `B_R` and grows
//! geometrically towards `R_inf`.

mod dump;
mod geometry;
mod grid;

use std::f64::consts::PI;

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, SymbolicSparseColMat};
use faer::{Mat, Par, Side};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::applied::{traction_to_polar, AppliedField};
use crate::error::{Error, Result};
use crate::fourier::{sample_angles, BoundaryField, Convention};
use crate::params::ElasticParams;

pub use dump::{read_dump_header, DumpHeader, DUMP_MAGIC, DUMP_VERSION};
pub use geometry::InclusionGeometry;
pub use grid::Axis;

const RELATIVE_TOLERANCE: f64 = 1e-10;
const REFINEMENT_STEPS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdOptions {
    /// Spacing of the uniform core.
    pub h: f64,
    /// Radius of the Dirichlet truncation circle.
    pub r_inf: f64,
    /// Radius `R` of the body `Ω = B_R`.
    #[serde(default = "default_body_radius")]
    pub body_radius: f64,
    /// Half width of the uniform core; defaults to `1.25·R`.
    #[serde(default)]
    pub core_half_width: Option<f64>,
    /// Growth ratio of neighbouring cells outside the core.
    #[serde(default = "default_stretch")]
    pub stretch: f64,
}

fn default_body_radius() -> f64 {
    1.0
}

fn default_stretch() -> f64 {
    1.08
}

impl FdOptions {
    pub fn new(h: f64, r_inf: f64) -> Self {
        Self { h, r_inf, body_radius: 1.0, core_half_width: None, stretch: default_stretch() }
    }

    pub fn with_body_radius(mut self, r: f64) -> Self {
        self.body_radius = r;
        self
    }

    pub fn with_stretch(mut self, q: f64) -> Self {
        self.stretch = q;
        self
    }

    pub fn core_half(&self) -> f64 {
        self.core_half_width.unwrap_or(1.25 * self.body_radius)
    }

    pub fn validate(&self) -> Result<()> {
        let r = self.body_radius;
        if !(self.h > 0.0 && self.h.is_finite() && r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidParameters(format!(
                "grid spacing {} and body radius {r} must be positive",
                self.h
            )));
        }
        if !(self.r_inf >= 5.0 * r) {
            return Err(Error::Geometry(format!(
                "truncation radius {} must be at least 5R = {}",
                self.r_inf,
                5.0 * r
            )));
        }
        let core = self.core_half();
        if !(core >= r + 2.0 * self.h && core < self.r_inf) {
            return Err(Error::Geometry(format!(
                "uniform core half width {core} must cover R + 2h and stay inside R_inf"
            )));
        }
        Ok(())
    }
}

/// Unknown layout on an `n × n` cell grid.
#[derive(Debug, Clone, Copy)]
struct Layout {
    n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dof {
    /// `u_x` on the face at `(x_nodes[i], y_centers[j])`.
    Ux(usize, usize),
    /// `u_y` on the face at `(x_centers[i], y_nodes[j])`.
    Uy(usize, usize),
}

impl Layout {
    fn n_ux(&self) -> usize {
        (self.n + 1) * self.n
    }

    fn len(&self) -> usize {
        2 * self.n_ux()
    }

    fn ux(&self, i: usize, j: usize) -> usize {
        j * (self.n + 1) + i
    }

    fn uy(&self, i: usize, j: usize) -> usize {
        self.n_ux() + j * self.n + i
    }

    fn decode(&self, k: usize) -> Dof {
        if k < self.n_ux() {
            Dof::Ux(k % (self.n + 1), k / (self.n + 1))
        } else {
            let k = k - self.n_ux();
            Dof::Uy(k % self.n, k / self.n)
        }
    }
}

/// One squared linear functional `w·(Σ c_k u_k)²` of the energy.
struct Term {
    w: f64,
    e: [(usize, f64); 4],
    len: usize,
}

impl Term {
    fn entries(&self) -> &[(usize, f64)] {
        &self.e[..self.len]
    }
}

struct Assembler<'a> {
    layout: Layout,
    axis: &'a Axis,
    mu: f64,
    cell_lambda: &'a [f64],
}

impl Assembler<'_> {
    fn cell_terms(&self, i: usize, j: usize, out: &mut Vec<Term>) {
        let (l, a) = (self.layout, self.axis);
        let (dx, dy) = (a.width(i), a.width(j));
        let area = dx * dy;
        let (xl, xr) = (l.ux(i, j), l.ux(i + 1, j));
        let (yb, yt) = (l.uy(i, j), l.uy(i, j + 1));
        let pad = (0, 0.0);
        out.push(Term { w: 2.0 * self.mu * area, e: [(xr, 1.0 / dx), (xl, -1.0 / dx), pad, pad], len: 2 });
        out.push(Term { w: 2.0 * self.mu * area, e: [(yt, 1.0 / dy), (yb, -1.0 / dy), pad, pad], len: 2 });
        out.push(Term {
            w: self.cell_lambda[j * l.n + i] * area,
            e: [(xr, 1.0 / dx), (xl, -1.0 / dx), (yt, 1.0 / dy), (yb, -1.0 / dy)],
            len: 4,
        });
    }

    /// Shear term at the interior node `(x_nodes[i], y_nodes[j])`.
    fn node_term(&self, i: usize, j: usize, out: &mut Vec<Term>) {
        let (l, a) = (self.layout, self.axis);
        let (dxc, dyc) = (a.dual_width(i), a.dual_width(j));
        out.push(Term {
            w: self.mu * dxc * dyc,
            e: [
                (l.ux(i, j), 1.0 / dyc),
                (l.ux(i, j - 1), -1.0 / dyc),
                (l.uy(i, j), 1.0 / dxc),
                (l.uy(i - 1, j), -1.0 / dxc),
            ],
            len: 4,
        });
    }

    fn terms_touching(&self, k: usize, out: &mut Vec<Term>) {
        let n = self.layout.n;
        let interior = |v: usize| v >= 1 && v < n;
        match self.layout.decode(k) {
            Dof::Ux(i, j) => {
                if i >= 1 {
                    self.cell_terms(i - 1, j, out);
                }
                if i < n {
                    self.cell_terms(i, j, out);
                }
                if interior(i) {
                    if j >= 1 {
                        self.node_term(i, j, out);
                    }
                    if interior(j + 1) {
                        self.node_term(i, j + 1, out);
                    }
                }
            }
            Dof::Uy(i, j) => {
                if j >= 1 {
                    self.cell_terms(i, j - 1, out);
                }
                if j < n {
                    self.cell_terms(i, j, out);
                }
                if interior(j) {
                    if i >= 1 {
                        self.node_term(i, j, out);
                    }
                    if interior(i + 1) {
                        self.node_term(i + 1, j, out);
                    }
                }
            }
        }
    }

    /// Row `k` of the stiffness matrix, sorted by column.
    fn row(&self, k: usize) -> Vec<(usize, f64)> {
        let mut terms = Vec::with_capacity(16);
        self.terms_touching(k, &mut terms);
        let mut row: Vec<(usize, f64)> = Vec::with_capacity(24);
        for t in &terms {
            let own: f64 = t.entries().iter().filter(|e| e.0 == k).map(|e| e.1).sum();
            for &(col, c) in t.entries() {
                row.push((col, t.w * own * c));
            }
        }
        row.sort_by_key(|e| e.0);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(row.len());
        for (col, v) in row {
            match merged.last_mut() {
                Some(last) if last.0 == col => last.1 += v,
                _ => merged.push((col, v)),
            }
        }
        merged
    }
}

/// Per-phase statistics of a cell field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseStats {
    pub mean: f64,
    pub std: f64,
    pub cells: usize,
}

impl PhaseStats {
    fn of(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Self { mean: f64::NAN, std: f64::NAN, cells: 0 };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
        Self { mean, std: var.sqrt(), cells: n }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DilatationStats {
    pub inclusion: PhaseStats,
    pub matrix: PhaseStats,
}

#[derive(Debug, Clone)]
pub struct GridSolution {
    axis: Axis,
    ux: Vec<f64>,
    uy: Vec<f64>,
    /// Scattered part `u − ∇g` on the same faces.
    wx: Vec<f64>,
    wy: Vec<f64>,
    inside: Vec<bool>,
    params: ElasticParams,
    af: AppliedField,
    geometry: InclusionGeometry,
    options: FdOptions,
    free_dofs: usize,
    relative_residual: f64,
}

/// Solves the truncated transmission problem on a graded staggered grid.
///
/// The factorization runs with faer's parallelism set to sequential, so the
/// result does not depend on the thread count.
pub fn solve_fd(
    geometry: &InclusionGeometry,
    params: &ElasticParams,
    af: &AppliedField,
    options: &FdOptions,
) -> Result<GridSolution> {
    options.validate()?;
    geometry.check_margin(options.body_radius, options.h)?;
    let axis = Axis::graded(options.h, options.core_half(), options.r_inf, options.stretch)?;
    let n = axis.cells();
    let layout = Layout { n };
    let (xn, xc) = (axis.nodes(), axis.centers());

    let inside: Vec<bool> =
        (0..n * n).into_par_iter().map(|k| geometry.contains(xc[k % n], xc[k / n])).collect();
    let cell_lambda: Vec<f64> = inside.iter().map(|&b| params.lambda(b)).collect();

    let position = |k: usize| match layout.decode(k) {
        Dof::Ux(i, j) => (xn[i], xc[j]),
        Dof::Uy(i, j) => (xc[i], xn[j]),
    };
    let r_inf2 = options.r_inf * options.r_inf;
    let mut free_index = vec![usize::MAX; layout.len()];
    let mut free = Vec::new();
    for k in 0..layout.len() {
        let (x, y) = position(k);
        if x * x + y * y < r_inf2 {
            free_index[k] = free.len();
            free.push(k);
        }
    }
    // Split u = ∇g + w. Only the λ contrast on inclusion cells forces w, so
    // the graded cells add no consistency error for the harmonic part of g.
    let incident: Vec<f64> = (0..layout.len())
        .into_par_iter()
        .map(|k| {
            let (x, y) = position(k);
            let g = af.gradient(x, y);
            match layout.decode(k) {
                Dof::Ux(..) => g.re,
                Dof::Uy(..) => g.im,
            }
        })
        .collect();
    let jump = params.lambda1() - params.lambda2();
    let contrast_lambda: Vec<f64> = inside.iter().map(|&b| if b { jump } else { 0.0 }).collect();

    let asm = Assembler { layout, axis: &axis, mu: params.mu(), cell_lambda: &cell_lambda };
    let contrast = Assembler { layout, axis: &axis, mu: 0.0, cell_lambda: &contrast_lambda };
    let rows: Vec<(Vec<(usize, f64)>, f64)> = free
        .par_iter()
        .map(|&k| {
            let me = free_index[k];
            let lower = asm.row(k).into_iter().filter_map(|(col, v)| match free_index[col] {
                c if c != usize::MAX && c >= me => Some((c, v)),
                _ => None,
            });
            let lower: Vec<(usize, f64)> = lower.collect();
            let rhs = -contrast.row(k).into_iter().map(|(col, v)| v * incident[col]).sum::<f64>();
            (lower, rhs)
        })
        .collect();

    let nfree = free.len();
    let mut col_ptr = Vec::with_capacity(nfree + 1);
    let nnz: usize = rows.iter().map(|r| r.0.len()).sum();
    let mut row_idx = Vec::with_capacity(nnz);
    let mut values = Vec::with_capacity(nnz);
    let mut rhs = Mat::<f64>::zeros(nfree, 1);
    col_ptr.push(0usize);
    for (c, (lower, b)) in rows.into_iter().enumerate() {
        for (r, v) in lower {
            row_idx.push(r);
            values.push(v);
        }
        col_ptr.push(row_idx.len());
        rhs[(c, 0)] = b;
    }
    let symbolic = SymbolicSparseColMat::new_checked(nfree, nfree, col_ptr, None, row_idx);
    let matrix = SparseColMat::new(symbolic, values);

    faer::set_global_parallelism(Par::Seq);
    let llt = matrix.sp_cholesky(Side::Lower).map_err(|e| Error::SolverFailure {
        dofs: nfree,
        reason: format!("sparse Cholesky factorization failed: {e}"),
    })?;
    let mut x = llt.solve(&rhs);
    let b_norm = rhs.norm_l2().max(f64::MIN_POSITIVE);
    let mut residual = symmetric_residual(&matrix, &x, &rhs);
    let mut rel = residual.norm_l2() / b_norm;
    for _ in 0..REFINEMENT_STEPS {
        if rel <= RELATIVE_TOLERANCE {
            break;
        }
        let dx = llt.solve(&residual);
        x += dx;
        residual = symmetric_residual(&matrix, &x, &rhs);
        rel = residual.norm_l2() / b_norm;
    }
    if !(rel <= RELATIVE_TOLERANCE) {
        return Err(Error::SolverFailure {
            dofs: nfree,
            reason: format!("relative residual {rel:e} above {RELATIVE_TOLERANCE:e} after refinement"),
        });
    }

    let mut w = vec![0.0; layout.len()];
    for (f, &k) in free.iter().enumerate() {
        w[k] = x[(f, 0)];
    }
    let mut u: Vec<f64> = incident.iter().zip(&w).map(|(s, w)| s + w).collect();
    let uy = u.split_off(layout.n_ux());
    let wy = w.split_off(layout.n_ux());
    Ok(GridSolution {
        axis,
        ux: u,
        uy,
        wx: w,
        wy,
        inside,
        params: *params,
        af: af.clone(),
        geometry: *geometry,
        options: *options,
        free_dofs: nfree,
        relative_residual: rel,
    })
}

/// `b − A·x` for `A` stored as its lower triangle.
fn symmetric_residual(a: &SparseColMat<usize, f64>, x: &Mat<f64>, b: &Mat<f64>) -> Mat<f64> {
    let mut r = b.clone();
    let (sym, vals) = a.parts();
    let col_ptr = sym.col_ptr();
    let row_idx = sym.row_idx();
    for c in 0..a.ncols() {
        for p in col_ptr[c]..col_ptr[c + 1] {
            let (row, v) = (row_idx[p], vals[p]);
            r[(row, 0)] -= v * x[(c, 0)];
            if row != c {
                r[(c, 0)] -= v * x[(row, 0)];
            }
        }
    }
    r
}

impl GridSolution {
    pub fn axis(&self) -> &Axis {
        &self.axis
    }

    pub fn h(&self) -> f64 {
        self.axis.h()
    }

    pub fn r_inf(&self) -> f64 {
        self.options.r_inf
    }

    pub fn options(&self) -> &FdOptions {
        &self.options
    }

    pub fn params(&self) -> &ElasticParams {
        &self.params
    }

    pub fn applied(&self) -> &AppliedField {
        &self.af
    }

    pub fn geometry(&self) -> &InclusionGeometry {
        &self.geometry
    }

    pub fn free_dofs(&self) -> usize {
        self.free_dofs
    }

    /// `‖b − Ax‖/‖b‖` of the final iterate.
    pub fn relative_residual(&self) -> f64 {
        self.relative_residual
    }

    pub fn cells(&self) -> usize {
        self.axis.cells()
    }

    /// Staircase area of the sampled inclusion.
    pub fn discrete_area(&self) -> f64 {
        let n = self.cells();
        (0..n * n).filter(|&k| self.inside[k]).map(|k| self.axis.width(k % n) * self.axis.width(k / n)).sum()
    }

    /// `u_x + i·u_y` as `∇g` plus the bilinear interpolant of the scattered part.
    pub fn displacement_at(&self, x: f64, y: f64) -> Option<Complex64> {
        let (xn, xc) = (self.axis.nodes(), self.axis.centers());
        let wx = grid::bilinear(xn, xc, &self.wx, x, y)?;
        let wy = grid::bilinear(xc, xn, &self.wy, x, y)?;
        Some(self.af.gradient(x, y) + Complex64::new(wx, wy))
    }

    /// Largest deviation of the face unknowns from `exact`, over faces with `r < r_max`.
    pub fn max_face_error(&self, r_max: f64, exact: impl Fn(f64, f64) -> Complex64) -> f64 {
        let n = self.cells();
        let (xn, xc) = (self.axis.nodes(), self.axis.centers());
        let mut err: f64 = 0.0;
        for j in 0..n {
            for i in 0..=n {
                let (x, y) = (xn[i], xc[j]);
                if x.hypot(y) < r_max {
                    err = err.max((self.ux[j * (n + 1) + i] - exact(x, y).re).abs());
                }
                let (x, y) = (xc[j], xn[i]);
                if x.hypot(y) < r_max {
                    err = err.max((self.uy[i * n + j] - exact(x, y).im).abs());
                }
            }
        }
        err
    }

    fn check_circle(&self, radius: f64) -> Result<()> {
        if !(radius > 0.0 && radius + 2.0 * self.h() < self.options.r_inf && radius + self.h() < self.axis.core_half())
        {
            return Err(Error::Geometry(format!(
                "circle of radius {radius} is too close to the grid boundary (R_inf = {}, core {})",
                self.options.r_inf,
                self.axis.core_half()
            )));
        }
        Ok(())
    }

    /// Polar displacement trace on `∂B_radius` from `m` interpolated samples.
    pub fn extract_boundary(&self, radius: f64, m: usize) -> Result<BoundaryField> {
        self.check_circle(radius)?;
        let samples: Vec<Complex64> = sample_angles(m)
            .map(|t| {
                let u = self.displacement_at(radius * t.cos(), radius * t.sin()).expect("inside the grid");
                u * Complex64::from_polar(1.0, -t)
            })
            .collect();
        BoundaryField::analyze(&samples, radius, Convention::Polar)
    }

    /// `∇·u` per cell, row-major over `(x_centers[i], y_centers[j])`.
    pub fn dilatation_field(&self) -> Vec<f64> {
        let n = self.cells();
        (0..n * n)
            .map(|k| {
                let (i, j) = (k % n, k / n);
                (self.ux[j * (n + 1) + i + 1] - self.ux[j * (n + 1) + i]) / self.axis.width(i)
                    + (self.uy[(j + 1) * n + i] - self.uy[j * n + i]) / self.axis.width(j)
            })
            .collect()
    }

    /// Cells within `band` cells of a phase change, in the Chebyshev sense.
    pub fn interface_band(&self, band: usize) -> Vec<bool> {
        let n = self.cells();
        let at = |i: usize, j: usize| self.inside[j * n + i];
        (0..n * n)
            .into_par_iter()
            .map(|k| {
                let (i, j) = (k % n, k / n);
                let me = at(i, j);
                let (i0, i1) = (i.saturating_sub(band), (i + band).min(n - 1));
                let (j0, j1) = (j.saturating_sub(band), (j + band).min(n - 1));
                (j0..=j1).any(|jj| (i0..=i1).any(|ii| at(ii, jj) != me))
            })
            .collect()
    }

    /// Dilatation statistics per phase inside `B_R`, skipping a `band`-cell interface layer.
    pub fn dilatation_stats(&self, band: usize) -> DilatationStats {
        let n = self.cells();
        let div = self.dilatation_field();
        let skip = self.interface_band(band);
        let xc = self.axis.centers();
        let r2 = self.options.body_radius.powi(2);
        let (mut inc, mut mat) = (Vec::new(), Vec::new());
        for k in 0..n * n {
            let (x, y) = (xc[k % n], xc[k / n]);
            if skip[k] || x * x + y * y >= r2 {
                continue;
            }
            if self.inside[k] {
                inc.push(div[k]);
            } else {
                mat.push(div[k]);
            }
        }
        DilatationStats { inclusion: PhaseStats::of(&inc), matrix: PhaseStats::of(&mat) }
    }

    /// Stress components: `σ_xx`, `σ_yy` per cell and `σ_xy` per node (zero on the outer frame).
    fn stress_fields(&self, ux: &[f64], uy: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let n = self.cells();
        let mu = self.params.mu();
        let mut sxx = vec![0.0; n * n];
        let mut syy = vec![0.0; n * n];
        for k in 0..n * n {
            let (i, j) = (k % n, k / n);
            let exx = (ux[j * (n + 1) + i + 1] - ux[j * (n + 1) + i]) / self.axis.width(i);
            let eyy = (uy[(j + 1) * n + i] - uy[j * n + i]) / self.axis.width(j);
            let lam = self.params.lambda(self.inside[k]);
            sxx[k] = lam * (exx + eyy) + 2.0 * mu * exx;
            syy[k] = lam * (exx + eyy) + 2.0 * mu * eyy;
        }
        let mut sxy = vec![0.0; (n + 1) * (n + 1)];
        for j in 1..n {
            for i in 1..n {
                let g = (ux[j * (n + 1) + i] - ux[(j - 1) * (n + 1) + i]) / self.axis.dual_width(j)
                    + (uy[j * n + i] - uy[j * n + i - 1]) / self.axis.dual_width(i);
                sxy[j * (n + 1) + i] = mu * g;
            }
        }
        (sxx, syy, sxy)
    }

    /// Polar traction trace `σ_rr + i·σ_rθ` on `∂B_radius` from `m` samples: the
    /// stress of `∇g` plus the interpolated discrete stress of the scattered part.
    pub fn extract_traction(&self, radius: f64, m: usize) -> Result<BoundaryField> {
        self.check_circle(radius)?;
        let (sxx, syy, sxy) = self.stress_fields(&self.wx, &self.wy);
        let (xn, xc) = (self.axis.nodes(), self.axis.centers());
        let samples: Vec<Complex64> = sample_angles(m)
            .map(|t| {
                let (x, y) = (radius * t.cos(), radius * t.sin());
                let a = grid::bilinear(xc, xc, &sxx, x, y).expect("inside the grid");
                let d = grid::bilinear(xc, xc, &syy, x, y).expect("inside the grid");
                let b = grid::bilinear(xn, xn, &sxy, x, y).expect("inside the grid");
                let f = self.af.stress(&self.params, x, y);
                traction_to_polar(&[[f[0][0] + a, f[0][1] + b], [f[1][0] + b, f[1][1] + d]], t)
            })
            .collect();
        BoundaryField::analyze(&samples, radius, Convention::Polar)
    }

    /// Writes the displacement averaged to cell centers as a flat binary record.
    pub fn write_dump<W: std::io::Write>(&self, w: W) -> Result<()> {
        let n = self.cells();
        let centered: Vec<(f64, f64)> = (0..n * n)
            .map(|k| {
                let (i, j) = (k % n, k / n);
                let ux = 0.5 * (self.ux[j * (n + 1) + i] + self.ux[j * (n + 1) + i + 1]);
                let uy = 0.5 * (self.uy[j * n + i] + self.uy[(j + 1) * n + i]);
                (ux, uy)
            })
            .collect();
        dump::write(w, self.axis.centers(), self.h(), self.options.r_inf, &centered)
    }
}

/// Area fraction of `D` in `B_R`.
pub fn true_fraction(geometry: &InclusionGeometry, body_radius: f64) -> f64 {
    geometry.exact_area() / (PI * body_radius * body_radius)
}
