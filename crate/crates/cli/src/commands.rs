use std::fs;
use std::path::{Path, PathBuf};

use incvol_core::annulus::AnnulusSolution;
use incvol_core::estimator::{self, DilatationConstants, VfReport};
use incvol_core::fd::{solve_fd, DilatationStats, GridSolution};
use incvol_core::nonlocal::{residual, BoundaryDataSet, ResidualNorms};
use incvol_core::{BoundaryField, Complex64, Convention, DtnOperator, Error, FdOptions, InclusionGeometry};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::CliError;
use crate::scenario::{Scenario, SolverKind, SCHEMA_VERSION};

#[derive(Debug, Clone, Serialize)]
pub struct AnnulusSummary {
    pub inclusion_radius: f64,
    pub beta: f64,
    pub transmission_displacement_jump: f64,
    pub transmission_traction_jump: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FdSummary {
    pub h: f64,
    pub r_inf: f64,
    pub stretch: f64,
    pub cells_per_axis: usize,
    pub free_dofs: usize,
    pub linear_relative_residual: f64,
    pub discrete_area_fraction: f64,
    pub dilatation: DilatationStats,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub solver: SolverKind,
    pub order: usize,
    pub body_radius: f64,
    pub vf: VfReport,
    pub residual: ResidualNorms,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub annulus: Option<AnnulusSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fd: Option<FdSummary>,
}

/// Boundary traces of a forward solve plus solver diagnostics.
pub struct Forward {
    pub data: BoundaryDataSet,
    pub annulus: Option<AnnulusSummary>,
    pub fd: Option<FdSummary>,
    pub grid: Option<GridSolution>,
}

/// Fails fast when the phases cannot be told apart, before any solve.
fn constants(scn: &Scenario) -> Result<DilatationConstants, CliError> {
    let k = DilatationConstants::compute(&scn.params, scn.applied.c_g())?;
    if k.degenerate {
        return Err(Error::IndistinguishablePhases.into());
    }
    Ok(k)
}

pub fn forward(scn: &Scenario, fd: Option<&FdOptions>) -> Result<Forward, CliError> {
    let (r, n) = (scn.body_radius, scn.order);
    match scn.solver {
        SolverKind::Analytic => {
            let a = match scn.geometry {
                InclusionGeometry::ConcentricDisk { radius } => radius,
                _ => return Err(CliError::Config("the analytic solver needs a concentric disk".into())),
            };
            let sol = AnnulusSolution::solve(a, scn.params, scn.applied.clone())?;
            let (du, dt) = sol.transmission_jumps(4 * n + 1);
            Ok(Forward {
                data: sol.boundary_data(r, n)?,
                annulus: Some(AnnulusSummary {
                    inclusion_radius: a,
                    beta: sol.beta(),
                    transmission_displacement_jump: du,
                    transmission_traction_jump: dt,
                }),
                fd: None,
                grid: None,
            })
        }
        SolverKind::Fd => {
            let opts = fd.or(scn.fd.as_ref()).ok_or_else(|| CliError::Config("missing fd options".into()))?;
            let gs = solve_fd(&scn.geometry, &scn.params, &scn.applied, opts)?;
            let m = 4 * n + 1;
            let u0 = gs.extract_boundary(r, m)?.with_order(n)?;
            let t0 = gs.extract_traction(r, m)?.with_order(n)?;
            let f0 = scn.applied.trace_displacement(r, n)?;
            let big_f0 = scn.applied.trace_traction(&scn.params, r, n)?;
            let summary = FdSummary {
                h: opts.h,
                r_inf: opts.r_inf,
                stretch: opts.stretch,
                cells_per_axis: gs.cells(),
                free_dofs: gs.free_dofs(),
                linear_relative_residual: gs.relative_residual(),
                discrete_area_fraction: gs.discrete_area() / (std::f64::consts::PI * r * r),
                dilatation: gs.dilatation_stats(3),
            };
            Ok(Forward {
                data: BoundaryDataSet::new(u0, t0, f0, big_f0)?,
                annulus: None,
                fd: Some(summary),
                grid: Some(gs),
            })
        }
    }
}

/// Forward solve, nonlocal residual and volume-fraction estimate.
pub fn run(scn: &Scenario) -> Result<(RunReport, Forward), CliError> {
    constants(scn)?;
    let fwd = forward(scn, None)?;
    let res = residual(&fwd.data, &scn.params)?;
    let vf = estimator::estimate(fwd.data.u0(), scn.body_radius, &scn.params, scn.applied.c_g())?
        .with_truth(scn.true_fraction());
    let report = RunReport {
        schema_version: SCHEMA_VERSION,
        solver: scn.solver,
        order: scn.order,
        body_radius: scn.body_radius,
        vf,
        residual: ResidualNorms::of(&res),
        annulus: fwd.annulus.clone(),
        fd: fwd.fd.clone(),
    };
    Ok((report, fwd))
}

pub fn write_run(dir: &Path, scn: &Scenario, report: &RunReport, fwd: &Forward) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir)?;
    let mut written = vec![write_json(dir.join("report.json"), report)?];
    for (name, field) in [("u0.txt", fwd.data.u0()), ("t0.txt", fwd.data.t0())] {
        let path = dir.join(name);
        fs::write(&path, field.to_text())?;
        written.push(path);
    }
    if let (true, Some(gs)) = (scn.output.dump_grid, &fwd.grid) {
        let path = dir.join("grid.bin");
        let file = std::io::BufWriter::new(fs::File::create(&path)?);
        gs.write_dump(file)?;
        written.push(path);
    }
    Ok(written)
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceRow {
    pub h: f64,
    pub cells_per_axis: usize,
    pub free_dofs: usize,
    pub vf_estimate: f64,
    pub vf_true: f64,
    pub abs_error: f64,
    pub error_ratio: Option<f64>,
    pub observed_order: Option<f64>,
    pub residual_max_abs: f64,
    pub residual_l2: f64,
}

impl ConvergenceRow {
    pub const CSV_HEADER: &'static str = "h,cells_per_axis,free_dofs,vf_estimate,vf_true,abs_error,error_ratio,observed_order,residual_max_abs,residual_l2";

    pub fn csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
        format!(
            "{:e},{},{},{:e},{:e},{:e},{},{},{:e},{:e}",
            self.h,
            self.cells_per_axis,
            self.free_dofs,
            self.vf_estimate,
            self.vf_true,
            self.abs_error,
            opt(self.error_ratio),
            opt(self.observed_order),
            self.residual_max_abs,
            self.residual_l2
        )
    }
}

/// One fd solve per spacing; the observed order compares consecutive rows.
pub fn sweep_convergence(scn: &Scenario, hs: &[f64]) -> Result<Vec<ConvergenceRow>, CliError> {
    if scn.solver != SolverKind::Fd {
        return Err(CliError::Config("sweep-convergence needs solver.kind = \"fd\"".into()));
    }
    if hs.is_empty() {
        return Err(CliError::Config("sweep-convergence needs a non-empty convergence.h list".into()));
    }
    let k = constants(scn)?;
    let base = scn.fd.ok_or_else(|| CliError::Config("missing fd options".into()))?;
    let truth = scn.true_fraction();
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(hs.len());
    for &h in hs {
        let opts = FdOptions { h, ..base };
        opts.validate()?;
        let fwd = forward(scn, Some(&opts))?;
        let res = ResidualNorms::of(&residual(&fwd.data, &scn.params)?);
        let q = estimator::flux(fwd.data.u0(), scn.body_radius)?;
        let area = std::f64::consts::PI * scn.body_radius.powi(2);
        let vf = estimator::estimate_from_flux(q, area, &k)?.vf_estimate;
        let err = (vf - truth).abs();
        let (ratio, order) = match rows.last() {
            Some(prev) => {
                let ratio = prev.abs_error / err;
                (Some(ratio), Some(ratio.ln() / (prev.h / h).ln()))
            }
            None => (None, None),
        };
        let fd = fwd.fd.expect("fd summary");
        rows.push(ConvergenceRow {
            h,
            cells_per_axis: fd.cells_per_axis,
            free_dofs: fd.free_dofs,
            vf_estimate: vf,
            vf_true: truth,
            abs_error: err,
            error_ratio: ratio,
            observed_order: order,
            residual_max_abs: res.max_abs,
            residual_l2: res.l2,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, Serialize)]
pub struct NoiseTrial {
    pub trial: usize,
    pub vf_estimate: f64,
    pub vf_clamped: f64,
    pub residual_max_abs: f64,
    pub residual_l2: f64,
}

impl NoiseTrial {
    pub const CSV_HEADER: &'static str = "trial,vf_estimate,vf_clamped,residual_max_abs,residual_l2";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{:e},{:e},{:e},{:e}",
            self.trial, self.vf_estimate, self.vf_clamped, self.residual_max_abs, self.residual_l2
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NoiseSummary {
    pub trials: usize,
    pub amplitude: f64,
    pub seed: u64,
    pub vf_clean: f64,
    pub mean: f64,
    pub sample_std: f64,
    pub predicted_std: f64,
    pub std_ratio: f64,
}

/// Adds `amplitude·|c_n|·(ξ + iη)` to every coefficient, with `ξ, η` standard normal.
pub fn perturb(u0: &BoundaryField, amplitude: f64, rng: &mut impl Rng) -> BoundaryField {
    u0.map(|_, c| {
        let xi: f64 = rng.sample(StandardNormal);
        let eta: f64 = rng.sample(StandardNormal);
        c + Complex64::new(xi, eta) * (amplitude * c.norm())
    })
}

/// Trial `t` draws from its own ChaCha stream, so results do not depend on scheduling.
pub fn sweep_noise(scn: &Scenario, seed: u64) -> Result<(Vec<NoiseTrial>, NoiseSummary), CliError> {
    constants(scn)?;
    let fwd = forward(scn, None)?;
    let (r, c_g) = (scn.body_radius, scn.applied.c_g());
    let clean = estimator::estimate(fwd.data.u0(), r, &scn.params, c_g)?;
    let amp = scn.noise.amplitude;
    let trials: Vec<NoiseTrial> = (0..scn.noise.trials)
        .into_par_iter()
        .map(|t| -> Result<NoiseTrial, CliError> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let noisy = fwd.data.with_u0(perturb(fwd.data.u0(), amp, &mut rng))?;
            let res = ResidualNorms::of(&residual(&noisy, &scn.params)?);
            let est = estimator::estimate(noisy.u0(), r, &scn.params, c_g)?;
            Ok(NoiseTrial {
                trial: t,
                vf_estimate: est.vf_estimate,
                vf_clamped: est.vf_clamped,
                residual_max_abs: res.max_abs,
                residual_l2: res.l2,
            })
        })
        .collect::<Result<_, _>>()?;
    let n = trials.len() as f64;
    let mean = trials.iter().map(|t| t.vf_estimate).sum::<f64>() / n;
    let var = trials.iter().map(|t| (t.vf_estimate - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let predicted = clean.c0_sensitivity.unwrap_or(f64::NAN).abs() * amp * fwd.data.u0().coeff(0).norm();
    let summary = NoiseSummary {
        trials: trials.len(),
        amplitude: amp,
        seed,
        vf_clean: clean.vf_estimate,
        mean,
        sample_std: var.sqrt(),
        predicted_std: predicted,
        std_ratio: var.sqrt() / predicted,
    };
    Ok((trials, summary))
}

#[derive(Debug, Clone, Serialize)]
pub struct DtnReport {
    pub order: usize,
    pub trials: usize,
    pub quadrature_points: usize,
    pub seed: u64,
    pub max_abs_difference: f64,
    pub max_relative_difference: f64,
    pub rigid_translation_hanwu: f64,
    pub rigid_translation_fourier: f64,
    pub tolerance: f64,
    pub agree: bool,
}

pub const DTN_TOLERANCE: f64 = 1e-8;

/// Han–Wu integral form against the diagonal Fourier form on random band-limited fields.
pub fn check_dtn(scn: &Scenario, order: usize, trials: usize, seed: u64) -> Result<DtnReport, CliError> {
    if order == 0 {
        return Err(CliError::Config("check-dtn needs order >= 1".into()));
    }
    let r = scn.body_radius;
    let dtn = DtnOperator::new(scn.params, r)?;
    let fourier = |u_cart: &BoundaryField| -> Result<BoundaryField, CliError> {
        Ok(dtn.apply(&u_cart.convert(Convention::Polar))?.convert(Convention::Cartesian))
    };
    let (mut max_abs, mut max_rel) = (0.0f64, 0.0f64);
    for t in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(t as u64);
        let u = BoundaryField::from_fn(r, order, Convention::Cartesian, |_| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })?;
        let hw = dtn.hanwu_apply_default(&u)?;
        let want = fourier(&u)?;
        let scale = want.max_abs().max(f64::MIN_POSITIVE);
        let diff = want.indices().map(|n| (hw.coeff(n) - want.coeff(n)).norm()).fold(0.0, f64::max);
        max_abs = max_abs.max(diff);
        max_rel = max_rel.max(diff / scale);
    }
    let mut rigid = BoundaryField::zeros(r, order, Convention::Cartesian)?;
    *rigid.coeff_mut(0) = Complex64::new(0.7, -1.3);
    let rigid_hw = dtn.hanwu_apply_default(&rigid)?.max_abs();
    let rigid_fourier = fourier(&rigid)?.max_abs();
    Ok(DtnReport {
        order,
        trials,
        quadrature_points: 4 * order + 2,
        seed,
        max_abs_difference: max_abs,
        max_relative_difference: max_rel,
        rigid_translation_hanwu: rigid_hw,
        rigid_translation_fourier: rigid_fourier,
        tolerance: DTN_TOLERANCE,
        agree: max_abs <= DTN_TOLERANCE && rigid_hw == 0.0 && rigid_fourier == 0.0,
    })
}

pub fn write_json(path: PathBuf, value: &impl Serialize) -> Result<PathBuf, CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Config(e.to_string()))?;
    text.push('\n');
    fs::write(&path, text)?;
    Ok(path)
}

pub fn write_csv<'a>(path: PathBuf, header: &str, rows: impl Iterator<Item = String> + 'a) -> Result<PathBuf, CliError> {
    let mut text = String::from(header);
    text.push('\n');
    for row in rows {
        text.push_str(&row);
        text.push('\n');
    }
    fs::write(&path, text)?;
    Ok(path)
}
