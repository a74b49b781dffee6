use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use incvol_cli::commands::{self, ConvergenceRow, NoiseTrial};
use incvol_cli::{CliError, Scenario};
use incvol_core::VfReport;

#[derive(Parser)]
#[command(name = "incvol", version, about = "Exact inclusion volume fraction from boundary data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Random seed; overrides `noise.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Fourier truncation order; overrides `solver.order`.
    #[arg(long)]
    modes: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Forward solve, nonlocal residual and volume-fraction estimate.
    Run(Common),
    /// Finite-difference solves over `convergence.h`.
    SweepConvergence(Common),
    /// Monte Carlo perturbation of the displacement trace.
    SweepNoise(Common),
    /// Han–Wu integral form against the Fourier form of the DtN map.
    CheckDtn(Common),
}

fn load(c: &Common) -> Result<(Scenario, PathBuf), CliError> {
    let mut scn = Scenario::load(&c.config)?;
    if let Some(n) = c.modes {
        if n == 0 || (scn.applied.max_degree() as usize) > n {
            return Err(CliError::Config(format!("--modes {n} cannot hold the applied field")));
        }
        scn.order = n;
    }
    if let Some(seed) = c.seed {
        scn.noise.seed = seed;
    }
    let dir = c.out.clone().or_else(|| scn.output.dir.clone()).unwrap_or_else(|| PathBuf::from("."));
    Ok((scn, dir))
}

fn report_paths(paths: &[PathBuf]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

fn print_estimate(vf: &VfReport) {
    println!("vf_estimate {:.12}", vf.vf_estimate);
    if let (Some(t), Some(e)) = (vf.vf_true, vf.abs_error) {
        println!("vf_true     {t:.12}  abs_error {e:.3e}");
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run(c) => {
            let (scn, dir) = load(&c)?;
            let (report, fwd) = commands::run(&scn)?;
            let paths = commands::write_run(&dir, &scn, &report, &fwd)?;
            print_estimate(&report.vf);
            println!("nonlocal residual max {:.3e}  l2 {:.3e}", report.residual.max_abs, report.residual.l2);
            report_paths(&paths);
        }
        Command::SweepConvergence(c) => {
            let (scn, dir) = load(&c)?;
            let rows = commands::sweep_convergence(&scn, &scn.convergence_h)?;
            std::fs::create_dir_all(&dir)?;
            let path = commands::write_csv(
                dir.join("convergence.csv"),
                ConvergenceRow::CSV_HEADER,
                rows.iter().map(|r| r.csv_row()),
            )?;
            for r in &rows {
                println!("h {:.6e}  vf {:.8}  error {:.3e}  residual {:.3e}", r.h, r.vf_estimate, r.abs_error, r.residual_max_abs);
            }
            report_paths(&[path]);
        }
        Command::SweepNoise(c) => {
            let (scn, dir) = load(&c)?;
            let (trials, summary) = commands::sweep_noise(&scn, scn.noise.seed)?;
            std::fs::create_dir_all(&dir)?;
            let csv = commands::write_csv(dir.join("noise.csv"), NoiseTrial::CSV_HEADER, trials.iter().map(|t| t.csv_row()))?;
            let json = commands::write_json(dir.join("noise_summary.json"), &summary)?;
            println!(
                "{} trials  std {:.4e}  predicted {:.4e}  ratio {:.3}",
                summary.trials, summary.sample_std, summary.predicted_std, summary.std_ratio
            );
            report_paths(&[csv, json]);
        }
        Command::CheckDtn(c) => {
            let (scn, dir) = load(&c)?;
            let order = c.modes.unwrap_or(16);
            let report = commands::check_dtn(&scn, order, 20, scn.noise.seed)?;
            std::fs::create_dir_all(&dir)?;
            let path = commands::write_json(dir.join("dtn.json"), &report)?;
            println!(
                "max |Han-Wu - Fourier| {:.3e}  rigid translation {:e} / {:e}  agree {}",
                report.max_abs_difference, report.rigid_translation_hanwu, report.rigid_translation_fourier, report.agree
            );
            report_paths(&[path]);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("incvol: {} [{}]", e, e.class());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
