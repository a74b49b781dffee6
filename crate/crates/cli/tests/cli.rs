use std::path::Path;
use std::process::{Command, Output};

use incvol_cli::commands;
use incvol_cli::{CliError, Scenario};
use incvol_core::estimator;
use incvol_core::BoundaryField;

const WORKED: &str = r#"
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
modes = [[2, 0.5, -0.25], [3, 0.1, 0.2]]

[solver]
kind = "analytic"
order = 16

[noise]
amplitude = 1e-3
trials = 100
seed = 11
"#;

fn fd_scenario(geometry: &str, h_list: &str) -> String {
    WORKED
        .replace("shape = \"concentric_disk\"\nradius = 0.5", geometry)
        .replace("kind = \"analytic\"", "kind = \"fd\"\nh = 0.03125\nr_inf = 64.0")
        .replace("modes = [[2, 0.5, -0.25], [3, 0.1, 0.2]]", "")
        + &format!("\n[convergence]\nh = {h_list}\n")
}

fn incvol(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_incvol")).args(args).output().unwrap()
}

fn run_in(dir: &Path, sub: &str, scenario: &str, extra: &[&str]) -> Output {
    let cfg = dir.join("scenario.toml");
    std::fs::write(&cfg, scenario).unwrap();
    let out = dir.join("out");
    let mut args = vec![sub, "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    incvol(&args)
}

#[test]
fn run_reports_estimate_and_residual() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), "run", WORKED, &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(dir.path().join("out/report.json")).unwrap();
    let report: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert!((report["vf"]["vf_estimate"].as_f64().unwrap() - 0.25).abs() < 1e-10);
    assert!(report["residual"]["max_abs"].as_f64().unwrap() <= 1e-10);

    let keys: Vec<&str> = ["schema_version", "solver", "order", "body_radius", "vf", "residual", "annulus"]
        .into_iter()
        .collect();
    let positions: Vec<usize> = keys.iter().map(|k| text.find(&format!("\"{k}\"")).unwrap()).collect();
    assert!(positions.windows(2).all(|w| w[0] < w[1]), "keys out of order: {positions:?}");

    let u0 = BoundaryField::read_text(std::fs::read(dir.path().join("out/u0.txt")).unwrap().as_slice()).unwrap();
    assert!((u0.coeff(0).re - 0.45).abs() < 1e-12);
}

#[test]
fn outputs_are_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for sub in ["run", "sweep-noise", "check-dtn"] {
        assert!(run_in(a.path(), sub, WORKED, &["--seed", "5"]).status.success());
        assert!(run_in(b.path(), sub, WORKED, &["--seed", "5"]).status.success());
    }
    for name in ["report.json", "u0.txt", "t0.txt", "noise.csv", "noise_summary.json", "dtn.json"] {
        let x = std::fs::read(a.path().join("out").join(name)).unwrap();
        let y = std::fs::read(b.path().join("out").join(name)).unwrap();
        assert_eq!(x, y, "{name} differs between identical runs");
    }
}

#[test]
fn noise_spread_matches_sensitivity() {
    let scn = Scenario::from_toml(WORKED).unwrap();
    let (trials, summary) = commands::sweep_noise(&scn, 2024).unwrap();
    assert_eq!(trials.len(), 100);
    assert!(trials.iter().enumerate().all(|(i, t)| t.trial == i));
    assert!(trials.iter().all(|t| t.residual_max_abs > 0.0));
    assert!((summary.std_ratio - 1.0).abs() <= 0.2, "ratio {}", summary.std_ratio);

    let dir = tempfile::tempdir().unwrap();
    assert!(run_in(dir.path(), "sweep-noise", WORKED, &[]).status.success());
    let csv = std::fs::read_to_string(dir.path().join("out/noise.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "trial,vf_estimate,vf_clamped,residual_max_abs,residual_l2");
    assert_eq!(lines.count(), 100);
}

#[test]
fn seed_changes_noise_draws() {
    let scn = Scenario::from_toml(WORKED).unwrap();
    let (a, _) = commands::sweep_noise(&scn, 1).unwrap();
    let (b, _) = commands::sweep_noise(&scn, 2).unwrap();
    assert_ne!(a[0].vf_estimate, b[0].vf_estimate);
}

#[test]
fn check_dtn_through_binary() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), "check-dtn", WORKED, &["--modes", "16"]);
    assert!(o.status.success());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/dtn.json")).unwrap()).unwrap();
    assert_eq!(report["order"], 16);
    assert_eq!(report["agree"], true);
}

#[test]
fn config_errors_exit_with_config_class() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), "run", "schema_version = 1\n[material]\nmu = 1.0\n", &[]);
    assert_eq!(o.status.code(), Some(2));
    let o = run_in(dir.path(), "run", &WORKED.replace("mu = 1.0", "mu = -1.0"), &[]);
    assert_eq!(o.status.code(), Some(2));
    let o = run_in(dir.path(), "run", WORKED, &["--modes", "2"]);
    assert_eq!(o.status.code(), Some(2));
    let o = incvol(&["run", "--config", "/nonexistent/scenario.toml"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let cfg = dir.path().join("scenario.toml");
    std::fs::write(&cfg, WORKED).unwrap();
    let o = incvol(&["run", "--config", cfg.to_str().unwrap(), "--out", blocker.join("sub").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(6));
}

#[test]
fn fd_run_with_grid_dump() {
    let scn = fd_scenario("shape = \"eccentric_disk\"\ncenter = [0.2, 0.0]\nradius = 0.3", "[]")
        + "\n[output]\ndump_grid = true\n";
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), "run", &scn, &["--modes", "8"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/report.json")).unwrap()).unwrap();
    let vf = report["vf"]["vf_estimate"].as_f64().unwrap();
    assert!((vf - 0.09).abs() / 0.09 < 0.01, "{vf}");
    assert!(report["fd"]["linear_relative_residual"].as_f64().unwrap() <= 1e-10);
    assert!(report["residual"]["max_abs"].as_f64().unwrap() < 0.1);
    let dump = std::fs::read(dir.path().join("out/grid.bin")).unwrap();
    assert_eq!(&dump[..8], b"IVFGRID1");
}

#[test]
fn concentric_sweep_converges_at_first_order_or_better() {
    let scn = Scenario::from_toml(&fd_scenario(
        "shape = \"concentric_disk\"\nradius = 0.5",
        "[0.03125, 0.015625, 0.0078125, 0.00390625]",
    ))
    .unwrap();
    let rows = commands::sweep_convergence(&scn, &scn.convergence_h).unwrap();
    let ratios: Vec<f64> = rows.iter().filter_map(|r| r.error_ratio).collect();
    assert_eq!(ratios.len(), 3);
    assert!(ratios.iter().all(|&q| q >= 1.7), "error ratios {ratios:?}");
}

#[test]
fn eccentric_sweep_errors_decrease() {
    let text = fd_scenario(
        "shape = \"eccentric_disk\"\ncenter = [0.2, 0.0]\nradius = 0.3",
        "[0.015625, 0.0078125, 0.00390625]",
    );
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), "sweep-convergence", &text, &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("out/convergence.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), commands::ConvergenceRow::CSV_HEADER);
    let errors: Vec<f64> = lines.map(|l| l.split(',').nth(5).unwrap().parse().unwrap()).collect();
    assert_eq!(errors.len(), 3);
    assert!(errors.windows(2).all(|w| w[1] < w[0]), "{errors:?}");
}

#[test]
fn homogeneous_body_flux_is_exact_on_every_grid() {
    // λ₁ = λ₂ cannot be estimated, but the flux it would feed is C_g|Ω| to round-off.
    let text = fd_scenario("shape = \"concentric_disk\"\nradius = 0.5", "[]").replace("lambda1 = 3.0", "lambda1 = 1.0");
    let mut scn = Scenario::from_toml(&text).unwrap();
    scn.order = 8;
    for h in [0.0625, 0.03125, 0.015625] {
        let opts = incvol_core::FdOptions { h, ..scn.fd.unwrap() };
        let fwd = commands::forward(&scn, Some(&opts)).unwrap();
        let q = estimator::flux(fwd.data.u0(), 1.0).unwrap();
        assert!((q - std::f64::consts::PI).abs() < 1e-10, "h {h}: flux {q}");
    }
    assert!(matches!(
        commands::sweep_convergence(&scn, &[0.0625]),
        Err(CliError::Core(incvol_core::Error::IndistinguishablePhases))
    ));
}

#[test]
fn sweep_convergence_requires_fd() {
    let scn = Scenario::from_toml(WORKED).unwrap();
    assert!(matches!(commands::sweep_convergence(&scn, &[0.1]), Err(CliError::Config(_))));
}
