//! Experiment orchestration behind the command-line subcommands.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ensemble::{compose_ensemble, compose_transfer_product, EnsembleData};
use crate::error::{Error, Result};
use crate::io::{read_field_grid, render_heatmap, write_field_grid, ExperimentConfig, HeatmapScale};
use crate::model::{manley_rowe_invariants, residual_norm, FieldGrid, GridSpec, ModelParams, Packet};
use crate::ode::Tolerance;
use crate::oracle::{locate_zs_eigenvalues, packets_window, transfer_matrix, LocateOptions, Region};
use crate::recon::{conditioning, grid_solve_with, ReconOptions};
use crate::sim::{initialize, SimOptions, Simulator};
use crate::spectra::{bohr_sommerfeld_spectrum, sech_spectrum_exact, wkb_norming_constants, ZSData, NORMING_CONVENTION};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Scatter,
    Ensemble,
    Reconstruct,
    Simulate,
    Validate,
    Plot,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Scatter => "scatter",
            Command::Ensemble => "ensemble",
            Command::Reconstruct => "reconstruct",
            Command::Simulate => "simulate",
            Command::Validate => "validate",
            Command::Plot => "plot",
        }
    }
}

/// JSON output wrapper; every artifact carries the config and the conventions used.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Output<T> {
    pub tool_version: String,
    pub command: String,
    pub norming_convention: String,
    pub config: ExperimentConfig,
    pub data: T,
}

fn write_output<T: Serialize>(out: &Path, file: &str, cmd: Command, cfg: &ExperimentConfig, data: T) -> Result<PathBuf> {
    fs::create_dir_all(out)?;
    let o = Output {
        tool_version: env!("CARGO_PKG_VERSION").into(),
        command: cmd.name().into(),
        norming_convention: NORMING_CONVENTION.into(),
        config: cfg.clone(),
        data,
    };
    let path = out.join(file);
    fs::write(&path, serde_json::to_string_pretty(&o)? + "\n")?;
    Ok(path)
}

fn eps_tag(eps: f64) -> String {
    format!("eps{eps}")
}

/// What a subcommand produced.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub files: Vec<PathBuf>,
    pub lines: Vec<String>,
    /// Validation failures; nonempty means exit status 1.
    pub failures: Vec<String>,
}

pub fn execute(cmd: Command, cfg: &ExperimentConfig, out: &Path) -> Result<Report> {
    cfg.validate()?;
    match cmd {
        Command::Scatter => scatter(cfg, out),
        Command::Ensemble => ensemble(cfg, out),
        Command::Reconstruct => reconstruct(cfg, out),
        Command::Simulate => simulate(cfg, out),
        Command::Validate => validate(cfg, out),
        Command::Plot => plot(cfg, out),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PacketSpectrum {
    pub packet: usize,
    pub mode: usize,
    pub epsilon: f64,
    /// 2×2 semiclassical parameter of the packet's block.
    pub zs_epsilon: f64,
    pub wkb: ZSData,
    /// Eigenvalues located by the direct-scattering oracle, when requested.
    pub oracle: Option<Vec<Complex64>>,
}

/// Bohr–Sommerfeld spectrum with WKB norming constants for each packet and epsilon.
pub fn packet_spectra(params: &ModelParams, packets: &[Packet]) -> Result<Vec<ZSData>> {
    let lax = params.lax()?;
    packets
        .iter()
        .map(|p| wkb_norming_constants(p, &bohr_sommerfeld_spectrum(p, lax.zs_epsilon(p.mode_index()))))
        .collect()
}

pub fn build_ensemble(params: &ModelParams, packets: &[Packet]) -> Result<EnsembleData> {
    let data = packet_spectra(params, packets)?;
    compose_ensemble(params, packets, &data)
}

fn scatter(cfg: &ExperimentConfig, out: &Path) -> Result<Report> {
    let packets = cfg.packets()?;
    let tol = Tolerance { abs: cfg.run.ode_tol, rel: cfg.run.ode_tol, ..Default::default() };
    let mut rep = Report::default();
    let mut all = Vec::new();
    for eps in cfg.epsilons() {
        let params = ModelParams { epsilon: eps, ..cfg.model };
        let lax = params.lax()?;
        for (i, (p, wkb)) in packets.iter().zip(packet_spectra(&params, &packets)?).enumerate() {
            let zs_eps = lax.zs_epsilon(p.mode_index());
            let region = Region::new((-0.5 * p.amplitude, 0.5 * p.amplitude), (1e-3 * p.amplitude, 1.1 * p.amplitude));
            let found = locate_zs_eigenvalues(&p.centered(), zs_eps, region, tol, LocateOptions::default())?;
            rep.lines.push(format!(
                "eps {eps}: packet {i} (mode {}): {} WKB eigenvalues, {} located",
                p.mode,
                wkb.len(),
                found.len()
            ));
            all.push(PacketSpectrum { packet: i, mode: p.mode, epsilon: eps, zs_epsilon: zs_eps, wkb, oracle: Some(found.sorted_points()) });
        }
    }
    rep.files.push(write_output(out, "scatter.json", Command::Scatter, cfg, all)?);
    Ok(rep)
}

fn ensemble(cfg: &ExperimentConfig, out: &Path) -> Result<Report> {
    let packets = cfg.packets()?;
    let mut rep = Report::default();
    for eps in cfg.epsilons() {
        let params = ModelParams { epsilon: eps, ..cfg.model };
        let e = build_ensemble(&params, &packets)?;
        rep.lines.push(format!("eps {eps}: {} poles", e.len()));
        rep.files.push(write_output(out, &format!("ensemble_{}.json", eps_tag(eps)), Command::Ensemble, cfg, e)?);
    }
    Ok(rep)
}

fn reconstruct(cfg: &ExperimentConfig, out: &Path) -> Result<Report> {
    let packets = cfg.packets()?;
    let opts = ReconOptions { precision: cfg.run.precision, ..Default::default() };
    let mut rep = Report::default();
    for eps in cfg.epsilons() {
        let params = ModelParams { epsilon: eps, ..cfg.model };
        let e = build_ensemble(&params, &packets)?;
        let g = grid_solve_with(&e, cfg.grid, opts, true)?;
        let path = out.join(format!("reconstruct_{}.json", eps_tag(eps)));
        write_field_grid(&g, &path, Some(cfg))?;
        let s = cfg.grid;
        let samples: Vec<(f64, f64)> =
            [(0, 0), (s.nx / 2, 0), (s.nx / 2, s.nt - 1), (s.nx - 1, s.nt / 2)].iter().map(|&(ix, it)| (s.x(ix), s.t(it))).collect();
        if !e.is_empty() {
            let c = conditioning(&e, &samples)?;
            rep.lines.push(format!("eps {eps}: {} poles, max sampled condition {:.3e}", e.len(), c.max_condition));
            rep.files.push(write_output(out, &format!("conditioning_{}.json", eps_tag(eps)), Command::Reconstruct, cfg, c)?);
        }
        rep.files.push(path);
    }
    Ok(rep)
}

pub fn sim_options(cfg: &ExperimentConfig) -> SimOptions {
    SimOptions { transport: cfg.run.transport, coupling: cfg.run.coupling, ..Default::default() }
}

fn simulate(cfg: &ExperimentConfig, out: &Path) -> Result<Report> {
    let packets = cfg.packets()?;
    let mut rep = Report::default();
    for eps in cfg.epsilons() {
        let params = ModelParams { epsilon: eps, ..cfg.model };
        let s = initialize(&packets, params, cfg.grid)?;
        let g = Simulator::new(sim_options(cfg)).run_to_grid(&s, cfg.grid, cfg.run.cfl)?;
        let path = out.join(format!("simulate_{}.json", eps_tag(eps)));
        write_field_grid(&g, &path, Some(cfg))?;
        rep.lines.push(format!("eps {eps}: simulated to t = {}", cfg.grid.t_max));
        rep.files.push(path);
    }
    Ok(rep)
}

fn plot(cfg: &ExperimentConfig, out: &Path) -> Result<Report> {
    let mut rep = Report::default();
    for eps in cfg.epsilons() {
        let manifest = out.join(format!("reconstruct_{}.json", eps_tag(eps)));
        let g: FieldGrid = if manifest.exists() {
            read_field_grid(&manifest)?.0
        } else {
            let params = ModelParams { epsilon: eps, ..cfg.model };
            let opts = ReconOptions { precision: cfg.run.precision, ..Default::default() };
            grid_solve_with(&build_ensemble(&params, &cfg.packets()?)?, cfg.grid, opts, true)?
        };
        for mode in 1..=3 {
            let path = out.join(format!("heatmap_{}_q{mode}.png", eps_tag(eps)));
            let HeatmapScale { max, .. } = render_heatmap(&g, mode, &path)?;
            rep.lines.push(format!("eps {eps}: |q{mode}| max {max:.4}"));
            rep.files.push(path);
        }
    }
    Ok(rep)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
}

fn check(name: &str, value: f64, threshold: f64, passed: bool) -> Check {
    Check { name: name.into(), value, threshold, passed }
}

/// Fast versions of the oracle-exactness, spectrum, residual-convergence and
/// Manley–Rowe checks, on fixed problems independent of the config's packets.
pub fn validation_suite() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let tol = Tolerance::default();
    let params = ModelParams::with_epsilon(0.4)?;

    let zero: Vec<Packet> = Vec::new();
    let lam = Complex64::new(0.3, 0.4);
    let t = transfer_matrix(&zero, lam, &params, (-5.0, 5.0), tol)?;
    let id = crate::oracle::TransferMatrix::identity(3, lam, -5.0, 5.0);
    let d = t.max_diff(&id);
    checks.push(check("zero-field transfer is identity", d, 1e-12, d <= 1e-12));

    let ps = vec![
        Packet::with_support(1, crate::model::Shape::Sech, 1.0, 1.0, -6.0, 5.5, 1e-2)?,
        Packet::with_support(2, crate::model::Shape::Sech, 1.0, 1.0, 6.0, 5.5, 1e-2)?,
    ];
    let direct = transfer_matrix(&ps, lam, &params, packets_window(&ps).unwrap_or((0.0, 0.0)), tol)?;
    let prod = compose_transfer_product(&params, &ps, lam, Default::default(), tol)?;
    let d = prod.max_diff(&direct) / direct.max_abs().max(1.0);
    checks.push(check("transfer product matches direct integration", d, 1e-6, d <= 1e-6));

    let p = Packet::sech(1, 1.0, 1.0, 0.0)?;
    let found = locate_zs_eigenvalues(&p, 0.4, Region::new((-0.5, 0.5), (0.01, 1.1)), tol, LocateOptions::default())?.sorted_points();
    let exact = sech_spectrum_exact(1.0, 1.0, 0.4).eigenvalues();
    let d = if found.len() == exact.len() {
        found.iter().zip(&exact).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    checks.push(check("sech spectrum located", d, 1e-6, d <= 1e-6));

    let e = build_ensemble(&params, &ps)?;
    let mut prev = f64::NAN;
    let mut ratios = Vec::new();
    for n in [800usize, 1600, 3200] {
        let spec = GridSpec { x_min: -12.0, x_max: 12.0, nx: n + 1, t_min: 0.0, t_max: 1.0, nt: n / 24 + 1 };
        let r = residual_norm(&grid_solve_with(&e, spec, ReconOptions::default(), true)?)?;
        let m = r.max.iter().cloned().fold(0.0, f64::max);
        if prev.is_finite() {
            ratios.push(prev / m);
        }
        prev = m;
    }
    let worst = ratios.iter().map(|r| (r - 4.0).abs()).fold(0.0, f64::max);
    checks.push(check("residual converges at second order (|ratio - 4|)", worst, 0.5, worst <= 0.5));

    let a = Packet::with_support(1, crate::model::Shape::Sech, 1.0, 1.0, -8.0, 5.5, 1e-2)?;
    let b = Packet::with_support(3, crate::model::Shape::Sech, 0.8, 1.0, 8.0, 5.5, 1e-2)?;
    let spec = GridSpec { x_min: -30.0, x_max: 30.0, nx: 1024, t_min: 0.0, t_max: 16.0, nt: 17 };
    let mr_params = ModelParams::with_epsilon(0.5)?;
    let s = initialize(&[a, b], mr_params, spec)?;
    let opts = SimOptions { transport: crate::sim::Transport::Spectral, coupling: crate::sim::Coupling::ImplicitMidpoint, ..Default::default() };
    let g = Simulator::new(opts).run_to_grid(&s, spec, 0.5)?;
    let drift = manley_rowe_drift(&g)?;
    checks.push(check("Manley-Rowe drift over a collision", drift, 1e-6, drift <= 1e-6));
    Ok(checks)
}

/// `max_t |M(t) - M(0)| / max(1, |M(0)|)` over the three Manley–Rowe functionals.
pub fn manley_rowe_drift(g: &FieldGrid) -> Result<f64> {
    let mr = manley_rowe_invariants(g, 1e-3)?;
    Ok(mr.iter().map(|m| m.iter().map(|v| (v - m[0]).abs()).fold(0.0, f64::max) / m[0].abs().max(1.0)).fold(0.0, f64::max))
}

fn validate(cfg: &ExperimentConfig, out: &Path) -> Result<Report> {
    let checks = validation_suite()?;
    let mut rep = Report::default();
    for c in &checks {
        rep.lines.push(format!("{} {}: {:.3e} (threshold {:.1e})", if c.passed { "PASS" } else { "FAIL" }, c.name, c.value, c.threshold));
        if !c.passed {
            rep.failures.push(c.name.clone());
        }
    }
    rep.files.push(write_output(out, "validate.json", Command::Validate, cfg, &checks)?);
    Ok(rep)
}

/// Config errors are usage errors; everything else is a failed run.
pub fn exit_code(r: &Result<Report>) -> i32 {
    match r {
        Ok(rep) if rep.failures.is_empty() => 0,
        Ok(_) => 1,
        Err(Error::Config(_)) | Err(Error::InvalidParams(_)) | Err(Error::InvalidPacket(_)) | Err(Error::InvalidGrid(_)) => 2,
        Err(_) => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_config;

    const CFG: &str = r#"{
        "model": {"epsilon": 0.4},
        "packets": [
            {"mode": 1, "shape": {"kind": "sech"}, "amplitude": 1.0, "width": 1.0, "center": -6.0, "support_halfwidth": 5.5},
            {"mode": 2, "shape": {"kind": "sech"}, "amplitude": 0.7, "width": 1.0, "center": 6.0, "support_halfwidth": 5.5}
        ],
        "grid": {"x_min": -12.0, "x_max": 12.0, "nx": 97, "t_min": 0.0, "t_max": 1.0, "nt": 5},
        "run": {"truncation_tol": 0.01, "epsilon_sweep": [0.25]}
    }"#;

    #[test]
    fn ensemble_pole_counts_follow_the_spectra() {
        let cfg = parse_config(CFG).unwrap();
        let packets = cfg.packets().unwrap();
        for eps in cfg.epsilons() {
            let params = ModelParams { epsilon: eps, ..cfg.model };
            let e = build_ensemble(&params, &packets).unwrap();
            let n: usize = packet_spectra(&params, &packets).unwrap().iter().map(|d| d.len()).sum();
            assert_eq!(e.len(), n);
            assert!(e.poles.iter().all(|p| p.lambda.im > 0.0));
        }
    }

    #[test]
    fn execute_writes_one_file_per_epsilon() {
        let cfg = parse_config(CFG).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let rep = execute(Command::Ensemble, &cfg, dir.path()).unwrap();
        assert_eq!(rep.files.len(), 2);
        assert!(rep.files.iter().all(|f| f.exists()));
        assert_eq!(exit_code(&Ok(rep)), 0);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Err(Error::Config("x".into()))), 2);
        assert_eq!(exit_code(&Err(Error::InvalidGrid("x".into()))), 2);
        assert_eq!(exit_code(&Err(Error::BlowUp(1.0))), 1);
        let failed = Report { failures: vec!["a".into()], ..Default::default() };
        assert_eq!(exit_code(&Ok(failed)), 1);
    }

    #[test]
    fn drift_of_a_static_field_is_zero() {
        let spec = GridSpec { x_min: -10.0, x_max: 10.0, nx: 201, t_min: 0.0, t_max: 1.0, nt: 3 };
        let params = ModelParams::with_epsilon(0.5).unwrap();
        let g = FieldGrid::from_fn(spec, params, |x, _| [Complex64::new((-x * x).exp(), 0.0); 3]).unwrap();
        assert!(manley_rowe_drift(&g).unwrap() < 1e-14);
    }
}
