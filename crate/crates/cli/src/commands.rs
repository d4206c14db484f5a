//! Subcommand implementations. Each returns a result table plus an exit
//! code; writing the table is left to the caller.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;
use oamproca_core::algebra::{build_generators, verify_algebra, Helicity, Wavevector};
use oamproca_core::dispersion::{
    effective_mass_spectrum, mode_coupling_matrix, run_dispersion, truncation_shift, DispersionSetup, ScalarWaveState,
};
use oamproca_core::grid::Grid3;
use oamproca_core::proca_mass::{evaluate, positivity_check, sigma_extract_default, ProcaInputs};
use oamproca_core::rs_field::{evolve, plane_wave};
use oamproca_core::tower::{tower_spectrum_with, TowerOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{DumpFormat, RunConfig, SweepSpec};
use crate::error::{CliError, Result};
use crate::output::{Cell, Table};
use crate::sweep::run_indexed;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Mass,
    Tower,
    CheckPositivity,
    Dispersion,
    Modes,
    AlgebraVerify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Mass => "mass",
            Command::Tower => "tower",
            Command::CheckPositivity => "check-positivity",
            Command::Dispersion => "dispersion",
            Command::Modes => "modes",
            Command::AlgebraVerify => "algebra-verify",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub table: Table,
    /// 0 on success, 1 when a checked claim was falsified.
    pub exit_code: i32,
    /// Human-readable lines for stderr; not part of the result file.
    pub summary: Vec<String>,
}

impl Report {
    fn ok(table: Table, summary: Vec<String>) -> Self {
        Self {
            table,
            exit_code: 0,
            summary,
        }
    }
}

pub fn execute(command: Command, cfg: &RunConfig, jobs: usize) -> Result<Report> {
    if cfg.sweep.is_some() && !matches!(command, Command::Mass | Command::CheckPositivity) {
        return Err(CliError::Config(format!(
            "[sweep] is not supported by `{}`",
            command.name()
        )));
    }
    match command {
        Command::Mass => mass(cfg, jobs),
        Command::Tower => tower(cfg),
        Command::CheckPositivity => check_positivity(cfg, jobs),
        Command::Dispersion => dispersion(cfg),
        Command::Modes => modes(cfg),
        Command::AlgebraVerify => Ok(algebra_verify()),
    }
}

/// One evaluation point of a sweep-capable command.
struct Point {
    value: Option<f64>,
    inputs: std::result::Result<ProcaInputs, CliError>,
}

/// Setup problems (missing or malformed keys) abort the run; anything else
/// stays attached to its row.
fn is_setup_error(e: &CliError) -> bool {
    matches!(
        e,
        CliError::MissingKey(_) | CliError::MalformedNumber { .. } | CliError::Config(_)
    )
}

fn sweep_points(cfg: &RunConfig, jobs: usize) -> Result<Vec<Point>> {
    let points = match &cfg.sweep {
        None => vec![Point {
            value: None,
            inputs: cfg.proca_inputs(),
        }],
        Some(sweep) => {
            let values = sweep.values();
            run_indexed(values.len(), jobs, |i| Point {
                value: Some(values[i]),
                inputs: cfg.with_param(sweep.param, values[i]).and_then(|c| c.proca_inputs()),
            })?
        }
    };
    for p in &points {
        if let Err(e) = &p.inputs {
            if is_setup_error(e) || cfg.sweep.is_none() {
                return Err(clone_error(e));
            }
        }
    }
    Ok(points)
}

fn clone_error(e: &CliError) -> CliError {
    match e {
        CliError::MissingKey(k) => CliError::MissingKey(k.clone()),
        CliError::MalformedNumber { key, value } => CliError::MalformedNumber {
            key: key.clone(),
            value: value.clone(),
        },
        CliError::Config(m) => CliError::Config(m.clone()),
        CliError::PerturbationExceedsDensity { sum, n0 } => CliError::PerturbationExceedsDensity { sum: *sum, n0: *n0 },
        CliError::Io { path, source } => {
            CliError::io(path.clone(), std::io::Error::new(source.kind(), source.to_string()))
        }
        CliError::Numerical(e) => CliError::Numerical(e.clone()),
    }
}

fn leading_columns(sweep: Option<&SweepSpec>) -> Vec<String> {
    let mut cols = vec!["index".to_string()];
    if let Some(s) = sweep {
        cols.push(s.param.name().to_string());
    }
    cols
}

fn leading_cells(index: usize, value: Option<f64>) -> Vec<Cell> {
    let mut cells = vec![Cell::Int(index as i64)];
    if let Some(v) = value {
        cells.push(Cell::Float(v));
    }
    cells
}

fn mass(cfg: &RunConfig, jobs: usize) -> Result<Report> {
    let points = sweep_points(cfg, jobs)?;
    let mut columns = leading_columns(cfg.sweep.as_ref());
    columns.extend(["formula_id", "mu_sq", "mu", "holds", "sigma", "in_regime", "error"].map(String::from));
    let mut table = Table::new(columns);
    let rows = run_indexed(points.len(), jobs, |i| {
        let p = &points[i];
        cfg.formulas
            .iter()
            .map(|&f| {
                let mut row = leading_cells(i, p.value);
                row.push(Cell::Text(f.as_str().to_string()));
                let inputs = match &p.inputs {
                    Ok(inputs) => inputs,
                    Err(e) => {
                        row.extend([
                            Cell::Empty,
                            Cell::Empty,
                            Cell::Empty,
                            Cell::Empty,
                            Cell::Empty,
                            Cell::Text(e.to_string()),
                        ]);
                        return (row, true);
                    }
                };
                match evaluate(inputs, f) {
                    Ok(r) => {
                        let sigma =
                            r.mu.filter(|&mu| mu > 0.0)
                                .and_then(|mu| sigma_extract_default(mu, &inputs.profile).ok());
                        row.extend([
                            Cell::Float(r.mu_sq),
                            Cell::opt(r.mu),
                            Cell::Bool(positivity_check(inputs).holds),
                            Cell::opt(sigma),
                            Cell::Bool(r.in_regime),
                            Cell::Empty,
                        ]);
                        (row, false)
                    }
                    Err(e) => {
                        row.extend([
                            Cell::Empty,
                            Cell::Empty,
                            Cell::Empty,
                            Cell::Empty,
                            Cell::Empty,
                            Cell::Text(e.to_string()),
                        ]);
                        (row, true)
                    }
                }
            })
            .collect::<Vec<_>>()
    })?;
    let rows: Vec<(Vec<Cell>, bool)> = rows.into_iter().flatten().collect();
    if cfg.sweep.is_none() && rows.iter().all(|(_, failed)| *failed) {
        let inputs = points[0].inputs.as_ref().map_err(clone_error)?;
        if let Err(e) = evaluate(inputs, cfg.formulas[0]) {
            return Err(e.into());
        }
    }
    let failed = rows.iter().filter(|(_, f)| *f).count();
    let total = rows.len();
    for (row, _) in rows {
        table.push(row);
    }
    Ok(Report::ok(table, vec![format!("{total} rows, {failed} with errors")]))
}

fn tower(cfg: &RunConfig) -> Result<Report> {
    let m_star = match (cfg.tower.mstar, cfg.n0) {
        (Some(m), _) => m,
        (None, Some(_)) => cfg.profile()?.omega_p0(),
        (None, None) => return Err(CliError::MissingKey("mstar".into())),
    };
    let opts = TowerOptions {
        include_zero: cfg.tower.include_zero,
    };
    let levels = tower_spectrum_with(m_star, cfg.tower.kind, cfg.tower.levels, opts)?;
    let mut table = Table::new(["j", "mu"]);
    for e in levels {
        table.push(vec![Cell::Text(e.j.to_string()), Cell::Float(e.mu)]);
    }
    Ok(Report::ok(table, vec![format!("m* = {m_star}")]))
}

/// Random in-regime inputs around the configured `E_amp` and `n0`: `|g| ≤
/// 0.1 E`, `Σñ ≤ 0.1 n0`, `δv̇` a random fraction of its regime limit.
/// Point `index` draws from its own stream, so the set does not depend on
/// the worker count.
fn random_point(cfg: &RunConfig, index: usize) -> Result<RunConfig> {
    let e = cfg.require_e_amp()?;
    let n0 = cfg.require_n0()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index as u64);
    let mut c = cfg.clone();
    c.proca.grad_phi_par = e * rng.random_range(-0.1..=0.1);
    let ratio: f64 = rng.random_range(0.0..=0.1);
    c.proca.phi = rng.random_range(-PI..PI);
    c.proca.z = rng.random_range(-50.0..50.0);
    if c.perturbations.is_empty() {
        c.perturbations.push(crate::config::PerturbationSpec {
            n_tilde: 0.0,
            ell0: 1,
            q0: 0.0,
            phase: 0.0,
        });
    }
    let total: f64 = c.perturbations.iter().map(|p| p.n_tilde).sum();
    if total > 0.0 {
        let scale = ratio * n0 / total;
        c.perturbations.iter_mut().for_each(|p| p.n_tilde *= scale);
    } else {
        c.perturbations[0].n_tilde = ratio * n0;
    }
    let profile = c.profile()?;
    let n_local = profile.density(c.proca.phi, c.proca.z);
    let limit = 0.5 * e * profile.omega_p0_sq() / (4.0 * PI * n_local);
    c.proca.delta_v_dot = rng.random_range(0.0..=1.0) * limit;
    Ok(c)
}

fn check_positivity(cfg: &RunConfig, jobs: usize) -> Result<Report> {
    let random = cfg.check_random > 0;
    if random && cfg.sweep.is_some() {
        return Err(CliError::Config("check.random and [sweep] cannot be combined".into()));
    }
    let points: Vec<Point> = if random {
        run_indexed(cfg.check_random, jobs, |i| Point {
            value: None,
            inputs: random_point(cfg, i).and_then(|c| c.proca_inputs()),
        })?
        .into_iter()
        .map(|p| match p.inputs {
            Err(e) if !is_setup_error(&e) => Point {
                value: None,
                inputs: Err(e),
            },
            other => Point {
                value: None,
                inputs: other,
            },
        })
        .collect()
    } else {
        sweep_points(cfg, jobs)?
    };
    if let Some(Point { inputs: Err(e), .. }) = points.iter().find(|p| matches!(&p.inputs, Err(e) if is_setup_error(e)))
    {
        return Err(clone_error(e));
    }

    let mut columns = leading_columns(cfg.sweep.as_ref());
    if random {
        columns.extend(["E_amp", "grad_phi_par", "delta_v_dot", "n_tilde", "phi", "z"].map(String::from));
    }
    columns.extend(["mu_sq", "holds", "lhs", "rhs", "in_regime", "error"].map(String::from));
    let mut table = Table::new(columns);

    let rows = run_indexed(points.len(), jobs, |i| {
        let p = &points[i];
        let mut row = leading_cells(i, p.value);
        let inputs = match &p.inputs {
            Ok(inputs) => inputs,
            Err(e) => {
                if random {
                    row.extend(std::iter::repeat_n(Cell::Empty, 6));
                }
                row.extend([
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Text(e.to_string()),
                ]);
                return (row, false, false);
            }
        };
        if random {
            row.extend([
                Cell::Float(inputs.e_amp),
                Cell::Float(inputs.grad_phi_par),
                Cell::Float(inputs.delta_v_dot),
                Cell::Float(inputs.profile.total_amplitude()),
                Cell::Float(inputs.at.phi),
                Cell::Float(inputs.at.z),
            ]);
        }
        let check = positivity_check(inputs);
        let in_regime = inputs.in_regime();
        match evaluate(inputs, oamproca_core::proca_mass::FormulaId::Eq2) {
            Ok(r) => {
                row.extend([
                    Cell::Float(r.mu_sq),
                    Cell::Bool(check.holds),
                    Cell::Float(check.lhs),
                    Cell::Float(check.rhs),
                    Cell::Bool(in_regime),
                    Cell::Empty,
                ]);
                (row, in_regime, in_regime && r.mu_sq <= 0.0)
            }
            Err(e) => {
                row.extend([
                    Cell::Empty,
                    Cell::Bool(check.holds),
                    Cell::Float(check.lhs),
                    Cell::Float(check.rhs),
                    Cell::Bool(in_regime),
                    Cell::Text(e.to_string()),
                ]);
                (row, in_regime, false)
            }
        }
    })?;

    if cfg.sweep.is_none() && !random {
        if let Some(Point { inputs: Ok(inputs), .. }) = points.first() {
            if let Err(e) = evaluate(inputs, oamproca_core::proca_mass::FormulaId::Eq2) {
                return Err(e.into());
            }
        }
    }

    let in_regime = rows.iter().filter(|r| r.1).count();
    let violations = rows.iter().filter(|r| r.2).count();
    let total = rows.len();
    for (row, _, _) in rows {
        table.push(row);
    }
    let summary = vec![format!(
        "{total} points, {in_regime} in regime, {violations} in-regime points with mu_sq <= 0"
    )];
    Ok(Report {
        table,
        exit_code: if violations > 0 { 1 } else { 0 },
        summary,
    })
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::io(path.display().to_string(), e))
}

fn write_scalar_state(state: &ScalarWaveState, path: &Path, format: DumpFormat) -> Result<()> {
    let io_err = |e| CliError::io(path.display().to_string(), e);
    let mut w = create(path)?;
    if format == DumpFormat::Csv {
        writeln!(w, "x,y,z,u,udot").map_err(io_err)?;
    }
    for i in 0..state.grid.len() {
        let [x, y, z] = state.grid.position(i);
        let rec = [x, y, z, state.u[i], state.udot[i]];
        match format {
            DumpFormat::Csv => writeln!(w, "{},{},{},{},{}", rec[0], rec[1], rec[2], rec[3], rec[4]).map_err(io_err)?,
            DumpFormat::Binary => {
                for v in rec {
                    w.write_all(&v.to_le_bytes()).map_err(io_err)?;
                }
            }
        }
    }
    w.flush().map_err(io_err)
}

fn write_rs_dump(cfg: &RunConfig, path: &Path) -> Result<String> {
    let rs = &cfg.rs;
    let grid = Grid3::new([rs.points; 3], [rs.length; 3])?;
    let k = Wavevector(rs.mode.map(|m| 2.0 * PI * m as f64 / rs.length));
    let helicity = Helicity::from_sign(rs.helicity)?;
    let field = plane_wave(&k, Complex64::new(1.0, 0.0), helicity, &grid)?;
    let evolved = evolve(&field, rs.time / rs.steps as f64, rs.steps)?;
    let io_err = |e| CliError::io(path.display().to_string(), e);
    let mut w = create(path)?;
    match rs.format {
        DumpFormat::Csv => evolved.write_csv(&mut w).map_err(io_err)?,
        DumpFormat::Binary => evolved.write_binary(&mut w).map_err(io_err)?,
    }
    w.flush().map_err(io_err)?;
    Ok(format!(
        "RS plane wave mode {:?} evolved to t = {}: energy drift {:e}",
        rs.mode,
        rs.time,
        (evolved.energy() - field.energy()) / field.energy()
    ))
}

fn dispersion(cfg: &RunConfig) -> Result<Report> {
    let profile = cfg.profile()?;
    let d = &cfg.dispersion;
    let setup = DispersionSetup {
        points: d.points,
        length: d.length,
        dt: d.dt,
        samples: d.samples,
        modes: d.modes.clone(),
        amplitude: d.amplitude,
        substeps: d.substeps,
    };
    let run = run_dispersion(&setup, &profile)?;
    let mut table = Table::new(["k", "omega", "power"]);
    for s in &run.measurement.samples {
        table.push(vec![Cell::Float(s.k), Cell::Float(s.omega), Cell::Float(s.power)]);
    }
    let mut summary = vec![format!("frequency resolution {}", run.measurement.resolution)];
    match &run.fit {
        Some(fit) => summary.push(format!(
            "fitted mu_sq = {} +/- {} (omega_p0^2 = {})",
            fit.mu_sq,
            fit.stderr,
            profile.omega_p0_sq()
        )),
        None => summary.push("too few distinct wavenumbers for a mass fit".into()),
    }
    if let Some(path) = &d.field_dump {
        write_scalar_state(&run.final_state, path, d.field_format)?;
        summary.push(format!("final field written to {}", path.display()));
    }
    if let Some(path) = &cfg.rs.dump {
        summary.push(write_rs_dump(cfg, path)?);
    }
    Ok(Report::ok(table, summary))
}

fn modes(cfg: &RunConfig) -> Result<Report> {
    let profile = cfg.profile()?;
    let m = &cfg.modes;
    let matrix = mode_coupling_matrix(&profile, m.ell_min..=m.ell_max, m.k_center, m.radial_cut)?;
    let spectrum = effective_mass_spectrum(&matrix)?;
    let mut table = Table::new(["mode_ell", "k_z", "mu_sq_eff", "eigenvalue", "weight", "negative"]);
    for e in &spectrum {
        table.push(vec![
            Cell::Int(e.dominant.ell),
            Cell::Float(e.dominant.k_z),
            Cell::Float(e.mu_sq_eff),
            Cell::Float(e.eigenvalue),
            Cell::Float(e.weight),
            Cell::Bool(e.is_negative()),
        ]);
    }
    let negative = spectrum.iter().filter(|e| e.is_negative()).count();
    let mut summary = vec![format!("{} modes, {negative} with negative mu_sq_eff", spectrum.len())];
    if let Ok(shift) = truncation_shift(&profile, m.ell_min..=m.ell_max, m.k_center) {
        summary.push(format!("eigenvalue shift on doubling the ell range: {shift:e}"));
    }
    Ok(Report::ok(table, summary))
}

fn algebra_verify() -> Report {
    let report = verify_algebra(&build_generators());
    let mut table = Table::new(["identity", "pass", "max_defect"]);
    for c in &report.checks {
        table.push(vec![
            Cell::Text(c.name.clone()),
            Cell::Bool(c.pass),
            Cell::Float(c.max_defect),
        ]);
    }
    let failed: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
    let mut summary = vec![format!(
        "{} identities, {} pass",
        report.checks.len(),
        report.checks.len() - failed.len()
    )];
    if !failed.is_empty() {
        summary.push(format!("failing: {}", failed.join("; ")));
    }
    Report {
        table,
        exit_code: if failed.is_empty() { 0 } else { 1 },
        summary,
    }
}
