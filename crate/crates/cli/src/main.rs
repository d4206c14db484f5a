use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use oamproca_cli::commands::{execute, Command};
use oamproca_cli::error::{CliError, Result};
use oamproca_cli::load_config;
use oamproca_cli::output::{render, Metadata};

/// Proca-mass and Riemann-Silberstein field tools for structured plasmas.
#[derive(Parser, Debug)]
#[command(name = "oamproca", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args, Debug)]
struct Global {
    /// Config file, or a previous CSV/JSON result to re-run.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override one key, e.g. `proca.E_amp=2` or `perturbation.1.q0=0.5`.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    sets: Vec<String>,
    /// Result file; stdout when absent.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// csv or json.
    #[arg(long, global = true)]
    format: Option<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for sweeps.
    #[arg(long, env = "OAMPROCA_JOBS", global = true)]
    jobs: Option<usize>,
    /// Record the wall-clock time in the result metadata.
    #[arg(long, global = true)]
    timestamp: bool,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Evaluate the Proca mass formulas, optionally over a sweep.
    Mass {
        /// Formula ids, comma separated (EQ1, EQ2, EQ11, EQ12).
        #[arg(long)]
        formula: Option<String>,
    },
    /// Print the angular-momentum mass tower.
    Tower {
        #[arg(long)]
        mstar: Option<f64>,
        /// bosonic or fermionic.
        #[arg(long)]
        kind: Option<String>,
        #[arg(long)]
        levels: Option<usize>,
        #[arg(long)]
        include_zero: bool,
    },
    /// Check positivity of the squared mass on a sweep or random points.
    CheckPositivity {
        /// Number of random in-regime points to draw.
        #[arg(long)]
        random: Option<usize>,
    },
    /// Measure the dispersion relation from a time-domain simulation.
    Dispersion {
        #[arg(long)]
        field_dump: Option<PathBuf>,
        /// csv or binary.
        #[arg(long)]
        field_format: Option<String>,
        /// Also evolve an RS plane wave and write it here.
        #[arg(long)]
        rs_dump: Option<PathBuf>,
    },
    /// Diagonalize the truncated mode-coupling matrix.
    Modes {
        #[arg(long, allow_negative_numbers = true)]
        ell_min: Option<i64>,
        #[arg(long, allow_negative_numbers = true)]
        ell_max: Option<i64>,
        #[arg(long)]
        k_center: Option<f64>,
    },
    /// Check the generator commutation relations.
    AlgebraVerify,
}

fn push<T: ToString>(sets: &mut Vec<String>, key: &str, v: Option<T>) {
    if let Some(v) = v {
        sets.push(format!("{key}={}", v.to_string()));
    }
}

/// Turn subcommand and global flags into overrides applied after `--set`.
fn flag_overrides(cli: &Cli) -> (Command, Vec<String>) {
    let mut s = Vec::new();
    let g = &cli.global;
    push(&mut s, "seed", g.seed);
    push(&mut s, "output.format", g.format.clone());
    push(
        &mut s,
        "output.path",
        g.output.as_ref().map(|p| p.display().to_string()),
    );
    let command = match &cli.command {
        Cmd::Mass { formula } => {
            push(&mut s, "mass.formulas", formula.clone());
            Command::Mass
        }
        Cmd::Tower {
            mstar,
            kind,
            levels,
            include_zero,
        } => {
            push(&mut s, "tower.mstar", *mstar);
            push(&mut s, "tower.kind", kind.clone());
            push(&mut s, "tower.levels", *levels);
            push(&mut s, "tower.include_zero", include_zero.then_some(true));
            Command::Tower
        }
        Cmd::CheckPositivity { random } => {
            push(&mut s, "check.random", *random);
            Command::CheckPositivity
        }
        Cmd::Dispersion {
            field_dump,
            field_format,
            rs_dump,
        } => {
            push(
                &mut s,
                "dispersion.field_dump",
                field_dump.as_ref().map(|p| p.display().to_string()),
            );
            push(&mut s, "dispersion.field_format", field_format.clone());
            push(&mut s, "rs.dump", rs_dump.as_ref().map(|p| p.display().to_string()));
            Command::Dispersion
        }
        Cmd::Modes {
            ell_min,
            ell_max,
            k_center,
        } => {
            push(&mut s, "modes.ell_min", *ell_min);
            push(&mut s, "modes.ell_max", *ell_max);
            push(&mut s, "modes.k_center", *k_center);
            Command::Modes
        }
        Cmd::AlgebraVerify => Command::AlgebraVerify,
    };
    (command, s)
}

fn run(cli: &Cli) -> Result<i32> {
    let (command, flags) = flag_overrides(cli);
    let overrides: Vec<String> = cli.global.sets.iter().cloned().chain(flags).collect();
    let cfg = load_config(cli.global.config.as_deref(), &overrides)?;
    let jobs = cli
        .global
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
    let report = execute(command, &cfg, jobs)?;
    let timestamp = cli.global.timestamp.then(|| {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0)
    });
    let bytes = render(
        &report.table,
        &cfg,
        &Metadata {
            command: command.name().to_string(),
            timestamp,
        },
    )?;
    match &cfg.path {
        Some(path) => std::fs::write(path, &bytes).map_err(|e| CliError::io(path.display().to_string(), e))?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(&bytes)
                .and_then(|_| out.flush())
                .map_err(|e| CliError::io("stdout", e))?;
        }
    }
    for line in &report.summary {
        eprintln!("{line}");
    }
    Ok(report.exit_code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
