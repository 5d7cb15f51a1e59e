use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use geophase::nmr::Mode;
use geophase::sweep::checks::{run_all, CheckSuite};
use geophase::sweep::{render, run_sweep, OutputFormat, Summary, SweepConfig};
use geophase::Error;

#[derive(Parser)]
#[command(
    name = "geophase",
    version,
    about = "Geometric-phase sweeps and cross-checks for a two-spin interferometer"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Simulation mode: `ideal` gates or compiled `pulse` sequences.
    #[arg(long, global = true)]
    mode: Option<Mode>,

    /// Output file (`sweep`) or directory (`demo`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// `csv` or `json`.
    #[arg(long, global = true)]
    format: Option<OutputFormat>,

    /// Pass threshold on the pairwise phase deviation, in radians.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the sweep described by a TOML config file.
    Sweep { config: PathBuf },
    /// Run the cross-validation suite and print a pass/fail table.
    Check,
    /// Run both reference sweeps (θ = π/4, φ = 0 and φ = π/4).
    Demo,
}

enum Failure {
    Validation,
    Config(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Config(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Sweep { config } => sweep(&cli, config),
        Command::Check => check(&cli),
        Command::Demo => demo(&cli),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation) => ExitCode::from(1),
        Err(Failure::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn apply_overrides(cli: &Cli, cfg: &mut SweepConfig) -> Result<(), Error> {
    if let Some(mode) = cli.mode {
        cfg.mode = mode;
    }
    if let Some(format) = cli.format {
        cfg.format = format;
    }
    if let Some(t) = cli.tolerance {
        cfg.threshold = t;
    }
    cfg.validate()
}

/// Runs one sweep, writes its records, prints the summary to stderr.
fn execute(cfg: &SweepConfig, out: Option<&Path>) -> Result<bool, Error> {
    let records = run_sweep(cfg)?;
    let bytes = render(&records, cfg.format)?;
    match out {
        Some(path) => std::fs::write(path, &bytes).map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?,
        None => std::io::stdout().write_all(&bytes).map_err(|e| Error::Io {
            path: "<stdout>".into(),
            message: e.to_string(),
        })?,
    }
    for r in records.iter().filter(|r| r.flagged()) {
        eprintln!("flagged s1_0={} s2_0={}: {}", r.s1_0, r.s2_0, r.note);
    }
    let summary = Summary::of(&records, cfg.threshold);
    eprintln!("{summary}");
    Ok(summary.passed())
}

fn sweep(cli: &Cli, path: &Path) -> Result<(), Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let mut cfg = SweepConfig::parse(&text)?;
    apply_overrides(cli, &mut cfg)?;
    if let Some(out) = &cli.out {
        cfg.out = Some(out.clone());
    }
    if execute(&cfg, cfg.out.as_deref())? {
        Ok(())
    } else {
        Err(Failure::Validation)
    }
}

fn demo(cli: &Cli) -> Result<(), Failure> {
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let mut passed = true;
    for (name, mut cfg) in ["sweep_phi0", "sweep_phi_pi4"]
        .into_iter()
        .zip(SweepConfig::demo())
    {
        apply_overrides(cli, &mut cfg)?;
        let path = dir.join(format!("{name}.{}", cfg.format.extension()));
        eprint!("{}: ", path.display());
        passed &= execute(&cfg, Some(&path))?;
    }
    if passed {
        Ok(())
    } else {
        Err(Failure::Validation)
    }
}

fn check(cli: &Cli) -> Result<(), Failure> {
    let mut suite = CheckSuite::default();
    if let Some(t) = cli.tolerance {
        if t.is_nan() || t <= 0.0 {
            return Err(Error::Config(format!("tolerance must be positive, got {t}")).into());
        }
        suite.agreement = t;
    }
    let outcomes = run_all(&suite);
    for o in &outcomes {
        println!("{o}");
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!(
        "{} of {} checks passed",
        outcomes.len() - failed,
        outcomes.len()
    );
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure::Validation)
    }
}
