use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser};

use stepswitch::run::{preset, run, Mode, RunConfig, PRESETS};
use stepswitch::Error;

/// Transient wavefunctions after a sudden potential-step switch.
///
/// Exit status: 0 on success, 1 for invalid input or I/O errors, 2 when a
/// numerical method fails.
#[derive(Debug, Parser)]
#[command(name = "stepswitch", version)]
#[command(group(ArgGroup::new("source").args(["config", "preset", "list_presets"]).required(true)))]
struct Cli {
    /// TOML run configuration.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Built-in figure preset (fig1..fig8).
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,
    /// Override the mode of every dataset: exact, approx, oracle, grid, compare.
    #[arg(long, value_name = "M")]
    mode: Option<Mode>,
    /// Output directory.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Quadrature tolerance.
    #[arg(long, value_name = "X")]
    tol: Option<f64>,
    /// Print the resolved configuration as TOML and exit.
    #[arg(long)]
    print_config: bool,
    /// List preset names and exit.
    #[arg(long)]
    list_presets: bool,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Overflow { .. } | Error::NoConvergence { .. } => 2,
        _ => 1,
    }
}

fn resolve(cli: &Cli) -> Result<RunConfig, Error> {
    let mut cfg = match (&cli.config, &cli.preset) {
        (Some(path), _) => RunConfig::load(path)?,
        (None, Some(name)) => preset(name)?,
        (None, None) => unreachable!("clap requires a source"),
    };
    if let Some(m) = cli.mode {
        cfg.override_mode(m);
    }
    if let Some(out) = &cli.out {
        cfg.out = Some(out.clone());
    }
    if let Some(tol) = cli.tol {
        cfg.tol = Some(tol);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if cli.list_presets {
        for p in PRESETS {
            println!("{p}");
        }
        return ExitCode::SUCCESS;
    }
    let cfg = match resolve(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    if cli.print_config {
        return match cfg.to_toml() {
            Ok(s) => {
                print!("{s}");
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        };
    }
    match run(&cfg) {
        Ok(m) => {
            for w in &m.warnings {
                eprintln!("warning: {w}");
            }
            for f in &m.files {
                println!("{} ({} rows)", f.path.display(), f.rows);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
