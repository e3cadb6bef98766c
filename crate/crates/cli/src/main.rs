use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use momenta_cli::config::{CommonArgs, Format, ScenarioConfig, OUT_ENV};
use momenta_cli::report::render_json;
use momenta_cli::{inspect, scenarios, simulate, CliError};

#[derive(Parser)]
#[command(name = "momenta", version, about = "Numerical checks for moment maps, reduction, Weyl chambers and Poisson transversals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the check battery of a scenario and write its report.
    Verify(CommonArgs),
    /// Integrate a system and write its trajectory.
    Simulate(CommonArgs),
    /// Root system, chamber faces and isotropy data of an algebra.
    Roots(CommonArgs),
    /// Transversality reports along named submanifolds.
    Transversal(CommonArgs),
}

/// Write `body` to `<dir>/<stem>.<ext>` or to stdout.
fn emit(dir: Option<&PathBuf>, stem: &str, ext: &str, body: &str) -> Result<(), CliError> {
    match dir {
        Some(d) => {
            std::fs::create_dir_all(d)?;
            std::fs::write(d.join(format!("{stem}.{ext}")), body)?;
        }
        None => std::io::stdout().write_all(body.as_bytes())?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let env_out = std::env::var_os(OUT_ENV).filter(|v| !v.is_empty()).map(PathBuf::from);
    match cli.command {
        Command::Verify(args) => {
            let cfg = ScenarioConfig::resolve(&args, env_out)?;
            if cfg.scenario_id.is_empty() {
                return Err(CliError::Usage(format!("verify needs --scenario; available: {}", scenarios::scenario_ids().join(", "))));
            }
            let report = scenarios::run_verify(&cfg)?;
            let (body, ext) = match cfg.format {
                Format::Json => (render_json(report.to_json()), "json"),
                Format::Csv => (report.to_csv()?, "csv"),
            };
            emit(cfg.output_dir.as_ref(), &report.scenario_id, ext, &body)?;
            let summary = report.summary();
            if cfg.output_dir.is_some() {
                print!("{summary}");
            } else {
                eprint!("{summary}");
            }
            Ok(report.pass())
        }
        Command::Simulate(args) => {
            let cfg = ScenarioConfig::resolve(&args, env_out)?;
            let table = simulate::run_simulate(&cfg)?;
            let stem = if table.complete() { cfg.scenario_id.clone() } else { format!("{}.partial", cfg.scenario_id) };
            let (body, ext) = match cfg.format {
                Format::Json => (render_json(table.to_json()), "json"),
                Format::Csv => (table.to_csv()?, "csv"),
            };
            emit(cfg.output_dir.as_ref(), &stem, ext, &body)?;
            if let Some(f) = &table.failure {
                eprintln!("integration stopped after {} rows: {f}", table.rows.len());
            }
            Ok(table.complete())
        }
        Command::Roots(args) => {
            let cfg = ScenarioConfig::resolve(&args, env_out)?;
            let out = inspect::run_roots(&cfg)?;
            let stem = format!("roots-{}", cfg.algebra.as_deref().unwrap_or_default());
            emit(cfg.output_dir.as_ref(), &stem, "json", &render_json(out))?;
            Ok(true)
        }
        Command::Transversal(args) => {
            let cfg = ScenarioConfig::resolve(&args, env_out)?;
            let out = inspect::run_transversal(&cfg)?;
            emit(cfg.output_dir.as_ref(), &format!("transversal-{}", cfg.scenario_id), "json", &render_json(out))?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
