use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use layerflow::experiments::{
    identity_suite, parse_config, preset, preset_names, report, run_scenario,
};
use layerflow::oracles::{run_oracle_suite, write_oracle_csv};
use layerflow::Error;

#[derive(Parser)]
#[command(
    name = "layerflow",
    version,
    about = "Boundary-layer heat flow experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a preset or a TOML scenario and write its CSV report.
    Run {
        /// Committed preset name (see `list-presets`).
        #[arg(long, conflicts_with = "config", required_unless_present = "config")]
        preset: Option<String>,
        /// TOML scenario file.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output CSV; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the committed presets.
    ListPresets,
    /// Run the structural identity checks.
    Check,
    /// Run the independent oracle suite and print its CSV.
    Oracle,
}

fn run(cli: Cli) -> Result<bool, Error> {
    match cli.command {
        Command::Run {
            preset: name,
            config,
            out,
        } => {
            let mut scenario = match (name, config) {
                (Some(n), _) => preset(&n)?,
                (None, Some(path)) => parse_config(&std::fs::read_to_string(path)?)?,
                (None, None) => unreachable!("clap requires one source"),
            };
            for w in &scenario.warnings {
                eprintln!("warning: {w}");
            }
            scenario.output = out.or(scenario.output.take());
            let rows = run_scenario(&scenario)?;
            if scenario.output.is_none() {
                report::write_rows(&rows, std::io::stdout().lock())?;
            }
            Ok(true)
        }
        Command::ListPresets => {
            let mut stdout = std::io::stdout().lock();
            for n in preset_names() {
                writeln!(stdout, "{n}")?;
            }
            Ok(true)
        }
        Command::Check => {
            let checks = identity_suite()?;
            let mut stdout = std::io::stdout().lock();
            for c in &checks {
                let tag = if c.passed { "PASS" } else { "FAIL" };
                writeln!(
                    stdout,
                    "{tag} {} value={:e} tol={:e}",
                    c.name, c.value, c.tolerance
                )?;
            }
            Ok(checks.iter().all(|c| c.passed))
        }
        Command::Oracle => {
            let results = run_oracle_suite()?;
            write_oracle_csv(&results, std::io::stdout().lock())?;
            Ok(results.iter().all(|r| r.passed))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
