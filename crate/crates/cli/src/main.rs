use std::path::{Path, PathBuf};
use std::process::ExitCode;

use basel_cli::disclosure::run_disclose;
use basel_cli::report::{
    render_compare_kv, render_compare_text, render_compute_kv, render_compute_text,
};
use basel_cli::{exit_code, tables, CliError, EngineConfig, Inputs, Overrides, Regime, ERROR_EXIT};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "basel", version, about = "Regulatory capital calculator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Kv,
}

#[derive(Subcommand)]
enum Command {
    /// Capital requirement and ratio under the configured regime.
    Compute {
        #[command(flatten)]
        engine: Overrides,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Write the report here instead of stdout.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Basel I and Basel II side by side.
    Compare {
        #[command(flatten)]
        engine: Overrides,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Half-yearly public disclosure document.
    Disclose {
        #[command(flatten)]
        engine: Overrides,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Write the active weight, CCF and beta tables in their loadable form.
    DumpTables {
        #[command(flatten)]
        engine: Overrides,
        #[arg(long, value_name = "DIR")]
        out_dir: PathBuf,
    },
    /// Load and check the configuration and inputs without computing.
    Validate {
        #[command(flatten)]
        engine: Overrides,
    },
}

fn emit(text: &str, output: Option<&Path>) -> Result<(), CliError> {
    match output {
        Some(path) => std::fs::write(path, text).map_err(CliError::io(path)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(command: Command) -> Result<u8, CliError> {
    match command {
        Command::Compute {
            engine,
            format,
            output,
        } => {
            let cfg = EngineConfig::load(&engine)?;
            let outcome = basel_cli::run_compute(&cfg, &Inputs::load(&cfg)?)?;
            let text = match format {
                Format::Text => render_compute_text(&outcome),
                Format::Kv => render_compute_kv(&outcome),
            };
            emit(&text, output.as_deref())?;
            Ok(exit_code(outcome.compliant()))
        }
        Command::Compare {
            engine,
            format,
            output,
        } => {
            let cfg = EngineConfig::load(&engine)?;
            let outcome = basel_cli::run_compare(&cfg, &Inputs::load(&cfg)?)?;
            let text = match format {
                Format::Text => render_compare_text(&outcome),
                Format::Kv => render_compare_kv(&outcome),
            };
            emit(&text, output.as_deref())?;
            Ok(exit_code(outcome.compliant()))
        }
        Command::Disclose { engine, output } => {
            let cfg = EngineConfig::load(&engine)?;
            if cfg.period.is_none() {
                return Err(CliError::MissingPeriod);
            }
            let outcome = basel_cli::run_compute(&cfg, &Inputs::load(&cfg)?)?;
            emit(&run_disclose(&outcome, None)?, output.as_deref())?;
            Ok(exit_code(outcome.compliant()))
        }
        Command::DumpTables { engine, out_dir } => {
            let cfg = EngineConfig::load(&engine)?;
            std::fs::create_dir_all(&out_dir).map_err(CliError::io(&out_dir))?;
            let t = &cfg.tables;
            for (name, text) in [
                (
                    tables::RISK_WEIGHTS_FILE,
                    tables::dump_risk_weights(&t.weights),
                ),
                (tables::CCF_FILE, tables::dump_ccf(&t.ccf)),
                (tables::BETAS_FILE, tables::dump_betas(&t.betas)),
            ] {
                let path = out_dir.join(name);
                std::fs::write(&path, &text).map_err(CliError::io(&path))?;
                println!("{} ({})", path.display(), tables::version(&text));
            }
            Ok(0)
        }
        Command::Validate { engine } => {
            let cfg = EngineConfig::load(&engine)?;
            cfg.check(cfg.regime)?;
            let inputs = Inputs::load(&cfg)?;
            if cfg.regime == Regime::Basel2 && inputs.income.is_none() {
                return Err(CliError::Config(
                    "regime basel2 needs an income file (inputs.income)".into(),
                ));
            }
            println!(
                "ok: {} exposure(s), regime {}, currency {}",
                inputs.portfolio.len(),
                cfg.regime,
                cfg.currency
            );
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(ERROR_EXIT)
        }
    }
}
