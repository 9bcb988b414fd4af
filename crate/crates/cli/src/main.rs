use std::io::{self, Write};
use std::process::ExitCode;

use netform_cli::{parse_config, report, Command, ConfigError, PRESETS};

fn main() -> ExitCode {
    let command = match parse_config(std::env::args_os().skip(1)) {
        Ok(c) => c,
        Err(ConfigError::Args(e)) => e.exit(),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match execute(command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn execute(command: Command) -> anyhow::Result<()> {
    let mut out = io::stdout().lock();
    let config = match command {
        Command::ListPresets => {
            for p in PRESETS {
                writeln!(out, "{:<28}{}", p.name, p.about)?;
            }
            return Ok(());
        }
        Command::Run(config) => config,
        Command::Preset { name, config } => {
            writeln!(out, "preset {name}")?;
            config
        }
    };
    let r = report::run_experiment(&config)?;
    report::write_outputs(&r)?;
    report::print_summary(&r, &mut out)?;
    writeln!(
        out,
        "wrote {} output to {}",
        config.format,
        config.out.display()
    )?;
    Ok(())
}
