use std::process::ExitCode;

use clap::Parser;
use sharpshock::presets::Preset;
use sharpshock_cli::{run_experiment, Cli, Command, ExperimentSpec};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::Presets => {
            for p in Preset::ALL {
                let s = p.spec();
                println!("{:<18} {:<14} cells {:<5} t_end {}", p.name(), s.flux.name(), s.cells, s.t_end);
            }
            ExitCode::SUCCESS
        }
        Command::Run(args) => {
            let result = args.to_raw().and_then(ExperimentSpec::resolve).and_then(|spec| run_experiment(&spec));
            match result {
                Ok(report) => {
                    println!("{}", serde_json::to_string(&report.snapshots).unwrap_or_default());
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code())
                }
            }
        }
    }
}
