use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dnls_trains::harness::{exit_code, run, Command, ExperimentConfig};

#[derive(Parser)]
#[command(name = "dnls-lab", version, about = "Soliton and kink-soliton train experiments for derivative NLS")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample member and train profiles
    Profile(Common),
    /// Interaction residual decay and its fitted rate
    Residual(Common),
    /// Drift of the evolved solution away from the train profile
    Evolve(Common),
    /// Picard iteration for the correction, plus the synthesized solution
    Fixpoint(Common),
    /// Run one command over a list of values for a config key
    Sweep(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// KEY=VALUE with a dotted key, e.g. grid.n=2048 (repeatable)
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Cmd::Profile(a) => (Command::Profile, a),
        Cmd::Residual(a) => (Command::Residual, a),
        Cmd::Evolve(a) => (Command::Evolve, a),
        Cmd::Fixpoint(a) => (Command::Fixpoint, a),
        Cmd::Sweep(a) => (Command::Sweep, a),
    };
    let result = ExperimentConfig::load(&args.config, &args.overrides).and_then(|cfg| run(command, &cfg, &args.out));
    match result {
        Ok(summary) => {
            for w in &summary.warnings {
                eprintln!("warning: {w}");
            }
            for f in &summary.files {
                println!("{}", f.display());
            }
            ExitCode::from(summary.exit_code as u8)
        }
        Err(e) => {
            eprintln!("dnls-lab {command}: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
