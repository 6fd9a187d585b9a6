mod args;
mod commands;

use clap::Parser;
use serde::Serialize;

use args::{Cli, Command};
use commands::Failure;

#[derive(Serialize)]
struct ErrorRecord<'a> {
    error: &'a str,
    message: &'a str,
}

fn run(cli: &Cli) -> Result<(), Failure> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(Failure::config("InvalidArgument", "--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Failure::config("InvalidArgument", e.to_string()))?;
    }
    match &cli.command {
        Command::Invariant(a) => commands::invariant(a),
        Command::Braid { command } => commands::braid(command),
        Command::Experiment { command } => commands::experiment(command),
        Command::Selftest => commands::selftest(),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(f) = run(&cli) {
        println!("{}", serde_json::to_string(&ErrorRecord { error: &f.code, message: &f.message }).unwrap());
        eprintln!("sympd: {}: {}", f.code, f.message);
        std::process::exit(if f.config { 2 } else { 1 });
    }
}
