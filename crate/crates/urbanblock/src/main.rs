use std::process::ExitCode;

use clap::Parser;
use urbanblock::cli::{run, Cli};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let pool = match urbanblock::worker_pool() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    let (result, log_path) = pool.install(|| run(&cli.command, cli.log.as_deref()));
    match result {
        Ok(outcome) => {
            println!("{}", outcome.summary.trim_end());
            log::info!("run log: {}", log_path.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            eprintln!("run log: {}", log_path.display());
            ExitCode::FAILURE
        }
    }
}
