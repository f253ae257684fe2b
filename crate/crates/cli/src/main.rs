use std::process::ExitCode;

use dyngraph_cli::{default_workers, run, RunConfig};

fn main() -> ExitCode {
    let (config, workers) = match RunConfig::parse_args(std::env::args().skip(1)) {
        Ok(parsed) => parsed,
        Err(e) => {
            // clap renders help and version through its own error type
            if let Some(clap_err) = e.downcast_ref::<clap::Error>() {
                let _ = clap_err.print();
                return if clap_err.use_stderr() {
                    ExitCode::from(2)
                } else {
                    ExitCode::SUCCESS
                };
            }
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let workers = workers.unwrap_or_else(default_workers);
    eprintln!("workers={workers}");
    match run(&config, workers) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
