use std::process::ExitCode;

use clap::Parser;
use nongauss::{render, run, Cli, RunConfig, Status};

fn main() -> ExitCode {
    let cfg = RunConfig::from(Cli::parse());
    let report = match run(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("nongauss: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let text = match render(&report) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("nongauss: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let written = match &cfg.out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("nongauss: {e}");
        return ExitCode::from(2);
    }
    match report.status {
        Status::Ok => ExitCode::SUCCESS,
        // failed verify assertions
        Status::Failed => ExitCode::from(1),
    }
}
