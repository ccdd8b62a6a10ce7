use std::process::ExitCode;

use dissipaq::config::WORKERS_ENV;
use dissipaq::{parse_args, run, Parsed, RunError};

fn main() -> ExitCode {
    let cfg = match parse_args(std::env::args_os(), std::env::var(WORKERS_ENV).ok()) {
        Ok(Parsed::Run(cfg)) => cfg,
        Ok(Parsed::Info(text)) => {
            print!("{text}");
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(RunError::Config(e)),
    };
    match run(&cfg) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => fail(e),
    }
}

fn fail(e: RunError) -> ExitCode {
    eprintln!("{}", e.machine_line());
    ExitCode::from(e.exit_code() as u8)
}
