use std::process::ExitCode;

use rigidity_cli::{parse_args, run, ParseOutcome};

fn main() -> ExitCode {
    match parse_args(std::env::args_os()) {
        Ok(config) => ExitCode::from(run(&config) as u8),
        Err(ParseOutcome::Info(text)) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(ParseOutcome::Usage(line)) => {
            eprintln!("error: {line}");
            ExitCode::from(2)
        }
    }
}
