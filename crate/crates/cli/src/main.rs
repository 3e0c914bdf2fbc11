use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use cnkit_cli::{run, Cli, Exit};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(Exit::Usage as u8),
            };
        }
    };
    match run(&cli) {
        Ok(out) => {
            if cli.json {
                println!(
                    "{}",
                    serde_json::to_string(&out.report).expect("report serializes")
                );
            } else {
                for line in &out.lines {
                    println!("{line}");
                }
                println!("({} ms)", out.report.timing_ms);
            }
            ExitCode::from(out.exit as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(Exit::Usage as u8)
        }
    }
}
