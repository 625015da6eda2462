use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use dimabsa::cli::{run, RunConfig};
use dimabsa::exit;

fn main() -> ExitCode {
    let cfg = match RunConfig::try_parse() {
        Ok(cfg) => cfg,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::from(exit::OK),
                _ => ExitCode::from(exit::USAGE),
            };
        }
    };
    ExitCode::from(run(&cfg))
}
