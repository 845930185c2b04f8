use std::process;

use clap::Parser;

mod args;
mod commands;
mod csvio;
mod error;
mod jsonio;

fn main() {
    let cli = args::Cli::parse();
    if let Err(err) = commands::run(cli) {
        eprintln!("error: {err}");
        process::exit(err.exit_code());
    }
}
