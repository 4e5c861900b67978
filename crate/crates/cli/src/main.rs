use std::process::ExitCode;

use clap::Parser;
use symnorm_cli::{render, run, Cli, Format, Record};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = run(&cli);
    let text = render(&outcome.record, cli.global.format);
    match (&outcome.record, cli.global.format) {
        (Record::Error(_), Format::Human) => eprintln!("{text}"),
        _ => println!("{text}"),
    }
    ExitCode::from(outcome.exit.code())
}
