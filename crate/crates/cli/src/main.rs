mod args;
mod commands;
mod output;

use clap::Parser;

fn main() {
    let cli = args::Cli::parse();
    let code = match commands::run(&cli) {
        Ok(report) => match output::emit(&report.body, cli.out.as_deref()) {
            Ok(()) => {
                if let Some(note) = report.note {
                    eprintln!("gnl: {note}");
                }
                report.code
            }
            Err(failure) => {
                eprintln!("gnl: {failure}");
                failure.code()
            }
        },
        Err(failure) => {
            eprintln!("gnl: {failure}");
            failure.code()
        }
    };
    std::process::exit(code);
}
