use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use liecompat_cli::{commands, Cli, EXIT_INPUT};

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse_from(&argv);
    let report = commands::run(&cli, argv);

    // keep stdout clean when it carries JSON
    let json_on_stdout = cli.json.as_deref() == Some(Path::new("-"));
    if cli.command.uses_stdout() || json_on_stdout {
        eprint!("{}", report.to_table());
    } else {
        print!("{}", report.to_table());
    }
    if let Some(path) = &cli.json {
        if let Err(e) = report.write_json(path) {
            eprintln!("liecompat: cannot write {}: {e}", path.display());
            return ExitCode::from(EXIT_INPUT as u8);
        }
    }
    ExitCode::from(report.exit_code as u8)
}
