use std::io::Write;

use acfg_cli::{execute, Cli, CommandResult};
use clap::error::ErrorKind;
use clap::Parser;

fn emit(r: &CommandResult) -> ! {
    let _ = writeln!(std::io::stdout().lock(), "{}", r.to_json());
    std::process::exit(r.exit_code());
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("ACFG_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => e.exit(),
        Err(e) => {
            eprint!("{e}");
            emit(&CommandResult::error(e.to_string().trim_end().to_string()));
        }
    };
    emit(&execute(&cli.command));
}
