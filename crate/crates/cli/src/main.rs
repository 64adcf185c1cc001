use std::process::ExitCode;

use clap::Parser;
use gdrp_cli::{run, Cli, Exit};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // clap reports usage errors as 2, which is taken by the time limit
            return ExitCode::from(if e.use_stderr() { Exit::Failure.code() as u8 } else { 0 });
        }
    };
    let mut stdout = std::io::stdout().lock();
    let code = match run(cli, &mut stdout) {
        Ok(exit) => exit,
        Err(e) => {
            eprintln!("error: {e:#}");
            Exit::Failure
        }
    };
    ExitCode::from(code.code() as u8)
}
