use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use exceedance_cli::{run, Cli, CliError};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if !e.use_stderr() {
                // --help / --version
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let msg = e.to_string();
            eprintln!("EP-ERR:input {}", msg.trim_end());
            return ExitCode::from(2);
        }
    };

    let result = run(&cli.command).and_then(|out| {
        match cli.command.output_path() {
            Some(path) => std::fs::write(path, out.as_bytes())?,
            None => std::io::stdout().lock().write_all(out.as_bytes())?,
        }
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report(&e),
    }
}

fn report(e: &CliError) -> ExitCode {
    eprintln!("EP-ERR:{} {e}", e.code());
    ExitCode::from(e.exit_code())
}
