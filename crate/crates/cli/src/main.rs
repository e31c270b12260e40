use std::io;
use std::process::ExitCode;

use clap::Parser;
use sprintcard_cli::{run, Cli, Console, Status};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(Status::Usage.code()) } else { ExitCode::SUCCESS };
        }
    };
    let (mut out, mut err) = (io::stdout().lock(), io::stderr().lock());
    let mut console = Console { out: &mut out, err: &mut err, quiet: cli.quiet };
    ExitCode::from(run(&cli, &mut console).code())
}
