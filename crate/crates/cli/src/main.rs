use std::io;
use std::process::ExitCode;

use clap::Parser;
use tangle_cli::commands::{self, Cli, Output};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (stdout, stderr) = (io::stdout(), io::stderr());
    let (mut out, mut err) = (stdout.lock(), stderr.lock());
    let mut io = Output { out: &mut out, err: &mut err };
    let code = match commands::run(cli, &mut io) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(io.err, "error: {e}");
            e.exit_code()
        }
    };
    let _ = io.out.flush();
    ExitCode::from(code)
}
