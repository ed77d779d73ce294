//! The `qsplit` command line.
//!
//! Exit codes: 0 success, 1 validation or usage failure (including a failed
//! `verify`), 2 QASM parse error, 3 topology error, 4 routing error, 5 I/O
//! error.

pub mod args;
pub mod commands;
pub mod error;
pub mod sweep;

pub use args::{Cli, Command};
pub use error::{exit, CliError};

/// Runs a parsed command and returns the process exit code.
pub fn run(cli: &Cli) -> Result<i32, CliError> {
    match &cli.command {
        Command::Gen(a) => commands::gen(a).map(|_| exit::OK),
        Command::Compile(a) => commands::compile(a).map(|_| exit::OK),
        Command::Verify(a) => commands::verify(a).map(|ok| if ok { exit::OK } else { exit::FAILURE }),
        Command::Stats(a) => commands::stats(a).map(|_| exit::OK),
        Command::Sweep(a) => {
            let cfg = sweep::SweepConfig::load(&a.config)?;
            let path = sweep::run(&cfg, a.resume, a.jobs, a.workers)?;
            println!("{}", path.display());
            Ok(exit::OK)
        }
    }
}
