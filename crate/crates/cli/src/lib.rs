//! Command-line front end: configuration, report emission and rendering.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod render;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub use args::Cli;
pub use config::RunConfig;
pub use error::{CliError, Status};

/// Runs a parsed command line, writing the main output to `--out` or `stdout`.
pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<Status, CliError> {
    let cfg = RunConfig::from_cli(cli)?;
    let art = commands::execute(&cfg)?;
    output::emit(cfg.out.as_deref(), &art.bytes, stdout)?;
    for (path, bytes) in &art.extra {
        output::emit(Some(path), bytes, stdout)?;
    }
    Ok(art.status)
}

/// Parses `args` (program name first), runs, reports errors on `stderr` and
/// returns the exit code.
pub fn run_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { Status::Config.code() } else { 0 };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{text}");
            } else {
                let _ = write!(stdout, "{text}");
            }
            return code;
        }
    };
    match run(cli, stdout) {
        Ok(status) => status.code(),
        Err(e) => {
            let _ = writeln!(stderr, "rkms: {e}");
            e.status.code()
        }
    }
}
