//! The `spinroof` command-line tool.
//!
//! Subcommands sample uncertainty-diagram datasets, run the relation
//! checks on random states, tabulate `c(s)`, evaluate metrology limits and
//! build qubit decompositions. Output goes to stdout unless `--out` is given.

pub mod args;
pub mod cs;
pub mod decompose;
pub mod diagram;
pub mod metrology;
pub mod verify;

use std::ffi::OsString;
use std::io::Write;
use std::path::Path;

use clap::Parser;

use args::{Cli, Command};

/// Process exit statuses.
pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const VALIDATION: i32 = 2;
    pub const NON_CONVERGENCE: i32 = 3;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] spinroof_core::Error),
    #[error("{0}")]
    Validation(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => exit::USAGE,
            _ => exit::VALIDATION,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub(crate) fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Writes `bytes` to `path`, or to `out` when no path is given.
pub(crate) fn emit(bytes: &[u8], path: Option<&Path>, out: &mut dyn Write) -> CliResult<()> {
    let io = |path: &str| {
        let path = path.to_string();
        move |source| CliError::Io { path, source }
    };
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(io(&p.display().to_string())),
        None => out.write_all(bytes).map_err(io("<stdout>")),
    }
}

/// Parses `args` and runs the subcommand, returning the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                exit::USAGE
            } else {
                let _ = write!(out, "{text}");
                exit::OK
            };
        }
    };
    let result = match cli.command {
        Command::SampleDiagram(a) => diagram::cmd_sample_diagram(&a, out),
        Command::Verify(a) => verify::cmd_verify(&a, out),
        Command::Cs(a) => cs::cmd_cs(&a, out),
        Command::Metrology(a) => metrology::cmd_metrology(&a, out),
        Command::Decompose(a) => decompose::cmd_decompose(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
