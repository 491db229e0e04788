//! The `sentikit` command line, callable in-process through [`run`].

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;

use clap::error::ErrorKind as ClapKind;
use clap::Parser;
use sentikit_core::classifiers::{ClassifierError, PersistError};
use sentikit_core::corpus::CorpusError;
use sentikit_core::eval::EvalError;
use sentikit_core::vectorize::VectorizeError;
use sentikit_core::ArffError;

pub mod args;
mod commands;
pub mod output;

pub use args::Cli;

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const DATA: i32 = 2;
    pub const INTERNAL: i32 = 3;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Data,
    Internal,
}

#[derive(Debug)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            kind: ErrorKind::Usage,
            message: message.into(),
        }
    }

    pub fn data(message: impl Into<String>) -> Self {
        CliError {
            kind: ErrorKind::Data,
            message: message.into(),
        }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        CliError {
            kind: ErrorKind::Internal,
            message: message.into(),
        }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::data(format!("{}: {e}", path.display()))
    }

    pub fn code(&self) -> i32 {
        match self.kind {
            ErrorKind::Usage => exit::USAGE,
            ErrorKind::Data => exit::DATA,
            ErrorKind::Internal => exit::INTERNAL,
        }
    }

    /// Prefixes the message with the file it concerns.
    pub fn at(mut self, path: &Path) -> Self {
        self.message = format!("{}: {}", path.display(), self.message);
        self
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<ArffError> for CliError {
    fn from(e: ArffError) -> Self {
        CliError::data(e.to_string())
    }
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        match e {
            CorpusError::BadFraction(_) | CorpusError::EmptyDelimiters => CliError::usage(e.to_string()),
            _ => CliError::data(e.to_string()),
        }
    }
}

impl From<VectorizeError> for CliError {
    fn from(e: VectorizeError) -> Self {
        CliError::data(e.to_string())
    }
}

impl From<ClassifierError> for CliError {
    fn from(e: ClassifierError) -> Self {
        match e {
            ClassifierError::Hyperparameter(_) => CliError::usage(e.to_string()),
            _ => CliError::data(e.to_string()),
        }
    }
}

impl From<PersistError> for CliError {
    fn from(e: PersistError) -> Self {
        CliError::data(e.to_string())
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::UnknownPositiveClass { .. } => CliError::usage(e.to_string()),
            EvalError::Classifier(c) => c.into(),
            _ => CliError::data(e.to_string()),
        }
    }
}

/// Parses `args` (program name first) and runs the command, returning the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ClapKind::DisplayHelp | ClapKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    exit::SUCCESS
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    exit::USAGE
                }
            };
        }
    };
    let result = panic::catch_unwind(AssertUnwindSafe(|| commands::dispatch(cli.command, out, err)));
    match result {
        Ok(Ok(())) => exit::SUCCESS,
        Ok(Err(e)) => {
            let _ = writeln!(err, "error: {e}");
            e.code()
        }
        Err(_) => {
            let _ = writeln!(err, "error: internal failure (panic); please report this with the command line used");
            exit::INTERNAL
        }
    }
}
