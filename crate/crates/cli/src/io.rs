use std::fmt;
use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};

use negscope::{Corpus, Error};

/// Failure classes, mapped to exit codes by `main`.
#[derive(Debug)]
pub enum CliError {
    /// Bad invocation or unusable path. Exit 1.
    Usage(String),
    /// Input content failed to parse or validate. Exit 2.
    Input(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) => 2,
        }
    }

    /// Attribute a library error to the file it came from.
    pub fn from_lib(path: &Path, err: Error) -> Self {
        if err.is_input_error() {
            CliError::Input(format!("{}: {err}", path.display()))
        } else if let Error::Io(e) = err {
            CliError::Input(format!("{}: read failed: {e}", path.display()))
        } else {
            CliError::Usage(err.to_string())
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Input(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        if err.is_input_error() {
            CliError::Input(err.to_string())
        } else {
            CliError::Usage(err.to_string())
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn open(path: &Path) -> CliResult<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::Usage(format!("cannot open {}: {e}", path.display())))
}

/// Check that an output path can be written before any work is done.
pub fn check_output(path: Option<&Path>) -> CliResult<()> {
    let Some(path) = path else { return Ok(()) };
    let dir = parent_dir(path);
    if !dir.is_dir() {
        return Err(CliError::Usage(format!(
            "output directory {} does not exist",
            dir.display()
        )));
    }
    if path.is_dir() {
        return Err(CliError::Usage(format!(
            "output {} is a directory",
            path.display()
        )));
    }
    Ok(())
}

fn parent_dir(path: &Path) -> PathBuf {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    }
}

pub fn read_corpus(path: &Path) -> CliResult<Corpus> {
    negscope::read_canonical(open(path)?).map_err(|e| CliError::from_lib(path, e))
}

/// Write to `path` through a temporary file renamed on success, or to
/// stdout when no path is given.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    let Some(path) = path else {
        let mut out = io::stdout().lock();
        return out
            .write_all(bytes)
            .and_then(|_| out.flush())
            .map_err(|e| CliError::Usage(format!("cannot write to stdout: {e}")));
    };
    let fail = |e: io::Error| CliError::Usage(format!("cannot write {}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(parent_dir(path)).map_err(fail)?;
    tmp.write_all(bytes).map_err(fail)?;
    tmp.as_file().sync_all().map_err(fail)?;
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}

pub fn warn_all(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}
