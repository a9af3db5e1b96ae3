use std::path::PathBuf;

use crate::fst::StateId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("state {0} does not exist")]
    UnknownState(StateId),

    /// A precondition of an operation was violated.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("alphabet mismatch: output symbols of the left machine differ from input symbols of the right machine")]
    AlphabetMismatch,

    #[error("no path from the initial state to a final state")]
    NoPath,

    #[error("cycle through states {}", format_cycle(.0))]
    Cycle(Vec<StateId>),

    #[error("path enumeration exceeded the limit of {0} paths")]
    LimitExceeded(usize),

    /// Internal bookkeeping disagrees with itself (alignment counts vs. features).
    #[error("internal consistency error: {0}")]
    Consistency(String),

    #[error("{}: {msg}", location(.path, *.line))]
    Input {
        path: PathBuf,
        line: Option<usize>,
        msg: String,
    },

    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub fn input(path: impl Into<PathBuf>, line: Option<usize>, msg: impl Into<String>) -> Self {
        Error::Input {
            path: path.into(),
            line,
            msg: msg.into(),
        }
    }

    /// Attach a file (and optionally a line) to an error raised while checking its contents.
    pub fn at(self, path: impl Into<PathBuf>, line: Option<usize>) -> Self {
        match self {
            e @ (Error::Input { .. } | Error::Io { .. }) => e,
            other => Error::input(path, line, other.to_string()),
        }
    }
}

fn format_cycle(states: &[StateId]) -> String {
    let mut parts: Vec<String> = states.iter().map(|s| s.to_string()).collect();
    if let Some(first) = states.first() {
        parts.push(first.to_string());
    }
    parts.join(" -> ")
}

fn location(path: &std::path::Path, line: Option<usize>) -> String {
    match line {
        Some(l) => format!("{}:{}", path.display(), l),
        None => path.display().to_string(),
    }
}
