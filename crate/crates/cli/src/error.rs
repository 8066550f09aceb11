use std::fmt;

/// Which stage rejected the script; decides the exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    /// Syntax error.
    Parse,
    /// Unknown identifier.
    Resolve,
    /// A value of the wrong kind, ring, or degree.
    Type,
    /// A kernel operation refused its input.
    Kernel,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Parse | ErrorKind::Resolve | ErrorKind::Type => 1,
            ErrorKind::Kernel => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ErrorKind::Parse => "parse error",
            ErrorKind::Resolve => "resolution error",
            ErrorKind::Type => "type error",
            ErrorKind::Kernel => "kernel error",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliError {
    pub kind: ErrorKind,
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl CliError {
    pub fn new(kind: ErrorKind, line: usize, col: usize, message: impl Into<String>) -> Self {
        Self { kind, line, col, message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}:{}: {}", self.kind.label(), self.line, self.col, self.message)
    }
}

impl std::error::Error for CliError {}
