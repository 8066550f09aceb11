//! Script language and command-line front end for the `zjet` kernel.

pub mod ast;
pub mod checks;
pub mod emit;
pub mod error;
pub mod interp;
pub mod lexer;
pub mod parser;
pub mod random;
pub mod report;
pub mod roundtrip;

pub use error::{CliError, ErrorKind};
pub use interp::{run, Options, Outcome, Session};
pub use report::{render, Format, Report};
