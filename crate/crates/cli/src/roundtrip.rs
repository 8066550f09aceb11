//! Parsing canonical text back into kernel values.

use zjet::{Domain, Form, Series};

use crate::error::CliError;
use crate::interp::Session;
use crate::parser::parse_expr;

/// Parses a series written in the coordinates of `dom`.
pub fn series(text: &str, dom: &Domain) -> Result<Series, CliError> {
    let e = parse_expr(text)?;
    Session::default().eval_series_in(&e, dom)
}

/// Parses a differential form written with coordinates and `d<coord>` generators.
pub fn form(text: &str, dom: &Domain, form_cap: u32) -> Result<Form, CliError> {
    let e = parse_expr(text)?;
    Session::default().eval_form_in(&e, dom, form_cap)
}
