use std::fs;

use harmonic_core::growth::{growth_report_to, GrowthReport};
use harmonic_core::io::{growth_report_from_json, lattice_function_from_json, polynomial_from_json};
use harmonic_core::{Error, LatticeFunction, MultivariatePolynomial, Result};

use crate::args::Input;

// Inline JSON or a file path.
fn read_source(arg: &str) -> Result<String> {
    if arg.trim_start().starts_with('{') {
        Ok(arg.to_string())
    } else {
        fs::read_to_string(arg).map_err(|e| Error::InvalidParameter(format!("{arg}: {e}")))
    }
}

pub fn load_function(input: &Input) -> Result<LatticeFunction> {
    let src = input
        .function
        .as_deref()
        .ok_or_else(|| Error::InvalidParameter("--function is required".into()))?;
    lattice_function_from_json(&read_source(src)?, input.sparse)
}

pub fn load_polynomial(input: &Input) -> Result<MultivariatePolynomial> {
    let src = input
        .poly
        .as_deref()
        .ok_or_else(|| Error::InvalidParameter("--poly is required".into()))?;
    polynomial_from_json(&read_source(src)?)
}

pub fn ensure_harmonic(p: &MultivariatePolynomial, explore: bool) -> Result<()> {
    if p.is_lattice_harmonic() {
        return Ok(());
    }
    let msg = format!("lattice Laplacian is {}, not 0", p.discrete_laplacian());
    if explore {
        eprintln!("note: {msg}; running outside the hypotheses");
        Ok(())
    } else {
        Err(Error::NotHarmonic(msg))
    }
}

/// Growth values up to `needed`: read from --report, computed from
/// --function (up to its radius), or from --poly evaluated on `B_needed`.
pub fn load_report(input: &Input, needed: usize, explore: bool) -> Result<GrowthReport> {
    if let Some(src) = &input.report {
        return growth_report_from_json(&read_source(src)?);
    }
    if input.function.is_some() {
        let u = load_function(input)?;
        if !explore && !u.is_harmonic()? {
            return Err(Error::NotHarmonic("--function is not harmonic on its ball".into()));
        }
        return growth_report_to(&u, needed.min(u.radius()));
    }
    if input.poly.is_some() {
        let p = load_polynomial(input)?;
        ensure_harmonic(&p, explore)?;
        return growth_report_to(&p.evaluate_on_ball(needed)?, needed);
    }
    Err(Error::InvalidParameter(
        "one of --report, --function or --poly is required".into(),
    ))
}
