//! Desk-scale reference data shipped with the crate.
//!
//! Every fixture is certified by `validate_modular_datum` in the test suite before
//! anything downstream relies on it.

use crate::error::{Error, Result};
use crate::io::parse_modular_datum;
use crate::modular_data::ModularDatum;

pub const ISING_JSON: &str = include_str!("../fixtures/ising.json");
pub const FIBONACCI_JSON: &str = include_str!("../fixtures/fibonacci.json");
pub const E8_JSON: &str = include_str!("../fixtures/e8.json");

pub const NAMES: [&str; 3] = ["ising", "fibonacci", "e8"];

/// Raw JSON of a fixture.
pub fn json_by_name(name: &str) -> Option<&'static str> {
    match name {
        "ising" => Some(ISING_JSON),
        "fibonacci" | "fib" => Some(FIBONACCI_JSON),
        "e8" | "holomorphic" => Some(E8_JSON),
        _ => None,
    }
}

/// Looks a fixture up by name (`ising`, `fibonacci`, `e8`).
pub fn by_name(name: &str) -> Result<ModularDatum> {
    let text =
        json_by_name(name).ok_or_else(|| Error::Parse(format!("unknown fixture {name:?}")))?;
    parse_modular_datum(text)
}

/// Ising: c = 1/2, weights 0, 1/2, 1/16.
pub fn ising() -> ModularDatum {
    by_name("ising").expect("ising fixture parses")
}

/// Fibonacci: c = 14/5, weights 0, 2/5.
pub fn fibonacci() -> ModularDatum {
    by_name("fibonacci").expect("fibonacci fixture parses")
}

/// One-module holomorphic datum with c = 8.
pub fn e8() -> ModularDatum {
    by_name("e8").expect("e8 fixture parses")
}
