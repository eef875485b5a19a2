//! Exact dynamics over the rationals and finite fields, and a checker for
//! almost good reduction of plane rational maps.

pub mod agr;
pub mod cli;
pub mod error;
pub mod exactnum;
pub mod maps;
pub mod orbits;
pub mod polyfield;

pub use error::{Error, Result};
