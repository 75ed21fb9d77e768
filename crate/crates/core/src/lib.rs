//! Polynomial solutions and discrete spectra of the modified biconfluent Heun
//! equation for the radial `c r^2 + b r - a/r` interaction and the related
//! quark equation.

pub mod asymptotics;
pub mod bch;
pub mod charpoly;
pub mod error;
pub mod fitting;
pub mod poly;
pub mod rational;
pub mod rootfind;
pub mod shooting;
pub mod spectrum;

pub use error::{Error, Result};
