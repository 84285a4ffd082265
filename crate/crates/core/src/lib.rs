pub mod arith;
pub mod biquad;
pub mod cli;
pub mod error;
pub mod genus;
pub mod group;
pub mod hilbert;
pub mod oracle;
pub mod quadform;
pub mod selftest;
pub mod tower;
pub mod zsqrt2;

pub use error::{Error, Result};
