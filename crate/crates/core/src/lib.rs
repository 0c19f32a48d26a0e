//! Numerical ergodic-theory toolkit: growth rates of subadditive potentials
//! along orbits, weak* basins of attraction, and grid estimates of the
//! Lebesgue measure of optimal state points.

pub mod basins;
pub mod dynamics;
pub mod error;
pub mod measures;
pub mod parse;
pub mod potentials;
pub mod report;
pub mod scenarios;
pub mod schedule;
pub mod verify;

pub use error::{Error, Result};
