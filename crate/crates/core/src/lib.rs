//! Generalized fractal dimensions, Bowen-ball entropies and inequality
//! checks for a small zoo of dynamical systems.
//!
//! Every quantity has an exact oracle where one exists (cylinder sums,
//! arc lengths, polygon areas) and a seeded Monte-Carlo estimator.

pub mod cli;
pub mod dimension;
pub mod entropy;
pub mod error;
pub mod geometry;
pub mod measures;
pub mod verify;

pub use error::{Error, Result};
