#![allow(clippy::needless_range_loop)]

pub mod bounds;
pub mod approx;
pub mod boxes;
pub mod cli;
pub mod cube;
pub mod error;
pub mod linalg;
pub mod npa;
pub mod solvers;
pub mod steering;

pub use error::{Error, Result};
