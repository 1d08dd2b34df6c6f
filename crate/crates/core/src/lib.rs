//! Kink solitons of the reduced one-dimensional Skyrme model.

pub mod analysis;
pub mod closed_form;
pub mod error;
pub mod io;
pub mod model;
pub mod solvers;

pub use error::{Error, Result};
