pub mod actions;
pub mod cli;
pub mod groupoid;
mod error;
pub mod momentum;
pub mod numerics;
pub mod paths;
pub mod poisson;
pub mod reduction;

pub use error::{Error, Result};
