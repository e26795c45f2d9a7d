pub mod cli;
pub mod complex;
pub mod driver;
pub mod error;
pub mod geometry;
pub mod grid;
pub mod io;
pub mod measure;
pub mod projection;
pub mod simplicial;
pub mod skeleton;

pub use error::{Error, Result};
