pub mod braidword;
pub mod cli;
pub mod curves;
pub mod error;
pub mod fibercheck;
pub mod polyloop;
pub mod wordextract;

pub use error::{Error, Result};
