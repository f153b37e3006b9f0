pub mod action;
pub mod dirac;
pub mod error;
pub mod finalg;
pub mod network;
pub mod num;
pub mod quiver;
pub mod repthy;

pub use error::{Error, Result};
