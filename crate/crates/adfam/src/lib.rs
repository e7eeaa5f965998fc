pub mod builders;
pub mod cli;
pub mod error;
pub mod families;
pub mod geometry;
pub mod graph;
pub mod numeric;
pub mod order;
pub mod sampling;
pub mod search;
pub mod sets;
pub mod verify;

pub use error::{Error, Result};
