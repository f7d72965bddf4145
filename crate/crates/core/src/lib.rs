pub mod codec;
pub mod error;
pub mod gadget;
pub mod generate;
pub mod labels;
pub mod planar;
pub mod query;
pub mod separator;
pub mod toolkit;

pub use error::{Error, Result};
