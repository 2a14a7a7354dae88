pub mod bundle;
pub mod cosheaf;
pub mod error;
pub mod fam;
pub mod fincat;
pub mod json;
pub mod prospace;
pub mod prosys;
pub mod random;

pub use error::{Error, Result};
