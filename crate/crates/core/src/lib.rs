pub mod arith;
pub mod cli;
pub mod conjclass;
pub mod cyclo;
pub mod endoscopy;
pub mod error;
pub mod etale;
pub mod linalg;
pub mod localfield;
pub mod lparam;
pub mod spinor;
pub mod verify;

pub use error::{Error, Result};
