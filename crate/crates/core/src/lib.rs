pub mod diagram;
pub mod error;
pub mod simplicial;
pub mod supernat;
pub(crate) mod tail;
pub mod tensor;

pub use error::{Error, Result};
pub mod intertwine;
pub mod par;
pub mod states;
pub mod equiv;
pub mod format;
pub mod sample;
pub mod cli;
