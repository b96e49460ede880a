pub mod analysis;
pub mod epscan;
pub mod error;
pub mod exprparse;
pub mod lindblad;
pub mod numlab;
pub mod polycore;
pub mod tropgeo;

pub use error::{Error, ErrorKind, Result};
