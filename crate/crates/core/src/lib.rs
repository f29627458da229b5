pub mod cone;
pub mod error;
pub mod fixtures;
pub mod laurent;
pub mod linalg;
pub mod qp;
pub mod rep;
pub mod seed;
pub mod surface;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{Rat, RatMatrix};
