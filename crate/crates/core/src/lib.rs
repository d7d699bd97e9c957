pub mod colocal;
pub mod complex;
pub mod equivariant;
pub mod error;
pub mod linalg;
pub mod module;
pub mod ring;
pub mod specpage;

pub use error::Error;
pub use linalg::{ExactMatrix, FGAbGroup, Scalars};
