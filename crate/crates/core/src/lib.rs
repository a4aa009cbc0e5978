pub mod bounds;
pub mod capacity;
pub mod cli;
pub mod channels;
pub mod corners;
pub mod error;
pub mod linalg;
pub mod lovasz;
pub mod opsys;
pub mod projections;
pub mod graphs;
pub mod solvers;

pub use error::{Error, Result};
