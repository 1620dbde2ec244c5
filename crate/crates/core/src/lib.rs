//! Numerical toolkit for convex cones and cone-valued asymmetric norms.

pub mod cones;
pub mod error;
pub mod lattice;
pub mod norms;
pub mod numeric;
pub mod operators;
pub mod projection;
pub mod report;
pub mod specs;
pub mod verify;

pub use error::{Error, Result};
