//! Stallings graphs, coverings, finite quotients and product separation in free groups.

pub mod certificate;
pub mod cover;
pub mod dot;
pub mod error;
pub mod extension;
pub mod graph;
pub mod group;
pub mod problem;
pub mod random;
pub mod rational;
pub mod separate;
pub mod stallings;
pub mod word;

pub use error::{Error, Result};
