//! Exact combinatorics of toric Tyurin degenerations.

pub mod embed;
pub mod error;
pub mod examples;
pub mod exactlin;
pub mod par;
pub mod polytope;
pub mod report;
pub mod subdivision;
pub mod svg;
pub mod tropical;
pub mod zeroring;

pub use error::{Error, Result};
