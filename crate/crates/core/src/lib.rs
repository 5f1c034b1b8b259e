//! Compression of kernel matrices into hierarchically block separable form,
//! the extended sparse system built from the factors, and a classical
//! simulation of the block encodings assembled from it.

pub mod blockenc;
pub mod dense;
pub mod error;
pub mod geometry;
pub mod hbs;
pub mod kernels;
pub mod lowrank;
pub mod sparse;
pub mod sparsify;

pub use error::{HbsError, Result};
pub use faer::c64;
