//! Multi-copy adaptive local discrimination of two-qubit orthonormal bases.

pub mod classify;
pub mod entanglement;
pub mod error;
pub mod linalg;
pub mod protocols;
pub mod scan;
pub mod secretshare;
pub mod states;

pub use error::{Error, Result};
