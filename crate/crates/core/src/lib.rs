//! Generalized equiangular measurements (GEAMs) that form conical 2-designs,
//! and the information-theoretic quantities computed from them.

pub mod entanglement;
pub mod error;
pub mod geam;
pub mod io;
pub mod linalg;
pub mod measures;
pub mod presets;
pub mod report;
pub mod selftest;
pub mod states;

pub use error::{GeamError, Result};
