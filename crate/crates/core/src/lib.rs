//! Decides unitary equivalence of multiplicity-free normal matrix fields over
//! triangulated spaces.
//!
//! Two fields with the same characteristic polynomial are unitarily
//! equivalent exactly when an integer obstruction class in degree-2 twisted
//! cohomology vanishes. The crate builds that class from eigenvalue
//! transport, gauge link phases, and exact integer Smith normal form, and
//! ships the worked examples as runnable programs under `examples/`.

pub mod cli;
pub mod cohomology;
pub mod complexes;
pub mod error;
pub mod fields;
pub mod frames;
pub mod matrix;
pub mod monodromy;
pub mod obstruction;
pub mod report;
pub mod snf;
pub mod tol;

pub use error::Error;
pub use tol::Tolerances;
