//! Exact computations around the Hitchin morphism for surfaces: invariant
//! polynomials, polarized spectral data of commuting matrices, spectral-cover
//! algebras, companion Higgs fields and chart-level compatibility checks.

pub mod algebra;
pub mod charts;
pub mod cli;
pub mod companion;
pub mod cover;
pub mod error;
pub mod invariants;
pub mod json;
pub mod polarization;

pub use error::{Error, Result};
