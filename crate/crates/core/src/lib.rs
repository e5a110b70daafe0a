//! Numerical verification of harmonic almost contact metric structures.
//!
//! Everything lives on a single coordinate chart. Tensor fields are closures
//! returning coordinate-frame components; derivatives are nested central
//! finite differences. Identities are evaluated as residuals at seeded
//! sample points and compared against a tolerance tied to how many
//! derivatives the identity involves.

// `!(r < tol)` is deliberate throughout: a NaN residual must fail.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod almost_contact;
pub mod catalog;
pub mod chart_geometry;
pub mod dsl;
pub mod error;
pub mod exec;
pub mod harmonicity;
pub mod report;
pub mod submersion_warp;

pub use error::{Error, Result};
