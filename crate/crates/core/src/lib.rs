//! Concurrence, concurrence of assistance and monogamy relations for tripartite
//! pure states in `2 ⊗ 2 ⊗ d` systems.
//!
//! The crate is organized bottom-up:
//!
//! - [`numerics`]: dense complex matrices, a Jacobi Hermitian eigensolver, PSD square
//!   roots and the closed-form 2×2 determinant.
//! - [`states`]: pure states and density matrices, partial trace/transpose, the PPT
//!   test, HJW ensemble rotations and seeded Haar sampling.
//! - [`measures`]: pure-state concurrence, the two-qubit closed forms for concurrence
//!   and concurrence of assistance, and a convex-roof optimizer for `2 ⊗ d` states.
//! - [`monogamy`]: residuals of the monogamy relations, product-form classification,
//!   the equal-marginal construction, and batch scans.
//! - [`bsa`]: Lewenstein-Sanpera (best separable approximation) decomposition of
//!   two-qubit states.
//! - [`io`]: JSON file formats for states, density matrices and scan summaries.

#![forbid(unsafe_code)]

pub mod bsa;
pub mod error;
pub mod io;
pub mod measures;
pub mod monogamy;
pub mod numerics;
pub mod states;

pub use error::{Error, Result};
