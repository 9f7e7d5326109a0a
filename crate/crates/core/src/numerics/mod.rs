//! Small dense complex linear algebra: matrices, Hermitian eigensolver, PSD square root
//! and the closed-form 2×2 determinant.

mod eig;
mod matrix;
mod svd;

pub use eig::{
    hermitian_eig, psd_sqrt, sqrt_det2, HermitianEigenResult, JACOBI_THRESHOLD, PSD_CLAMP,
};
pub use svd::singular_values;
pub use matrix::{inner, norm_sqr, ComplexMatrix, ONE, ZERO};
