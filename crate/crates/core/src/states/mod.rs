//! State containers, partial trace and transpose, PPT test, HJW ensembles and sampling.

mod density;
mod ensemble;
mod pure;
pub mod random;
mod subsystems;

pub use density::{fidelity, DensityMatrix, DENSITY_TOL};
pub(crate) use density::matrix_fidelity;
pub use ensemble::{
    hjw_ensemble, spectral_ensemble, EnsembleRotation, PureEnsemble, MIN_WEIGHT, ROTATION_TOL,
};
pub use pure::{PureState, NORM_TOL};
pub use random::{random_density, random_pure, stream_rng};
