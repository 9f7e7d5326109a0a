//! Entanglement measures: pure-state concurrence, two-qubit closed forms and the
//! convex-roof optimizer for `2 ⊗ d` mixed states.

mod concurrence;
mod roof;

pub use concurrence::{
    coa_2qubit, coa_2qubit_fidelity, concurrence_2qubit, pure_concurrence, spin_flip,
};
pub(crate) use concurrence::{
    flip_values_from_factor, qubit_row_concurrence, wootters,
};
pub use roof::{convex_roof, RoofConfig, RoofMode, RoofResult, ROOF_RANK_TOL};
