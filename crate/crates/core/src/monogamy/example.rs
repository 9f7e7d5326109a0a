use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::report::monogamy_triple;
use crate::error::Result;
use crate::measures::RoofConfig;
use crate::numerics::{ComplexMatrix, ZERO};
use crate::states::PureState;

/// `(|002⟩ + |112⟩)/√6 + (|100⟩ + |011⟩)/√3` on `2 ⊗ 2 ⊗ 3`.
///
/// Equivalently `(|x⟩_AC|0⟩_B + |y⟩_AC|1⟩_B)/√2` with the orthogonal pair
/// `|x⟩ = (|02⟩ + √2|10⟩)/√3`, `|y⟩ = (|12⟩ + √2|01⟩)/√3`.
pub fn build_example_state() -> PureState {
    let a = Complex64::new(1.0 / 6f64.sqrt(), 0.0);
    let b = Complex64::new(1.0 / 3f64.sqrt(), 0.0);
    let mut amps = vec![ZERO; 12];
    // index a·6 + b·3 + c
    amps[2] = a; // |002⟩
    amps[11] = a; // |112⟩
    amps[6] = b; // |100⟩
    amps[4] = b; // |011⟩
    PureState::new(vec![2, 2, 3], amps).expect("example state is normalized")
}

/// The expected two-qubit marginal `ρ_AB` of [`build_example_state`].
pub fn example_rho_ab() -> ComplexMatrix {
    ComplexMatrix::from_real(
        4,
        4,
        &[
            1.0, 0.0, 0.0, 1.0, //
            0.0, 2.0, 0.0, 0.0, //
            0.0, 0.0, 2.0, 0.0, //
            1.0, 0.0, 0.0, 1.0,
        ],
    )
    .expect("4x4")
    .scale(1.0 / 6.0)
}

/// One value checked against its expected value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub name: String,
    pub expected: f64,
    pub observed: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Comparison {
    fn new(name: &str, expected: f64, observed: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            expected,
            observed,
            tolerance,
            passed: (observed - expected).abs() <= tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExampleCheck {
    pub comparisons: Vec<Comparison>,
    pub ppt_ab: bool,
    pub ppt_min_eigenvalue: f64,
    pub equality_residual: f64,
    pub roof_converged: bool,
    pub passed: bool,
}

pub const EXAMPLE_CONCURRENCE_TOL: f64 = 1e-9;
pub const EXAMPLE_ROOF_TOL: f64 = 1e-4;
pub const EXAMPLE_MATRIX_TOL: f64 = 1e-12;

/// Recomputes the example's concurrences and marginal and compares them with
/// the known values: `C_A(BC) = 1`, `C_AB = 0`, `C^a_AC = 2√2/3`, and `ρ_AB`.
pub fn run_example_check(roof: &RoofConfig) -> Result<ExampleCheck> {
    let psi = build_example_state();
    let report = monogamy_triple(&psi, roof)?;
    let rho_ab = psi.reduced(&[0, 1])?;
    let deviation = rho_ab.matrix().max_abs_diff(&example_rho_ab());
    let comparisons = vec![
        Comparison::new("c_a_bc", 1.0, report.c_a_bc, EXAMPLE_CONCURRENCE_TOL),
        Comparison::new("c_ab", 0.0, report.c_ab, EXAMPLE_CONCURRENCE_TOL),
        Comparison::new(
            "c_ac_assist",
            2.0 * 2f64.sqrt() / 3.0,
            report.c_ac_assist,
            EXAMPLE_ROOF_TOL,
        ),
        Comparison::new("rho_ab_max_deviation", 0.0, deviation, EXAMPLE_MATRIX_TOL),
    ];
    let passed = report.ppt_ab && comparisons.iter().all(|c| c.passed);
    Ok(ExampleCheck {
        comparisons,
        ppt_ab: report.ppt_ab,
        ppt_min_eigenvalue: report.ppt_min_eigenvalue,
        equality_residual: report.equality_residual,
        roof_converged: report.roof_converged,
        passed,
    })
}
