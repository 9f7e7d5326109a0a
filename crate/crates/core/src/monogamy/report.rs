use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{convex_roof, flip_values_from_factor, qubit_row_concurrence, wootters};
use crate::measures::{RoofConfig, RoofMode};
use crate::states::PureState;

/// Tolerance of the PPT test on `ρ_AB`.
pub const PPT_TOL: f64 = 1e-10;

/// Which party factors out of a tripartite pure state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProductForm {
    /// `|φ⟩_A ⊗ |ψ⟩_BC`.
    AFactor,
    /// `|ψ⟩_AB ⊗ |φ⟩_C`.
    CFactor,
    Both,
    None,
}

impl ProductForm {
    pub fn is_product(self) -> bool {
        self != ProductForm::None
    }
}

/// Concurrences and monogamy residuals of a `2 ⊗ 2 ⊗ d` pure state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonogamyReport {
    pub d: usize,
    /// `C_A(BC)`.
    pub c_a_bc: f64,
    /// `C_AB`.
    pub c_ab: f64,
    /// `C^a_AC`; a best-found lower bound when `d > 2`.
    pub c_ac_assist: f64,
    /// `C²_A(BC) − C²_AB − (C^a_AC)²`.
    pub equality_residual: f64,
    /// `C²_A(BC) − C²_AB − C²_AC`, only for `d = 2`.
    pub ckw_residual: Option<f64>,
    /// `(C^a_AB)² + (C^a_AC)² − C²_A(BC)`, only for `d = 2`.
    pub dual_residual: Option<f64>,
    pub ppt_ab: bool,
    /// Smallest eigenvalue of `ρ_AB^{T_B}`.
    pub ppt_min_eigenvalue: f64,
    pub product_form: ProductForm,
    /// False when the roof optimizer stopped on the sweep limit.
    pub roof_converged: bool,
}

/// Purity threshold used by [`monogamy_triple`] to classify product forms.
pub const PRODUCT_TOL: f64 = 1e-9;

pub(crate) fn require_tripartite(psi: &PureState) -> Result<usize> {
    match psi.dims() {
        &[2, 2, d] if d >= 1 => Ok(d),
        other => Err(Error::WrongDims {
            expected: "[2, 2, d]",
            got: other.to_vec(),
        }),
    }
}

/// Evaluates `C_A(BC)`, `C_AB` and `C^a_AC` together with the monogamy residuals.
///
/// At `d = 2` everything uses closed forms; otherwise `C^a_AC` comes from the
/// roof optimizer in maximize mode (the mode in `roof` is overridden).
pub fn monogamy_triple(psi: &PureState, roof: &RoofConfig) -> Result<MonogamyReport> {
    let d = require_tripartite(psi)?;
    let c_a_bc = qubit_row_concurrence(&psi.factor(&[0])?);

    let flip_ab = flip_values_from_factor(&psi.factor(&[0, 1])?);
    let c_ab = wootters(&flip_ab);
    let coa_ab: f64 = flip_ab.iter().sum();

    let (c_ac_assist, c_ac, roof_converged) = if d == 2 {
        let flip_ac = flip_values_from_factor(&psi.factor(&[0, 2])?);
        (flip_ac.iter().sum::<f64>(), Some(wootters(&flip_ac)), true)
    } else {
        let rho_ac = psi.reduced(&[0, 2])?;
        let cfg = roof.clone().with_mode(RoofMode::Maximize);
        let r = convex_roof(&rho_ac, &cfg)?;
        (r.value, None, r.converged)
    };

    let (ppt_ab, ppt_min_eigenvalue) = psi.reduced(&[0, 1])?.is_ppt(PPT_TOL)?;
    let sq = |x: f64| x * x;
    Ok(MonogamyReport {
        d,
        c_a_bc,
        c_ab,
        c_ac_assist,
        equality_residual: sq(c_a_bc) - sq(c_ab) - sq(c_ac_assist),
        ckw_residual: c_ac.map(|c| sq(c_a_bc) - sq(c_ab) - sq(c)),
        dual_residual: c_ac.map(|_| sq(coa_ab) + sq(c_ac_assist) - sq(c_a_bc)),
        ppt_ab,
        ppt_min_eigenvalue,
        product_form: detect_product_form(psi, PRODUCT_TOL)?,
        roof_converged,
    })
}

/// Classifies `Ψ` by the purity of its A and C marginals.
pub fn detect_product_form(psi: &PureState, tol: f64) -> Result<ProductForm> {
    require_tripartite(psi)?;
    let a_pure = psi.reduced(&[0])?.purity() >= 1.0 - tol;
    let c_pure = psi.reduced(&[2])?.purity() >= 1.0 - tol;
    Ok(match (a_pure, c_pure) {
        (true, true) => ProductForm::Both,
        (true, false) => ProductForm::AFactor,
        (false, true) => ProductForm::CFactor,
        (false, false) => ProductForm::None,
    })
}
