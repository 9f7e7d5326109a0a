use serde::{Deserialize, Serialize};

use super::report::{monogamy_triple, ProductForm};
use super::detect_product_form;
use crate::error::Result;
use crate::measures::RoofConfig;
use crate::states::PureState;

/// Floor for tolerances applied to roof-optimized values.
pub const ROOF_VALUE_TOL: f64 = 1e-4;

/// Outcome of evaluating the three product-form predicates on one state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Verdict {
    pub c_a_bc: f64,
    pub c_ab: f64,
    pub c_ac_assist: f64,
    pub product_form: ProductForm,
    /// (i) `Ψ` factors as `A ⊗ BC` or `AB ⊗ C`.
    pub product: bool,
    /// (ii) `C^a_AC` vanishes.
    pub no_assistance: bool,
    /// (iii) `C_A(BC) = C_AB`.
    pub equal_concurrence: bool,
    pub consistent: bool,
    pub roof_converged: bool,
}

/// Checks that the three product-form predicates agree on `psi`.
///
/// Product form is decided with a purity threshold of `tol²/2`, which for a
/// qubit marginal means `C_A(BC) ≤ tol`. Because the roof value is only a lower
/// bound on `C^a_AC`, predicate (ii) is reported true only when the value is
/// small *and* one of ρ_A, ρ_C is pure, in which case `C^a_AC = 0` exactly.
/// For `d > 2` the threshold on the roof value is at least [`ROOF_VALUE_TOL`].
pub fn check_theorem1(psi: &PureState, roof: &RoofConfig, tol: f64) -> Result<Theorem1Verdict> {
    let report = monogamy_triple(psi, roof)?;
    let form = detect_product_form(psi, 0.5 * tol * tol)?;
    let assist_tol = if report.d == 2 {
        tol
    } else {
        tol.max(ROOF_VALUE_TOL)
    };
    let product = form.is_product();
    let no_assistance = report.c_ac_assist <= assist_tol && product;
    let equal_concurrence = (report.c_a_bc - report.c_ab).abs() <= tol;
    Ok(Theorem1Verdict {
        c_a_bc: report.c_a_bc,
        c_ab: report.c_ab,
        c_ac_assist: report.c_ac_assist,
        product_form: form,
        product,
        no_assistance,
        equal_concurrence,
        consistent: product == no_assistance && product == equal_concurrence,
        roof_converged: report.roof_converged,
    })
}
