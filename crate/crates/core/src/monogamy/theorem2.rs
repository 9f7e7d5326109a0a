use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::report::{monogamy_triple, require_tripartite, MonogamyReport};
use crate::error::{Error, Result};
use crate::measures::RoofConfig;
use crate::numerics::{hermitian_eig, inner, ComplexMatrix, ZERO};
use crate::states::random::haar_unitary;
use crate::states::PureState;

/// Required agreement between `ρ_AB^{T_B}` and `ρ'_AB`.
pub const PSI_PRIME_TOL: f64 = 1e-9;
/// Reconstruction tolerance for expansions handed to [`psi_prime`].
pub const EXPANSION_TOL: f64 = 1e-10;

const SPEC_SUM_TOL: f64 = 1e-12;
const SPEC_UNITARY_TOL: f64 = 1e-10;

/// Parameters of the equal-marginal family
///
/// ```text
/// |ψ0⟩ = √μ0 |0⟩|0⟩ + √μ1 |1⟩|1⟩
/// |ψ1⟩ = √μ0 |0⟩U|0⟩ + √μ1 |1⟩U|1⟩
/// |Ψ⟩  = √λ0 |ψ0⟩_AC |0⟩_B + √λ1 |ψ1⟩_AC |1⟩_B
/// ```
///
/// Both AC members have `tr_C = diag(μ0, μ1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EqualMarginalSpec {
    d: usize,
    mu: [f64; 2],
    lambda: [f64; 2],
    u: ComplexMatrix,
}

impl EqualMarginalSpec {
    pub fn new(d: usize, mu: [f64; 2], lambda: [f64; 2], u: ComplexMatrix) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidSpec(format!("d = {d}, need d >= 2")));
        }
        for (name, p) in [("mu", mu), ("lambda", lambda)] {
            if p.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
                return Err(Error::InvalidSpec(format!("{name} has a negative entry: {p:?}")));
            }
            if (p[0] + p[1] - 1.0).abs() > SPEC_SUM_TOL {
                return Err(Error::InvalidSpec(format!("{name} does not sum to 1: {p:?}")));
            }
        }
        if u.rows() != d || u.cols() != d {
            return Err(Error::InvalidSpec(format!(
                "U is {}x{}, expected {d}x{d}",
                u.rows(),
                u.cols()
            )));
        }
        let dev = u.adjoint().matmul(&u).max_abs_diff(&ComplexMatrix::identity(d));
        if dev > SPEC_UNITARY_TOL {
            return Err(Error::InvalidSpec(format!("U is not unitary (deviation {dev:e})")));
        }
        Ok(Self { d, mu, lambda, u })
    }

    /// Uniform `μ0`, `λ0` and a Haar unitary.
    pub fn random<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<Self> {
        let m0: f64 = rng.gen();
        let l0: f64 = rng.gen();
        let u = haar_unitary(d.max(1), rng);
        Self::new(d, [m0, 1.0 - m0], [l0, 1.0 - l0], u)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn mu(&self) -> [f64; 2] {
        self.mu
    }

    pub fn lambda(&self) -> [f64; 2] {
        self.lambda
    }

    pub fn u(&self) -> &ComplexMatrix {
        &self.u
    }

    /// `C_A(BC) = C^a_AC = 2√(μ0 μ1)` for every member of the family.
    pub fn expected_concurrence(&self) -> f64 {
        2.0 * (self.mu[0] * self.mu[1]).sqrt()
    }

    /// The AC vectors `|ψ0⟩`, `|ψ1⟩` (index `a·d + c`).
    pub fn basis(&self) -> (Vec<Complex64>, Vec<Complex64>) {
        let d = self.d;
        let s = [self.mu[0].sqrt(), self.mu[1].sqrt()];
        let mut psi0 = vec![ZERO; 2 * d];
        let mut psi1 = vec![ZERO; 2 * d];
        for a in 0..2 {
            psi0[a * d + a] = Complex64::new(s[a], 0.0);
            for c in 0..d {
                psi1[a * d + c] = self.u[(c, a)] * s[a];
            }
        }
        (psi0, psi1)
    }
}

/// Builds the `[2, 2, d]` state of the equal-marginal family.
pub fn build_equal_marginal_state(spec: &EqualMarginalSpec) -> Result<PureState> {
    let d = spec.d;
    let (psi0, psi1) = spec.basis();
    let l = [spec.lambda[0].sqrt(), spec.lambda[1].sqrt()];
    let mut amps = vec![ZERO; 4 * d];
    for a in 0..2 {
        for c in 0..d {
            amps[a * 2 * d + c] = psi0[a * d + c] * l[0];
            amps[a * 2 * d + d + c] = psi1[a * d + c] * l[1];
        }
    }
    PureState::normalized(vec![2, 2, d], amps)
}

/// AC components `⟨b|_B Ψ` for `b = 0, 1`.
fn b_components(psi: &PureState) -> [Vec<Complex64>; 2] {
    let d = psi.dims()[2];
    let amps = psi.amps();
    let mut out = [vec![ZERO; 2 * d], vec![ZERO; 2 * d]];
    for a in 0..2 {
        for (b, comp) in out.iter_mut().enumerate() {
            for c in 0..d {
                comp[a * d + c] = amps[a * 2 * d + b * d + c];
            }
        }
    }
    out
}

/// Least-squares coefficients of `v` in `span{p0, p1}`.
fn expand_pair(v: &[Complex64], p0: &[Complex64], p1: &[Complex64]) -> [Complex64; 2] {
    let g00 = inner(p0, p0);
    let g01 = inner(p0, p1);
    let g10 = g01.conj();
    let g11 = inner(p1, p1);
    let r0 = inner(p0, v);
    let r1 = inner(p1, v);
    let det = g00 * g11 - g01 * g10;
    if det.norm() <= 1e-12 * g00.norm() * g11.norm() {
        // collinear pair: everything goes on p0
        return [r0 / g00, ZERO];
    }
    [(g11 * r0 - g01 * r1) / det, (g00 * r1 - g10 * r0) / det]
}

/// Coefficients `(x0, x1, y0, y1)` of the B components of `psi` in the basis `(p0, p1)`.
pub fn expand_in_basis(
    psi: &PureState,
    basis: (&[Complex64], &[Complex64]),
) -> Result<[Complex64; 4]> {
    let d = require_tripartite(psi)?;
    check_basis(d, basis)?;
    let [c0, c1] = b_components(psi);
    let [x0, x1] = expand_pair(&c0, basis.0, basis.1);
    let [y0, y1] = expand_pair(&c1, basis.0, basis.1);
    Ok([x0, x1, y0, y1])
}

fn check_basis(d: usize, basis: (&[Complex64], &[Complex64])) -> Result<()> {
    if basis.0.len() != 2 * d || basis.1.len() != 2 * d {
        return Err(Error::ShapeMismatch(format!(
            "basis vectors of length {} and {}, expected {}",
            basis.0.len(),
            basis.1.len(),
            2 * d
        )));
    }
    Ok(())
}

fn combine(a: Complex64, p0: &[Complex64], b: Complex64, p1: &[Complex64]) -> Vec<Complex64> {
    p0.iter().zip(p1).map(|(u, v)| a * u + b * v).collect()
}

/// The conjugate-swapped partner `Ψ′` of an expanded state.
///
/// With `Ψ = (x0ψ0 + x1ψ1)|0⟩_B + (y0ψ0 + y1ψ1)|1⟩_B`, returns
/// `Ψ′ = (x1*ψ0 + x0*ψ1)|0⟩_B + (y1*ψ0 + y0*ψ1)|1⟩_B`.
pub fn psi_prime(
    psi: &PureState,
    basis: (&[Complex64], &[Complex64]),
    coeffs: [Complex64; 4],
) -> Result<PureState> {
    let d = require_tripartite(psi)?;
    check_basis(d, basis)?;
    let [x0, x1, y0, y1] = coeffs;
    let (p0, p1) = basis;

    let [c0, c1] = b_components(psi);
    let mismatch = combine(x0, p0, x1, p1)
        .iter()
        .zip(&c0)
        .chain(combine(y0, p0, y1, p1).iter().zip(&c1))
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    if mismatch > EXPANSION_TOL {
        return Err(Error::ExpansionMismatch(mismatch));
    }

    let comps = [
        combine(x1.conj(), p0, x0.conj(), p1),
        combine(y1.conj(), p0, y0.conj(), p1),
    ];
    let mut amps = vec![ZERO; 4 * d];
    for a in 0..2 {
        for (b, comp) in comps.iter().enumerate() {
            for c in 0..d {
                amps[a * 2 * d + b * d + c] = comp[a * d + c];
            }
        }
    }
    PureState::new(vec![2, 2, d], amps)
}

/// `‖ρ_AB^{T_B} − tr_C |Ψ′⟩⟨Ψ′|‖_max` for the expansion of `psi` in `basis`.
pub fn psi_prime_deviation(psi: &PureState, basis: (&[Complex64], &[Complex64])) -> Result<f64> {
    let coeffs = expand_in_basis(psi, basis)?;
    let prime = psi_prime(psi, basis, coeffs)?;
    let pt = psi.reduced(&[0, 1])?.partial_transpose(1)?;
    Ok(pt.max_abs_diff(prime.reduced(&[0, 1])?.matrix()))
}

/// Rotates B onto the eigenbasis of ρ_B, so that the B components of the
/// result are the scaled eigenvectors of ρ_AC.
pub fn to_b_schmidt_frame(psi: &PureState) -> Result<PureState> {
    require_tripartite(psi)?;
    let rho_b = psi.reduced(&[1])?;
    let eig = hermitian_eig(rho_b.matrix(), 1e-9)?;
    // descending order puts the dominant component on |0⟩_B
    let v = ComplexMatrix::from_columns(&[eig.eigenvector(1), eig.eigenvector(0)])?;
    psi.apply_local(1, &v.adjoint())
}

/// Everything computed by [`verify_theorem2`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem2Verdict {
    pub report: MonogamyReport,
    /// `2√(μ0 μ1)`.
    pub expected_concurrence: f64,
    /// `|C_A(BC) − C^a_AC| ≤ tol`; when false the remaining checks are informational.
    pub premise_met: bool,
    /// Ψ′ identity deviation with the computational B basis; `None` if the
    /// construction failed.
    pub psi_prime_deviation: Option<f64>,
    /// Same with B rotated so the AC components are eigenvectors of ρ_AC.
    pub psi_prime_spectral_deviation: Option<f64>,
    pub passed: bool,
}

/// Builds the equal-marginal state and checks that `ρ_AB` is PPT with zero
/// concurrence, and that `ρ_AB^{T_B}` equals the reduced state of `Ψ′`.
pub fn verify_theorem2(
    spec: &EqualMarginalSpec,
    roof: &RoofConfig,
    tol: f64,
) -> Result<Theorem2Verdict> {
    let psi = build_equal_marginal_state(spec)?;
    let report = monogamy_triple(&psi, roof)?;
    let (p0, p1) = spec.basis();
    let basis = (p0.as_slice(), p1.as_slice());

    let premise_met = (report.c_a_bc - report.c_ac_assist).abs() <= tol;
    let dev = psi_prime_deviation(&psi, basis).ok();
    let spectral_dev = psi_prime_deviation(&to_b_schmidt_frame(&psi)?, basis).ok();
    let identity_ok = [dev, spectral_dev]
        .iter()
        .all(|x| matches!(x, Some(v) if *v <= PSI_PRIME_TOL));
    let passed = !premise_met || (report.ppt_ab && report.c_ab <= tol && identity_ok);
    Ok(Theorem2Verdict {
        expected_concurrence: spec.expected_concurrence(),
        report,
        premise_met,
        psi_prime_deviation: dev,
        psi_prime_spectral_deviation: spectral_dev,
        passed,
    })
}
