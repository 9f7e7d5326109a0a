use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{hermitian_eig, singular_values, ComplexMatrix};
use crate::states::{matrix_fidelity, DensityMatrix, PureState};

/// Concurrence of a pure state across the bipartition `cut | rest`.
///
/// Equals `√(2(1 − tr ρ²))` with `ρ` the reduced state on `cut`. When either side
/// is a qubit it is evaluated as `2√det ρ` through the 2×2 minors of the amplitude
/// matrix, which avoids the cancellation in `1 − tr ρ²` near product states.
pub fn pure_concurrence(state: &PureState, cut: &[usize]) -> Result<f64> {
    let n = state.dims().len();
    let mut side = cut.to_vec();
    side.sort_unstable();
    side.dedup();
    if side.is_empty() || side.len() >= n || side.iter().any(|&i| i >= n) {
        return Err(Error::BadCut(cut.to_vec()));
    }
    let rest: Vec<usize> = (0..n).filter(|i| !side.contains(i)).collect();
    let side_dim: usize = side.iter().map(|&i| state.dims()[i]).product();
    let rest_dim: usize = rest.iter().map(|&i| state.dims()[i]).product();
    if side_dim == 2 {
        return Ok(qubit_row_concurrence(&state.factor(&side)?));
    }
    if rest_dim == 2 {
        return Ok(qubit_row_concurrence(&state.factor(&rest)?));
    }
    let purity = state.reduced(&side)?.purity();
    Ok((2.0 * (1.0 - purity)).max(0.0).sqrt())
}

/// `2√det(W W†)` for a `2 × n` matrix `W`, as `2√(Σ_{i<j} |W0i W1j − W0j W1i|²)`.
pub(crate) fn qubit_row_concurrence(w: &ComplexMatrix) -> f64 {
    debug_assert_eq!(w.rows(), 2);
    let (r0, r1) = (w.row(0), w.row(1));
    minor_sum(r0, r1).sqrt() * 2.0
}

fn minor_sum(r0: &[Complex64], r1: &[Complex64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..r0.len() {
        for j in i + 1..r0.len() {
            acc += (r0[i] * r1[j] - r0[j] * r1[i]).norm_sqr();
        }
    }
    acc
}

/// `2√det(tr_C |v⟩⟨v|)` for an unnormalized vector on `2 ⊗ d` (A-major).
///
/// Degree-2 homogeneous in `|v⟩⟨v|`, so for `v = √p·φ` this is `p·C(φ)`.
pub(crate) fn weighted_qubit_concurrence(v: &[Complex64]) -> f64 {
    let (r0, r1) = v.split_at(v.len() / 2);
    minor_sum(r0, r1).sqrt() * 2.0
}

fn require_two_qubits(rho: &DensityMatrix) -> Result<()> {
    if rho.dims() != [2, 2] {
        return Err(Error::WrongDims {
            expected: "[2, 2]",
            got: rho.dims().to_vec(),
        });
    }
    Ok(())
}

/// `σ_y ⊗ σ_y`, which is real.
fn yy() -> ComplexMatrix {
    ComplexMatrix::from_real(
        4,
        4,
        &[
            0.0, 0.0, 0.0, -1.0, //
            0.0, 0.0, 1.0, 0.0, //
            0.0, 1.0, 0.0, 0.0, //
            -1.0, 0.0, 0.0, 0.0,
        ],
    )
    .expect("finite constant")
}

/// `(σ_y ⊗ σ_y) ρ* (σ_y ⊗ σ_y)`.
pub fn spin_flip(rho: &DensityMatrix) -> Result<ComplexMatrix> {
    require_two_qubits(rho)?;
    let yy = yy();
    Ok(yy.matmul(&rho.matrix().conj()).matmul(&yy))
}

/// Eigenvalues at or below this are dropped when factoring `ρ = W W†`.
const FACTOR_RANK_TOL: f64 = 1e-14;

/// `W = V √Λ` over the eigenvalues above `FACTOR_RANK_TOL`.
fn density_factor(rho: &DensityMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(rho.matrix(), 1e-9)?;
    let kept: Vec<usize> = (0..eig.eigenvalues.len())
        .filter(|&j| eig.eigenvalues[j] > FACTOR_RANK_TOL)
        .collect();
    let n = rho.dim();
    let mut w = ComplexMatrix::zeros(n, kept.len().max(1));
    for (col, &j) in kept.iter().enumerate() {
        let s = eig.eigenvalues[j].sqrt();
        for i in 0..n {
            w[(i, col)] = eig.eigenvectors[(i, j)] * s;
        }
    }
    Ok(w)
}

/// The values `λ_1 ≥ … ≥ λ_4`, square roots of the eigenvalues of `ρ ρ̃`, for
/// `ρ = W W†`.
///
/// They are the singular values of the complex symmetric matrix `Wᵀ (σ_y ⊗ σ_y) W`.
pub(crate) fn flip_values_from_factor(w: &ComplexMatrix) -> [f64; 4] {
    debug_assert_eq!(w.rows(), 4);
    let tau = w.transpose().matmul(&yy()).matmul(w);
    let sv = singular_values(&tau);
    let mut out = [0.0; 4];
    for (dst, s) in out.iter_mut().zip(sv) {
        *dst = s;
    }
    out
}

pub(crate) fn wootters(l: &[f64; 4]) -> f64 {
    (l[0] - l[1] - l[2] - l[3]).max(0.0)
}

/// Two-qubit concurrence `max(0, λ1 − λ2 − λ3 − λ4)`.
pub fn concurrence_2qubit(rho: &DensityMatrix) -> Result<f64> {
    require_two_qubits(rho)?;
    Ok(wootters(&flip_values_from_factor(&density_factor(rho)?)))
}

/// Two-qubit concurrence of assistance `Σ λ_i = F(ρ, ρ̃)`.
pub fn coa_2qubit(rho: &DensityMatrix) -> Result<f64> {
    require_two_qubits(rho)?;
    Ok(flip_values_from_factor(&density_factor(rho)?).iter().sum())
}

/// `F(ρ, ρ̃)` evaluated literally through the fidelity; slower and less accurate
/// near rank deficiency than [`coa_2qubit`], kept as an independent route.
pub fn coa_2qubit_fidelity(rho: &DensityMatrix) -> Result<f64> {
    let tilde = spin_flip(rho)?;
    matrix_fidelity(rho.matrix(), &tilde)
}
