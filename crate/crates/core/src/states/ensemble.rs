use num_complex::Complex64;

use super::density::DensityMatrix;
use super::pure::PureState;
use crate::error::{Error, Result};
use crate::numerics::{hermitian_eig, norm_sqr, ComplexMatrix, ZERO};

/// Members whose weight falls below this are dropped.
pub const MIN_WEIGHT: f64 = 1e-14;

/// A decomposition `ρ = Σ p_k |φ_k⟩⟨φ_k|`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureEnsemble {
    members: Vec<(f64, PureState)>,
}

impl PureEnsemble {
    /// Accepts members whose weights sum to one within 1e-10.
    pub fn new(members: Vec<(f64, PureState)>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::ShapeMismatch("empty ensemble".into()));
        }
        let dims = members[0].1.dims().to_vec();
        if members.iter().any(|(_, s)| s.dims() != dims.as_slice()) {
            return Err(Error::ShapeMismatch("ensemble members differ in dims".into()));
        }
        if members.iter().any(|(p, _)| !(*p >= 0.0)) {
            return Err(Error::ShapeMismatch("negative ensemble weight".into()));
        }
        let total: f64 = members.iter().map(|(p, _)| p).sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::ShapeMismatch(format!("weights sum to {total}")));
        }
        Ok(Self { members })
    }

    /// Builds an ensemble from unnormalized vectors `|φ̃_k⟩`, with `p_k = ⟨φ̃_k|φ̃_k⟩`.
    pub(crate) fn from_unnormalized(dims: &[usize], vectors: Vec<Vec<Complex64>>) -> Self {
        let members = vectors
            .into_iter()
            .filter_map(|v| {
                let p = norm_sqr(&v);
                if p < MIN_WEIGHT {
                    return None;
                }
                let s = 1.0 / p.sqrt();
                let amps = v.into_iter().map(|z| z * s).collect();
                Some((p, PureState::from_trusted(dims.to_vec(), amps)))
            })
            .collect();
        Self { members }
    }

    pub fn members(&self) -> &[(f64, PureState)] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn dims(&self) -> &[usize] {
        self.members[0].1.dims()
    }

    /// `Σ p_k |φ_k⟩⟨φ_k|`.
    pub fn mixture(&self) -> ComplexMatrix {
        let n = self.members[0].1.total_dim();
        let mut out = ComplexMatrix::zeros(n, n);
        for (p, s) in &self.members {
            let a = s.amps();
            for i in 0..n {
                let ai = a[i] * *p;
                for j in 0..n {
                    out[(i, j)] += ai * a[j].conj();
                }
            }
        }
        out
    }

    /// Unnormalized vectors `√p_k |φ_k⟩`.
    pub fn scaled_vectors(&self) -> Vec<Vec<Complex64>> {
        self.members
            .iter()
            .map(|(p, s)| {
                let w = p.sqrt();
                s.amps().iter().map(|z| z * w).collect()
            })
            .collect()
    }
}

/// Left-orthonormal `m × r` matrix relating an `r`-member ensemble to an `m`-member one.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleRotation {
    coeffs: ComplexMatrix,
}

/// Tolerance on `‖C†C − I‖_max`.
pub const ROTATION_TOL: f64 = 1e-10;

impl EnsembleRotation {
    pub fn new(coeffs: ComplexMatrix) -> Result<Self> {
        if coeffs.rows() < coeffs.cols() {
            return Err(Error::ShapeMismatch(format!(
                "rotation {}x{} needs rows >= cols",
                coeffs.rows(),
                coeffs.cols()
            )));
        }
        let dev = coeffs
            .adjoint()
            .matmul(&coeffs)
            .max_abs_diff(&ComplexMatrix::identity(coeffs.cols()));
        if dev > ROTATION_TOL {
            return Err(Error::NotLeftOrthonormal(dev));
        }
        Ok(Self { coeffs })
    }

    pub(crate) fn from_trusted(coeffs: ComplexMatrix) -> Self {
        Self { coeffs }
    }

    pub fn identity(r: usize) -> Self {
        Self {
            coeffs: ComplexMatrix::identity(r),
        }
    }

    pub fn coeffs(&self) -> &ComplexMatrix {
        &self.coeffs
    }

    /// Number of output members `m`.
    pub fn members_out(&self) -> usize {
        self.coeffs.rows()
    }

    /// Number of input members `r`.
    pub fn members_in(&self) -> usize {
        self.coeffs.cols()
    }
}

/// Eigen-ensemble of `ρ`, keeping eigenvalues above `rank_tol`, weights renormalized.
pub fn spectral_ensemble(rho: &DensityMatrix, rank_tol: f64) -> Result<PureEnsemble> {
    let eig = hermitian_eig(rho.matrix(), 1e-9)?;
    let kept: Vec<usize> = (0..eig.eigenvalues.len())
        .rev()
        .filter(|&j| eig.eigenvalues[j] > rank_tol)
        .collect();
    if kept.is_empty() {
        return Err(Error::BadRank { rank: 0, max: rho.dim() });
    }
    let total: f64 = kept.iter().map(|&j| eig.eigenvalues[j]).sum();
    let members = kept
        .into_iter()
        .map(|j| {
            (
                eig.eigenvalues[j] / total,
                PureState::from_trusted(rho.dims().to_vec(), eig.eigenvector(j)),
            )
        })
        .collect();
    Ok(PureEnsemble { members })
}

/// Applies an HJW rotation: `|φ̃_k⟩ = Σ_i C[k,i] √p_i |e_i⟩`.
pub fn hjw_ensemble(spectral: &PureEnsemble, rotation: &EnsembleRotation) -> Result<PureEnsemble> {
    if rotation.members_in() != spectral.len() {
        return Err(Error::ShapeMismatch(format!(
            "rotation has {} columns for {} members",
            rotation.members_in(),
            spectral.len()
        )));
    }
    let dev = rotation
        .coeffs()
        .adjoint()
        .matmul(rotation.coeffs())
        .max_abs_diff(&ComplexMatrix::identity(rotation.members_in()));
    if dev > ROTATION_TOL {
        return Err(Error::NotLeftOrthonormal(dev));
    }
    let base = spectral.scaled_vectors();
    let n = base[0].len();
    let c = rotation.coeffs();
    let vectors = (0..c.rows())
        .map(|k| {
            let mut v = vec![ZERO; n];
            for (i, b) in base.iter().enumerate() {
                let cki = c[(k, i)];
                for (dst, z) in v.iter_mut().zip(b) {
                    *dst += cki * z;
                }
            }
            v
        })
        .collect();
    Ok(PureEnsemble::from_unnormalized(spectral.dims(), vectors))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectral_of_pure_is_single_member() {
        let s = PureState::normalized(
            vec![2],
            vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)],
        )
        .unwrap();
        let ens = spectral_ensemble(&s.density(), 1e-12).unwrap();
        assert_eq!(ens.len(), 1);
        assert!((ens.members()[0].0 - 1.0).abs() < 1e-12);
        assert!((ens.members()[0].1.inner(&s).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spectral_of_diagonal_qubit() {
        let rho = DensityMatrix::new(vec![2], ComplexMatrix::from_diag(&[0.3, 0.7])).unwrap();
        let ens = spectral_ensemble(&rho, 1e-12).unwrap();
        let mut ws: Vec<f64> = ens.members().iter().map(|m| m.0).collect();
        ws.sort_by(f64::total_cmp);
        assert!((ws[0] - 0.3).abs() < 1e-15 && (ws[1] - 0.7).abs() < 1e-15);
    }

    #[test]
    fn hadamard_rotation_of_maximally_mixed_qubit() {
        let rho = DensityMatrix::maximally_mixed(vec![2]).unwrap();
        let spectral = spectral_ensemble(&rho, 1e-12).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let rot =
            EnsembleRotation::new(ComplexMatrix::from_real(2, 2, &[h, h, h, -h]).unwrap()).unwrap();
        let ens = hjw_ensemble(&spectral, &rot).unwrap();
        assert_eq!(ens.len(), 2);
        for (p, s) in ens.members() {
            assert!((p - 0.5).abs() < 1e-14);
            // each member is an equal-weight superposition of the two eigenvectors
            assert!((s.amps()[0].norm_sqr() - 0.5).abs() < 1e-12);
        }
        assert!(ens.mixture().max_abs_diff(rho.matrix()) < 1e-14);
    }

    #[test]
    fn identity_rotation_returns_spectral() {
        let rho = DensityMatrix::new(vec![2], ComplexMatrix::from_diag(&[0.25, 0.75])).unwrap();
        let spectral = spectral_ensemble(&rho, 1e-12).unwrap();
        let ens = hjw_ensemble(&spectral, &EnsembleRotation::identity(2)).unwrap();
        for ((p, s), (q, t)) in ens.members().iter().zip(spectral.members()) {
            assert!((p - q).abs() < 1e-15);
            assert!(s.amps().iter().zip(t.amps()).all(|(a, b)| (a - b).norm() < 1e-15));
        }
    }

    #[test]
    fn rotation_errors() {
        assert!(matches!(
            EnsembleRotation::new(ComplexMatrix::from_real(2, 2, &[1.0, 1.0, 0.0, 1.0]).unwrap()),
            Err(Error::NotLeftOrthonormal(_))
        ));
        assert!(matches!(
            EnsembleRotation::new(ComplexMatrix::zeros(1, 2)),
            Err(Error::ShapeMismatch(_))
        ));
        let rho = DensityMatrix::maximally_mixed(vec![2]).unwrap();
        let spectral = spectral_ensemble(&rho, 1e-12).unwrap();
        assert!(matches!(
            hjw_ensemble(&spectral, &EnsembleRotation::identity(3)),
            Err(Error::ShapeMismatch(_))
        ));
    }
}
