use num_complex::Complex64;

use super::subsystems::{validate_dims, validate_keep, SplitIndex};
use crate::error::{Error, Result};
use crate::numerics::{hermitian_eig, psd_sqrt, ComplexMatrix, PSD_CLAMP};

/// Validation tolerance for Hermiticity, positivity and trace.
pub const DENSITY_TOL: f64 = 1e-10;

/// Hermitian, positive semidefinite, unit-trace matrix over ordered subsystems.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    mat: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(dims: Vec<usize>, mat: ComplexMatrix) -> Result<Self> {
        let total = validate_dims(&dims)?;
        if mat.rows() != total || mat.cols() != total {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} matrix for dims {:?}",
                mat.rows(),
                mat.cols(),
                dims
            )));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > DENSITY_TOL || tr.im.abs() > DENSITY_TOL {
            return Err(Error::BadTrace(tr.re));
        }
        let eig = hermitian_eig(&mat, DENSITY_TOL)?;
        if eig.min_eigenvalue() < -DENSITY_TOL {
            return Err(Error::NotPsd {
                min_eigenvalue: eig.min_eigenvalue(),
            });
        }
        Ok(Self { dims, mat })
    }

    pub(crate) fn from_trusted(dims: Vec<usize>, mat: ComplexMatrix) -> Self {
        debug_assert_eq!(dims.iter().product::<usize>(), mat.rows());
        Self { dims, mat }
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Result<Self> {
        let n = validate_dims(&dims)?;
        Ok(Self {
            dims,
            mat: ComplexMatrix::identity(n).scale(1.0 / n as f64),
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn purity(&self) -> f64 {
        // tr ρ² = Σ |ρ_ij|² for Hermitian ρ
        self.mat.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    /// `U ρ U†` with the same subsystem structure.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.rows() != self.dim() || u.cols() != self.dim() {
            return Err(Error::ShapeMismatch("unitary does not match state".into()));
        }
        let mut mat = u.matmul(&self.mat).matmul(&u.adjoint());
        mat.hermitize();
        Ok(Self {
            dims: self.dims.clone(),
            mat,
        })
    }

    /// Traces out every subsystem not in `keep`; kept dims stay in original order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        let keep = validate_keep(&self.dims, keep)?;
        let split = SplitIndex::new(&self.dims, &keep);
        let compose = split.compose_table();
        let (nk, nt) = (split.kept_dim, split.traced_dim);
        let mut out = ComplexMatrix::zeros(nk, nk);
        for i in 0..nk {
            for j in 0..nk {
                let mut acc = Complex64::new(0.0, 0.0);
                for t in 0..nt {
                    acc += self.mat[(compose[i * nt + t], compose[j * nt + t])];
                }
                out[(i, j)] = acc;
            }
        }
        out.hermitize();
        Ok(Self {
            dims: keep.iter().map(|&k| self.dims[k]).collect(),
            mat: out,
        })
    }

    /// Transposes the indices of one factor of a bipartite state.
    pub fn partial_transpose(&self, subsystem: usize) -> Result<ComplexMatrix> {
        let (da, db) = self.bipartite_dims()?;
        if subsystem > 1 {
            return Err(Error::BadSubsystemIndex {
                index: subsystem,
                count: 2,
            });
        }
        let n = da * db;
        let mut out = ComplexMatrix::zeros(n, n);
        for ia in 0..da {
            for ib in 0..db {
                for ja in 0..da {
                    for jb in 0..db {
                        let (src_r, src_c) = if subsystem == 1 {
                            (ia * db + jb, ja * db + ib)
                        } else {
                            (ja * db + ib, ia * db + jb)
                        };
                        out[(ia * db + ib, ja * db + jb)] = self.mat[(src_r, src_c)];
                    }
                }
            }
        }
        Ok(out)
    }

    /// PPT test on the second factor; returns the verdict and the smallest
    /// eigenvalue of the partial transpose.
    pub fn is_ppt(&self, tol: f64) -> Result<(bool, f64)> {
        let pt = self.partial_transpose(1)?;
        let min = hermitian_eig(&pt, DENSITY_TOL.max(tol))?.min_eigenvalue();
        Ok((min >= -tol, min))
    }

    fn bipartite_dims(&self) -> Result<(usize, usize)> {
        match self.dims.as_slice() {
            &[a, b] => Ok((a, b)),
            _ => Err(Error::NotBipartite(self.dims.clone())),
        }
    }
}

/// Uhlmann fidelity `tr √(√ρ σ √ρ)` of two states with the same dims.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dims() != sigma.dims() {
        return Err(Error::DimMismatch {
            left: rho.dims().to_vec(),
            right: sigma.dims().to_vec(),
        });
    }
    matrix_fidelity(rho.matrix(), sigma.matrix())
}

/// Fidelity form `tr √(√A B √A)` for any pair of PSD matrices.
pub(crate) fn matrix_fidelity(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    let sa = psd_sqrt(a)?;
    let mut inner = sa.matmul(b).matmul(&sa);
    inner.hermitize();
    let eig = hermitian_eig(&inner, 1e-9)?;
    if eig.min_eigenvalue() < -PSD_CLAMP {
        return Err(Error::NotPsd {
            min_eigenvalue: eig.min_eigenvalue(),
        });
    }
    Ok(eig.eigenvalues.iter().map(|x| x.max(0.0).sqrt()).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::PureState;

    fn bell() -> PureState {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        PureState::new(
            vec![2, 2],
            vec![
                Complex64::new(h, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(h, 0.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn validation_errors() {
        let half = ComplexMatrix::identity(2).scale(0.5);
        assert!(DensityMatrix::new(vec![2], half.clone()).is_ok());
        assert!(matches!(
            DensityMatrix::new(vec![2], half.scale(2.0)),
            Err(Error::BadTrace(_))
        ));
        assert!(matches!(
            DensityMatrix::new(vec![2], ComplexMatrix::from_diag(&[1.5, -0.5])),
            Err(Error::NotPsd { .. })
        ));
        assert!(matches!(
            DensityMatrix::new(vec![3], half),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn bell_is_npt_with_minus_half() {
        let (ppt, min) = bell().density().is_ppt(1e-10).unwrap();
        assert!(!ppt);
        assert!((min + 0.5).abs() < 1e-14);
    }

    #[test]
    fn maximally_mixed_is_ppt() {
        let (ppt, min) = DensityMatrix::maximally_mixed(vec![2, 2])
            .unwrap()
            .is_ppt(1e-10)
            .unwrap();
        assert!(ppt);
        assert!((min - 0.25).abs() < 1e-14);
    }

    #[test]
    fn partial_transpose_errors_on_tripartite() {
        let rho = DensityMatrix::maximally_mixed(vec![2, 2, 2]).unwrap();
        assert!(matches!(
            rho.partial_transpose(1),
            Err(Error::NotBipartite(_))
        ));
        assert!(matches!(rho.is_ppt(1e-10), Err(Error::NotBipartite(_))));
    }

    #[test]
    fn partial_transpose_of_product_transposes_factor() {
        let a = ComplexMatrix::from_vec(
            2,
            2,
            vec![
                Complex64::new(0.7, 0.0),
                Complex64::new(0.1, 0.2),
                Complex64::new(0.1, -0.2),
                Complex64::new(0.3, 0.0),
            ],
        )
        .unwrap();
        let b = ComplexMatrix::from_vec(
            2,
            2,
            vec![
                Complex64::new(0.4, 0.0),
                Complex64::new(0.0, 0.3),
                Complex64::new(0.0, -0.3),
                Complex64::new(0.6, 0.0),
            ],
        )
        .unwrap();
        let rho = DensityMatrix::new(vec![2, 2], a.kron(&b)).unwrap();
        let pt = rho.partial_transpose(1).unwrap();
        assert!(pt.max_abs_diff(&a.kron(&b.transpose())) < 1e-15);
        let pta = rho.partial_transpose(0).unwrap();
        assert!(pta.max_abs_diff(&a.transpose().kron(&b)) < 1e-15);

        let twice = DensityMatrix::from_trusted(vec![2, 2], pt)
            .partial_transpose(1)
            .unwrap();
        assert_eq!(&twice, rho.matrix());
    }

    #[test]
    fn partial_trace_of_mixed_state() {
        let rho = DensityMatrix::maximally_mixed(vec![2, 3]).unwrap();
        let rc = rho.partial_trace(&[1]).unwrap();
        assert!(rc.matrix().max_abs_diff(&ComplexMatrix::identity(3).scale(1.0 / 3.0)) < 1e-15);
        assert!(matches!(
            rho.partial_trace(&[4]),
            Err(Error::BadSubsystemIndex { index: 4, .. })
        ));
    }

    #[test]
    fn fidelity_examples() {
        let r0 = PureState::basis(vec![2], &[0]).unwrap().density();
        let r1 = PureState::basis(vec![2], &[1]).unwrap().density();
        let mixed = DensityMatrix::maximally_mixed(vec![2]).unwrap();
        assert!((fidelity(&r0, &r0).unwrap() - 1.0).abs() < 1e-12);
        assert!(fidelity(&r0, &r1).unwrap().abs() < 1e-12);
        let f = fidelity(&mixed, &r0).unwrap();
        assert!((f - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((fidelity(&mixed, &mixed).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(
            fidelity(&mixed, &bell().density()),
            Err(Error::DimMismatch { .. })
        ));
    }
}
