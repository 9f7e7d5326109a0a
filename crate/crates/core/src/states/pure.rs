use num_complex::Complex64;

use super::density::DensityMatrix;
use super::subsystems::{validate_dims, validate_keep, SplitIndex};
use crate::error::{Error, Result};
use crate::numerics::{norm_sqr, ComplexMatrix, ZERO};

/// Normalization tolerance for pure states.
pub const NORM_TOL: f64 = 1e-10;

/// A normalized state vector over an ordered list of subsystems.
///
/// Amplitudes are A-major: the label `(i_A, i_B, i_C)` sits at
/// `i_A·(d_B·d_C) + i_B·d_C + i_C`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dims: Vec<usize>,
    amps: Vec<Complex64>,
}

impl PureState {
    pub fn new(dims: Vec<usize>, amps: Vec<Complex64>) -> Result<Self> {
        let total = validate_dims(&dims)?;
        if amps.len() != total {
            return Err(Error::ShapeMismatch(format!(
                "{} amplitudes for dims {:?} (need {})",
                amps.len(),
                dims,
                total
            )));
        }
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let n2 = norm_sqr(&amps);
        if (n2 - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(n2));
        }
        Ok(Self { dims, amps })
    }

    /// Rescales `amps` to unit norm. Fails on the zero vector.
    pub fn normalized(dims: Vec<usize>, amps: Vec<Complex64>) -> Result<Self> {
        let n2 = norm_sqr(&amps);
        if !(n2 > 0.0) || !n2.is_finite() {
            return Err(Error::NotNormalized(n2));
        }
        let s = 1.0 / n2.sqrt();
        Self::new(dims, amps.into_iter().map(|z| z * s).collect())
    }

    /// Computational basis state `|labels⟩`.
    pub fn basis(dims: Vec<usize>, labels: &[usize]) -> Result<Self> {
        let total = validate_dims(&dims)?;
        if labels.len() != dims.len() || labels.iter().zip(&dims).any(|(l, d)| l >= d) {
            return Err(Error::ShapeMismatch(format!(
                "basis labels {labels:?} for dims {dims:?}"
            )));
        }
        let flat = labels.iter().zip(&dims).fold(0, |acc, (l, d)| acc * d + l);
        let mut amps = vec![ZERO; total];
        amps[flat] = Complex64::new(1.0, 0.0);
        Ok(Self { dims, amps })
    }

    pub(crate) fn from_trusted(dims: Vec<usize>, amps: Vec<Complex64>) -> Self {
        debug_assert_eq!(dims.iter().product::<usize>(), amps.len());
        Self { dims, amps }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amps(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn total_dim(&self) -> usize {
        self.amps.len()
    }

    /// `|self⟩ ⊗ |other⟩`.
    pub fn tensor(&self, other: &PureState) -> PureState {
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        PureState { dims, amps }
    }

    pub fn inner(&self, other: &PureState) -> Complex64 {
        crate::numerics::inner(&self.amps, &other.amps)
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_trusted(
            self.dims.clone(),
            ComplexMatrix::outer(&self.amps, &self.amps),
        )
    }

    /// Matrix `W` with rows indexed by the kept subsystems and columns by the traced
    /// ones, so that the reduced state is `W W†`.
    pub fn factor(&self, keep: &[usize]) -> Result<ComplexMatrix> {
        let keep = validate_keep(&self.dims, keep)?;
        let split = SplitIndex::new(&self.dims, &keep);
        let mut w = ComplexMatrix::zeros(split.kept_dim, split.traced_dim);
        for (flat, &a) in self.amps.iter().enumerate() {
            let (k, t) = split.split(flat);
            w[(k, t)] = a;
        }
        Ok(w)
    }

    /// Reduced state on the subsystems in `keep`, listed in original order.
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let w = self.factor(keep)?;
        let mut rho = w.matmul(&w.adjoint());
        rho.hermitize();
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let dims = keep.iter().map(|&k| self.dims[k]).collect();
        Ok(DensityMatrix::from_trusted(dims, rho))
    }

    /// Applies a local operator on subsystem `index`.
    pub fn apply_local(&self, index: usize, op: &ComplexMatrix) -> Result<PureState> {
        if index >= self.dims.len() {
            return Err(Error::BadSubsystemIndex {
                index,
                count: self.dims.len(),
            });
        }
        let d = self.dims[index];
        if op.rows() != d || op.cols() != d {
            return Err(Error::ShapeMismatch(format!(
                "local operator {}x{} on subsystem of dimension {d}",
                op.rows(),
                op.cols()
            )));
        }
        let inner_stride: usize = self.dims[index + 1..].iter().product();
        let outer: usize = self.dims[..index].iter().product();
        let mut amps = vec![ZERO; self.amps.len()];
        for o in 0..outer {
            for s in 0..inner_stride {
                for i in 0..d {
                    let mut acc = ZERO;
                    for j in 0..d {
                        acc += op[(i, j)] * self.amps[(o * d + j) * inner_stride + s];
                    }
                    amps[(o * d + i) * inner_stride + s] = acc;
                }
            }
        }
        Ok(PureState {
            dims: self.dims.clone(),
            amps,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn rejects_unnormalized_and_bad_lengths() {
        assert!(matches!(
            PureState::new(vec![2], vec![c(1.0), c(1.0)]),
            Err(Error::NotNormalized(_))
        ));
        assert!(matches!(
            PureState::new(vec![2, 2], vec![c(1.0)]),
            Err(Error::ShapeMismatch(_))
        ));
        assert!(matches!(
            PureState::new(vec![0], vec![]),
            Err(Error::BadDims(_))
        ));
    }

    #[test]
    fn basis_uses_a_major_order() {
        let s = PureState::basis(vec![2, 2, 3], &[1, 0, 2]).unwrap();
        assert_eq!(s.amps()[6 + 2], c(1.0));
    }

    #[test]
    fn reduced_of_bell_is_half_identity() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = PureState::new(vec![2, 2], vec![c(h), c(0.0), c(0.0), c(h)]).unwrap();
        let ra = bell.reduced(&[0]).unwrap();
        assert!(ra.matrix().max_abs_diff(&ComplexMatrix::identity(2).scale(0.5)) < 1e-15);
        assert_eq!(ra.dims(), &[2]);
    }

    #[test]
    fn reduced_of_product_is_pure() {
        let s = PureState::basis(vec![2, 2, 2], &[0, 0, 0]).unwrap();
        let ra = s.reduced(&[0]).unwrap();
        assert_eq!(ra.matrix(), &ComplexMatrix::from_diag(&[1.0, 0.0]));
    }

    #[test]
    fn apply_local_flips_the_right_factor() {
        let s = PureState::basis(vec![2, 3, 2], &[0, 1, 1]).unwrap();
        let x = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let t = s.apply_local(2, &x).unwrap();
        assert_eq!(t, PureState::basis(vec![2, 3, 2], &[0, 1, 0]).unwrap());
        let t = s.apply_local(0, &x).unwrap();
        assert_eq!(t, PureState::basis(vec![2, 3, 2], &[1, 1, 1]).unwrap());
    }
}
