use num_complex::Complex64;

use super::matrix::{ComplexMatrix, ZERO};
use crate::error::{Error, Result};

/// Off-diagonal Frobenius norm (relative to the matrix norm) at which Jacobi sweeps stop.
pub const JACOBI_THRESHOLD: f64 = 1e-14;
const MAX_SWEEPS: usize = 64;

/// Eigenvalues below zero but above `-PSD_CLAMP` are treated as zero.
pub const PSD_CLAMP: f64 = 1e-10;

/// Eigenpairs of a Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianEigenResult {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `j` is the eigenvector for `eigenvalues[j]`.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigenResult {
    pub fn eigenvector(&self, j: usize) -> Vec<Complex64> {
        self.eigenvectors.column(j)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    /// `V f(Λ) V†`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let n = v.rows();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &lam) in self.eigenvalues.iter().enumerate() {
            let w = f(lam);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = v[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] += vik * v[(j, k)].conj();
                }
            }
        }
        out
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Each rotation first removes the phase of the pivot with a diagonal unitary,
/// then applies the real symmetric Jacobi rotation that zeroes it.
pub fn hermitian_eig(m: &ComplexMatrix, tol: f64) -> Result<HermitianEigenResult> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let asymmetry = m.hermitian_deviation();
    if asymmetry > tol {
        return Err(Error::NotHermitian { asymmetry, tol });
    }
    let n = m.rows();
    let mut a = m.clone();
    a.hermitize();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius();

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= JACOBI_THRESHOLD * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for i in 0..n {
            eigenvectors[(i, dst)] = v[(i, src)];
        }
    }
    Ok(HermitianEigenResult {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let b = a[(p, q)];
    let h = b.norm();
    if h < f64::MIN_POSITIVE {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let phase = b / h;
    let tau = (aqq - app) / (2.0 * h);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let cs = 1.0 / (1.0 + t * t).sqrt();
    let sn = t * cs;

    // U = diag(1, conj(phase)) · [[cs, sn], [-sn, cs]]
    let u_pp = Complex64::new(cs, 0.0);
    let u_pq = Complex64::new(sn, 0.0);
    let u_qp = -phase.conj() * sn;
    let u_qq = phase.conj() * cs;

    let n = a.rows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * u_pp + akq * u_qp;
        a[(k, q)] = akp * u_pq + akq * u_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
        a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = Complex64::new(app - t * h, 0.0);
    a[(q, q)] = Complex64::new(aqq + t * h, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * u_pp + vkq * u_qp;
        v[(k, q)] = vkp * u_pq + vkq * u_qq;
    }
}

/// Hermitian tolerance used by the PSD-gated helpers.
const HERMITIAN_TOL: f64 = 1e-9;

/// Principal square root of a Hermitian PSD matrix.
pub fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(m, HERMITIAN_TOL)?;
    let min = eig.min_eigenvalue();
    if min < -PSD_CLAMP {
        return Err(Error::NotPsd {
            min_eigenvalue: min,
        });
    }
    let mut r = eig.reconstruct_with(|x| x.max(0.0).sqrt());
    r.hermitize();
    Ok(r)
}

/// `√max(0, det M)` for a 2×2 Hermitian PSD matrix, with `det = ad − |b|²`.
pub fn sqrt_det2(m: &ComplexMatrix) -> Result<f64> {
    if m.rows() != 2 || m.cols() != 2 {
        return Err(Error::WrongShape {
            expected: "2x2",
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let asymmetry = m.hermitian_deviation();
    if asymmetry > HERMITIAN_TOL {
        return Err(Error::NotHermitian {
            asymmetry,
            tol: HERMITIAN_TOL,
        });
    }
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = m[(0, 1)];
    let det = a * d - b.norm_sqr();
    // smaller eigenvalue of [[a,b],[b*,d]]
    let half_tr = 0.5 * (a + d);
    let min_eig = half_tr - (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    if min_eig < -PSD_CLAMP {
        return Err(Error::NotPsd {
            min_eigenvalue: min_eig,
        });
    }
    Ok(det.max(0.0).sqrt())
}
