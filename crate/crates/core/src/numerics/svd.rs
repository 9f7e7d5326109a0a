use num_complex::Complex64;

use super::matrix::ComplexMatrix;

const MAX_SWEEPS: usize = 60;

/// Singular values (descending) by one-sided Jacobi rotations on the columns.
///
/// Absolute accuracy is on the order of machine epsilon times `‖A‖`, so tiny
/// singular values are not inflated the way square roots of eigenvalues of
/// `A†A` are.
pub fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    let cols = a.cols();
    // column-major working copy
    let mut c: Vec<Vec<Complex64>> = (0..cols).map(|j| a.column(j)).collect();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..cols {
            for j in i + 1..cols {
                let alpha: f64 = c[i].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = c[j].iter().map(|z| z.norm_sqr()).sum();
                let gamma: Complex64 = c[i].iter().zip(&c[j]).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g <= f64::EPSILON * (alpha * beta).sqrt() || g < f64::MIN_POSITIVE {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                let (left, right) = c.split_at_mut(j);
                for (x, y) in left[i].iter_mut().zip(right[0].iter_mut()) {
                    let yb = *y * phase.conj();
                    let xi = *x;
                    *x = xi * cs - yb * sn;
                    *y = xi * sn + yb * cs;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = c
        .iter()
        .map(|col| col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    sv
}
