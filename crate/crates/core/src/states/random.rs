//! Seeded sampling of pure states, density matrices and unitaries.
//!
//! Every sampler draws from a ChaCha8 stream. `stream_rng(seed, k)` selects
//! stream `k` of the generator keyed by `seed`, so per-sample randomness in
//! batch runs does not depend on scheduling.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::density::DensityMatrix;
use super::ensemble::EnsembleRotation;
use super::pure::PureState;
use super::subsystems::validate_dims;
use crate::error::{Error, Result};
use crate::numerics::{inner, norm_sqr, ComplexMatrix};

/// Generator for stream `stream` under `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random pure state drawn from `rng`.
pub fn random_pure_with<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Result<PureState> {
    let n = validate_dims(dims)?;
    loop {
        let amps: Vec<Complex64> = (0..n).map(|_| complex_gaussian(rng)).collect();
        if norm_sqr(&amps) > 0.0 {
            return PureState::normalized(dims.to_vec(), amps);
        }
    }
}

/// Haar-random pure state, deterministic in `(dims, seed)`.
pub fn random_pure(dims: &[usize], seed: u64) -> Result<PureState> {
    random_pure_with(dims, &mut stream_rng(seed, 0))
}

/// `GG†/tr(GG†)` for a complex Gaussian `G` with `rank` columns.
pub fn random_density_with<R: Rng + ?Sized>(
    dims: &[usize],
    rank: usize,
    rng: &mut R,
) -> Result<DensityMatrix> {
    let n = validate_dims(dims)?;
    if rank == 0 || rank > n {
        return Err(Error::BadRank { rank, max: n });
    }
    let g = ComplexMatrix::from_vec(n, rank, (0..n * rank).map(|_| complex_gaussian(rng)).collect())?;
    let mut m = g.matmul(&g.adjoint());
    let tr = m.trace().re;
    m = m.scale(1.0 / tr);
    m.hermitize();
    Ok(DensityMatrix::from_trusted(dims.to_vec(), m))
}

pub fn random_density(dims: &[usize], rank: usize, seed: u64) -> Result<DensityMatrix> {
    random_density_with(dims, rank, &mut stream_rng(seed, 0))
}

/// Haar-random `n × n` unitary: Gram-Schmidt on Gaussian columns.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<Complex64> = (0..n).map(|_| complex_gaussian(rng)).collect();
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for c in &cols {
                let proj = inner(c, &v);
                for (x, y) in v.iter_mut().zip(c) {
                    *x -= proj * y;
                }
            }
        }
        let nrm = norm_sqr(&v).sqrt();
        if nrm < 1e-8 {
            continue;
        }
        cols.push(v.into_iter().map(|z| z / nrm).collect());
    }
    ComplexMatrix::from_columns(&cols).expect("equal column lengths")
}

/// First `r` columns of a Haar `m × m` unitary.
pub fn random_rotation<R: Rng + ?Sized>(m: usize, r: usize, rng: &mut R) -> EnsembleRotation {
    assert!(r <= m, "rotation needs m >= r");
    let u = haar_unitary(m, rng);
    let mut c = ComplexMatrix::zeros(m, r);
    for i in 0..m {
        for j in 0..r {
            c[(i, j)] = u[(i, j)];
        }
    }
    EnsembleRotation::from_trusted(c)
}
