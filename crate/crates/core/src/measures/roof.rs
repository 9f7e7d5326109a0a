//! Convex-roof evaluation of concurrence (minimum) and concurrence of assistance
//! (maximum) for `2 ⊗ d` mixed states.
//!
//! Decompositions are parametrized by a left-orthonormal `m × r` matrix `U`
//! acting on the spectral ensemble: `|φ̃_k⟩ = Σ_i U[k,i] √λ_i |e_i⟩`. The objective
//! `Σ_k 2√det tr_C |φ̃_k⟩⟨φ̃_k|` equals the ensemble average concurrence, since the
//! determinant is degree-2 homogeneous.
//!
//! Each sweep visits every member pair `(k, l)` and applies the 2×2 unitary
//! `[[cos θ, e^{iα} sin θ], [−e^{−iα} sin θ, cos θ]]` to rows `k, l` that best
//! improves the objective. Row phases do not change the objective, so these two
//! parameters cover every pair rotation. The pair search is a coarse grid
//! followed by alternating golden-section refinement in `θ` and `α`; a rotation
//! is applied only if it strictly improves, so sweeps are monotone.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::concurrence::weighted_qubit_concurrence;
use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, ZERO};
use crate::states::random::{random_rotation, stream_rng};
use crate::states::{spectral_ensemble, DensityMatrix, EnsembleRotation, PureEnsemble};

/// Eigenvalues at or below this do not count toward the rank.
pub const ROOF_RANK_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RoofMode {
    Minimize,
    Maximize,
}

impl RoofMode {
    fn sign(self) -> f64 {
        match self {
            RoofMode::Minimize => -1.0,
            RoofMode::Maximize => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoofConfig {
    pub mode: RoofMode,
    /// Ensemble size `m`; `None` picks `max(r, min(4, r²))` for rank `r`.
    pub ensemble_size: Option<usize>,
    pub restarts: usize,
    pub max_sweeps: usize,
    pub objective_tol: f64,
    pub seed: u64,
}

impl RoofConfig {
    pub fn new(mode: RoofMode) -> Self {
        Self {
            mode,
            ensemble_size: None,
            restarts: 32,
            max_sweeps: 200,
            objective_tol: 1e-12,
            seed: 42,
        }
    }

    pub fn maximize() -> Self {
        Self::new(RoofMode::Maximize)
    }

    pub fn minimize() -> Self {
        Self::new(RoofMode::Minimize)
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_max_sweeps(mut self, max_sweeps: usize) -> Self {
        self.max_sweeps = max_sweeps;
        self
    }

    pub fn with_ensemble_size(mut self, m: usize) -> Self {
        self.ensemble_size = Some(m);
        self
    }

    pub fn with_mode(mut self, mode: RoofMode) -> Self {
        self.mode = mode;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.objective_tol > 0.0) {
            return Err(Error::InvalidConfig("objective_tol must be positive".into()));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidConfig("restarts must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoofResult {
    /// `Σ p_k C(φ_k)` over `ensemble`.
    pub value: f64,
    pub ensemble: PureEnsemble,
    pub rotation: EnsembleRotation,
    /// The final sweep improved by less than `objective_tol`.
    pub converged: bool,
    pub sweeps_used: usize,
    /// Index of the winning restart.
    pub restart: usize,
}

/// Best-found convex-roof value of the concurrence over decompositions of `rho`.
pub fn convex_roof(rho: &DensityMatrix, config: &RoofConfig) -> Result<RoofResult> {
    if rho.dims().len() != 2 || rho.dims()[0] != 2 {
        return Err(Error::WrongDims {
            expected: "[2, d]",
            got: rho.dims().to_vec(),
        });
    }
    config.validate()?;
    let spectral = spectral_ensemble(rho, ROOF_RANK_TOL)?;
    let rank = spectral.len();
    let m = config
        .ensemble_size
        .unwrap_or_else(|| rank.max((rank * rank).min(4)));
    if m < rank {
        return Err(Error::RankExceedsEnsembleSize {
            rank,
            ensemble_size: m,
        });
    }
    let base = spectral.scaled_vectors();

    let runs: Vec<Run> = (0..config.restarts)
        .into_par_iter()
        .map(|restart| {
            let start = if restart == 0 {
                let mut c = ComplexMatrix::zeros(m, rank);
                for i in 0..rank {
                    c[(i, i)] = Complex64::new(1.0, 0.0);
                }
                c
            } else {
                let mut rng = stream_rng(config.seed, restart as u64);
                random_rotation(m, rank, &mut rng).coeffs().clone()
            };
            Run::optimize(&base, start, config)
        })
        .collect();

    let sign = config.mode.sign();
    let (restart, best) = runs
        .into_iter()
        .enumerate()
        .reduce(|best, cand| {
            if sign * cand.1.value > sign * best.1.value {
                cand
            } else {
                best
            }
        })
        .expect("at least one restart");

    let ensemble = PureEnsemble::from_unnormalized(rho.dims(), best.vectors);
    let value = ensemble
        .members()
        .iter()
        .map(|(p, s)| p * weighted_qubit_concurrence(s.amps()))
        .sum();
    Ok(RoofResult {
        value,
        ensemble,
        rotation: EnsembleRotation::from_trusted(best.coeffs),
        converged: best.converged,
        sweeps_used: best.sweeps,
        restart,
    })
}

struct Run {
    vectors: Vec<Vec<Complex64>>,
    coeffs: ComplexMatrix,
    value: f64,
    converged: bool,
    sweeps: usize,
}

impl Run {
    fn optimize(base: &[Vec<Complex64>], coeffs: ComplexMatrix, config: &RoofConfig) -> Run {
        let m = coeffs.rows();
        let n = base[0].len();
        let mut vectors: Vec<Vec<Complex64>> = (0..m)
            .map(|k| {
                let mut v = vec![ZERO; n];
                for (i, b) in base.iter().enumerate() {
                    let c = coeffs[(k, i)];
                    for (dst, z) in v.iter_mut().zip(b) {
                        *dst += c * z;
                    }
                }
                v
            })
            .collect();
        let mut coeffs = coeffs;
        let sign = config.mode.sign();
        let mut converged = m < 2;
        let mut sweeps = 0;

        if m >= 2 {
            let stages: &[f64] = match config.mode {
                RoofMode::Maximize => &[0.0],
                RoofMode::Minimize => &SMOOTHING,
            };
            for &eps in stages {
                let eps2 = eps * eps;
                let mut value = smoothed_total(&vectors, eps2);
                converged = false;
                for _ in 0..config.max_sweeps {
                    sweeps += 1;
                    for k in 0..m {
                        for l in k + 1..m {
                            let pair = PairObjective::new(&vectors[k], &vectors[l], eps2);
                            if let Some((c, w)) = pair.best_rotation(sign) {
                                rotate_rows(&mut vectors, k, l, c, w);
                                rotate_matrix_rows(&mut coeffs, k, l, c, w);
                            }
                        }
                    }
                    let next = smoothed_total(&vectors, eps2);
                    let gain = sign * (next - value);
                    value = next;
                    if gain < config.objective_tol {
                        converged = true;
                        break;
                    }
                }
            }
        }
        let value = total(&vectors);
        Run {
            vectors,
            coeffs,
            value,
            converged,
            sweeps,
        }
    }
}

fn total(vectors: &[Vec<Complex64>]) -> f64 {
    vectors.iter().map(|v| weighted_qubit_concurrence(v)).sum()
}

/// `Σ_k 2√(det_k + ε²)`; equals [`total`] at `ε = 0`.
fn smoothed_total(vectors: &[Vec<Complex64>], eps2: f64) -> f64 {
    if eps2 == 0.0 {
        return total(vectors);
    }
    vectors
        .iter()
        .map(|v| {
            let c = weighted_qubit_concurrence(v);
            (c * c + 4.0 * eps2).sqrt()
        })
        .sum()
}

/// Rows `k, l` ← `[[c, w], [−w̄, c]]` applied to them.
fn rotate_rows(vectors: &mut [Vec<Complex64>], k: usize, l: usize, c: f64, w: Complex64) {
    let (left, right) = vectors.split_at_mut(l);
    for (a, b) in left[k].iter_mut().zip(right[0].iter_mut()) {
        let (x, y) = (*a, *b);
        *a = x * c + w * y;
        *b = -w.conj() * x + y * c;
    }
}

fn rotate_matrix_rows(m: &mut ComplexMatrix, k: usize, l: usize, c: f64, w: Complex64) {
    for j in 0..m.cols() {
        let (x, y) = (m[(k, j)], m[(l, j)]);
        m[(k, j)] = x * c + w * y;
        m[(l, j)] = -w.conj() * x + y * c;
    }
}

const GRID_THETA: usize = 4;
const GRID_ALPHA: usize = 4;
const GOLDEN_ITERS: usize = 28;
const REFINE_ROUNDS: usize = 2;

/// Minimization smooths `√det` to `√(det + ε²)` with shrinking `ε`: the
/// unsmoothed objective has kinks at product members, where pair moves stall.
const SMOOTHING: [f64; 6] = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 0.0];

/// Objective of a member pair as a function of the pair rotation.
///
/// For `v = p·a + q·b`, each 2×2 minor of the `2 × d` reshaping of `v` is
/// `p²·A_ij + pq·X_ij + q²·B_ij`, so the pair objective is evaluated from
/// precomputed minors without cancellation near product members.
struct PairObjective {
    aa: Vec<Complex64>,
    ab: Vec<Complex64>,
    bb: Vec<Complex64>,
    eps2: f64,
}

impl PairObjective {
    fn new(a: &[Complex64], b: &[Complex64], eps2: f64) -> Self {
        let d = a.len() / 2;
        let (a0, a1) = a.split_at(d);
        let (b0, b1) = b.split_at(d);
        let cap = d * (d - 1) / 2;
        let (mut aa, mut ab, mut bb) = (
            Vec::with_capacity(cap),
            Vec::with_capacity(cap),
            Vec::with_capacity(cap),
        );
        for i in 0..d {
            for j in i + 1..d {
                aa.push(a0[i] * a1[j] - a0[j] * a1[i]);
                bb.push(b0[i] * b1[j] - b0[j] * b1[i]);
                ab.push(a0[i] * b1[j] - a0[j] * b1[i] + b0[i] * a1[j] - b0[j] * a1[i]);
            }
        }
        Self { aa, ab, bb, eps2 }
    }

    /// `2√(det tr_C + ε²)` of `p·a + q·b`.
    #[inline]
    fn member(&self, p: Complex64, q: Complex64) -> f64 {
        let (pp, pq, qq) = (p * p, p * q, q * q);
        let s: f64 = self
            .aa
            .iter()
            .zip(&self.ab)
            .zip(&self.bb)
            .map(|((x, y), z)| (pp * x + pq * y + qq * z).norm_sqr())
            .sum();
        2.0 * (s + self.eps2).sqrt()
    }

    #[inline]
    fn value(&self, theta: f64, alpha: f64) -> f64 {
        let (s, c) = theta.sin_cos();
        let w = Complex64::from_polar(s, alpha);
        let cc = Complex64::new(c, 0.0);
        self.member(cc, w) + self.member(-w.conj(), cc)
    }

    /// Best improving rotation `(cos θ, e^{iα} sin θ)`, if any.
    fn best_rotation(&self, sign: f64) -> Option<(f64, Complex64)> {
        if self.aa.is_empty() {
            return None;
        }
        let f = |t: f64, a: f64| sign * self.value(t, a);
        let current = f(0.0, 0.0);
        let (mut bt, mut ba, mut bv) = (0.0, 0.0, current);
        for i in 0..GRID_THETA {
            let t = (i as f64 + 0.5) * FRAC_PI_2 / GRID_THETA as f64;
            for j in 0..GRID_ALPHA {
                let a = j as f64 * 2.0 * PI / GRID_ALPHA as f64;
                let v = f(t, a);
                if v > bv {
                    (bt, ba, bv) = (t, a, v);
                }
            }
        }
        let mut half_t = FRAC_PI_2 / GRID_THETA as f64;
        let mut half_a = PI / GRID_ALPHA as f64;
        for _ in 0..REFINE_ROUNDS {
            let (t, v) = golden_max(|t| f(t, ba), bt - half_t, bt + half_t);
            if v > bv {
                (bt, bv) = (t, v);
            }
            let (a, v) = golden_max(|a| f(bt, a), ba - half_a, ba + half_a);
            if v > bv {
                (ba, bv) = (a, v);
            }
            half_t *= 0.25;
            half_a *= 0.25;
        }
        if bv > current {
            let (s, c) = bt.sin_cos();
            Some((c, Complex64::from_polar(s, ba)))
        } else {
            None
        }
    }
}

/// Golden-section search for a maximum on `[lo, hi]`.
fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..GOLDEN_ITERS {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}
