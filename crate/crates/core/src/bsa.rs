//! Best separable approximation of two-qubit states: `ρ = λ ρ_s + (1 − λ) |e⟩⟨e|`
//! with `ρ_s` separable (PPT), `|e⟩` entangled and `λ` as large as possible.
//!
//! For a candidate `|e⟩` the weight `t = 1 − λ` must satisfy two conditions:
//! `ρ − tE ⪰ 0`, which needs `|e⟩` in the range of ρ and `t ≤ 1/⟨e|ρ⁺|e⟩`; and
//! `ρ^Γ − tE^Γ ⪰ 0`. The smallest eigenvalue of the latter is concave in `t`,
//! so the feasible `t` form an interval. For a given `|e⟩` we find the interval's
//! lower end and then minimize it over `|e⟩` with multi-start Nelder-Mead.

use argmin::core::{CostFunction, Executor, State, TerminationReason};
use argmin::solver::neldermead::NelderMead;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{concurrence_2qubit, qubit_row_concurrence};
use crate::monogamy::require_tripartite;
use crate::numerics::{hermitian_eig, norm_sqr, ComplexMatrix, ZERO};
use crate::states::random::{complex_gaussian, stream_rng};
use crate::states::{DensityMatrix, PureState};

/// Eigenvalue floor for PSD, trace and PPT checks on a candidate ρ_s.
pub const FEASIBILITY_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-9;
/// Eigenvalues of ρ above this span the search space for `|e⟩`.
const RANGE_TOL: f64 = 1e-12;
/// Step above the returned λ at which the local-maximality probe runs.
pub const CERTIFICATE_STEP: f64 = 1e-4;
pub const CERTIFICATE_STARTS: usize = 64;

const EIG_TOL: f64 = 1e-9;
const NM_ITERS: u64 = 1500;
const NM_SD_TOL: f64 = 1e-15;
const PROBE_ITERS: u64 = 300;
const PROBE_SD_TOL: f64 = 1e-12;
const T_RESOLUTION: f64 = 1e-14;
/// Extra batches of random starts tried when no start finds a feasible `|e⟩`.
const SEARCH_BATCHES: usize = 8;
/// Stream offset separating certificate starts from search starts.
const CERT_STREAM: u64 = 1 << 32;

/// Outcome of the local-maximality probe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BsaCertificate {
    /// The λ′ probed, or `None` when λ is already 1.
    pub probe_lambda: Option<f64>,
    pub starts: usize,
    /// Largest `min(λ_min(ρ − (1−λ′)E), λ_min((ρ − (1−λ′)E)^Γ))` found.
    pub best_score: f64,
    /// No start produced a feasible pair at λ′.
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BsaDecomposition {
    pub lambda: f64,
    pub rho_s: DensityMatrix,
    /// Absent when ρ is separable.
    pub p_e: Option<PureState>,
    /// `‖ρ − λρ_s − (1−λ)|e⟩⟨e|‖_max`.
    pub residual_norm: f64,
    /// The best Nelder-Mead run stopped on its simplex tolerance.
    pub converged: bool,
    pub certificate: BsaCertificate,
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

/// Partial transpose on the second qubit of a 4×4 matrix.
fn pt2(m: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(4, 4);
    for ia in 0..2 {
        for ib in 0..2 {
            for ja in 0..2 {
                for jb in 0..2 {
                    out[(2 * ia + ib, 2 * ja + jb)] = m[(2 * ia + jb, 2 * ja + ib)];
                }
            }
        }
    }
    out
}

fn min_eig(m: &ComplexMatrix) -> f64 {
    hermitian_eig(m, EIG_TOL)
        .map(|e| e.min_eigenvalue())
        .unwrap_or(f64::NEG_INFINITY)
}

/// Is `(ρ − (1−λ)|e⟩⟨e|)/λ` a separable state?
pub fn bsa_feasible(rho: &DensityMatrix, lambda: f64, e: &PureState) -> Result<bool> {
    require_two_qubits(rho)?;
    if e.dims() != [2, 2] {
        return Err(Error::WrongDims {
            expected: "[2, 2]",
            got: e.dims().to_vec(),
        });
    }
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::InvalidConfig(format!("lambda = {lambda} outside (0, 1]")));
    }
    let big_e = ComplexMatrix::outer(e.amps(), e.amps());
    let mut s = (rho.matrix() - &big_e.scale(1.0 - lambda)).scale(1.0 / lambda);
    s.hermitize();
    Ok((s.trace().re - 1.0).abs() <= TRACE_TOL
        && min_eig(&s) >= -FEASIBILITY_TOL
        && min_eig(&pt2(&s)) >= -FEASIBILITY_TOL)
}

/// The pencil `ρ^Γ − tE^Γ` for a fixed `|e⟩`.
struct Pencil {
    a: ComplexMatrix,
    b: ComplexMatrix,
}

impl Pencil {
    /// Smallest eigenvalue at `t` and its derivative in `t`.
    fn eval(&self, t: f64) -> (f64, f64) {
        let m = &self.a - &self.b.scale(t);
        match hermitian_eig(&m, EIG_TOL) {
            Ok(eig) => {
                let v = eig.eigenvector(0);
                let bv = self.b.matvec(&v);
                let slope = -crate::numerics::inner(&v, &bv).re;
                (eig.min_eigenvalue(), slope)
            }
            Err(_) => (f64::NEG_INFINITY, 0.0),
        }
    }

    /// Smallest `t ∈ [0, t_max]` where the pencil is PSD, or the shortfall
    /// `−max g` if there is none.
    fn lowest_feasible(&self, t_max: f64) -> std::result::Result<f64, f64> {
        let (g0, _) = self.eval(0.0);
        if g0 >= 0.0 {
            return Ok(0.0);
        }
        // g is concave: walk toward its peak until it turns non-negative
        let (mut lo, mut hi) = (0.0, t_max);
        let (g_hi, _) = self.eval(hi);
        let mut best = g0.max(g_hi);
        let mut feasible = (g_hi >= 0.0).then_some(hi);
        while feasible.is_none() && hi - lo > T_RESOLUTION {
            let mid = 0.5 * (lo + hi);
            let (g, slope) = self.eval(mid);
            best = best.max(g);
            if g >= 0.0 {
                feasible = Some(mid);
            } else if slope > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let Some(mut b) = feasible else {
            return Err(-best);
        };
        // g(0) < 0 ≤ g(b): bisect, keeping the feasible end
        let mut a = 0.0;
        while b - a > T_RESOLUTION {
            let mid = 0.5 * (a + b);
            if self.eval(mid).0 >= 0.0 {
                b = mid;
            } else {
                a = mid;
            }
        }
        Ok(b)
    }
}

/// Search space: `|e⟩ = Σ c_i |v_i⟩` over the range eigenvectors of ρ.
struct Search {
    rho_pt: ComplexMatrix,
    range: Vec<Vec<Complex64>>,
    inv_eigs: Vec<f64>,
    eigs: Vec<f64>,
}

impl Search {
    fn new(rho: &DensityMatrix) -> Result<Self> {
        let eig = hermitian_eig(rho.matrix(), EIG_TOL)?;
        let mut range = Vec::new();
        let mut inv_eigs = Vec::new();
        let mut eigs = Vec::new();
        for j in (0..4).rev() {
            if eig.eigenvalues[j] > RANGE_TOL {
                range.push(eig.eigenvector(j));
                inv_eigs.push(1.0 / eig.eigenvalues[j]);
                eigs.push(eig.eigenvalues[j]);
            }
        }
        Ok(Self {
            rho_pt: pt2(rho.matrix()),
            range,
            inv_eigs,
            eigs,
        })
    }

    fn dim(&self) -> usize {
        2 * self.range.len()
    }

    /// Unit vector and `t_max = 1/⟨e|ρ⁺|e⟩` for real parameters `x`.
    fn vector(&self, x: &[f64]) -> Option<(Vec<Complex64>, f64)> {
        let n2: f64 = x.iter().map(|v| v * v).sum();
        if !(n2 > 1e-24) || !n2.is_finite() {
            return None;
        }
        let mut e = vec![ZERO; 4];
        let mut weighted = 0.0;
        for (i, v) in self.range.iter().enumerate() {
            let c = Complex64::new(x[2 * i], x[2 * i + 1]);
            weighted += c.norm_sqr() * self.inv_eigs[i];
            for (ek, vk) in e.iter_mut().zip(v) {
                *ek += c * vk;
            }
        }
        let s = 1.0 / n2.sqrt();
        e.iter_mut().for_each(|z| *z *= s);
        Some((e, n2 / weighted))
    }

    /// Range coordinates of the vector that most lowers `⟨n|E^Γ|n⟩`, with `|n⟩`
    /// the negative eigenvector of `ρ^Γ`: the direction removing `E` helps most.
    fn negativity_start(&self) -> Vec<f64> {
        let fallback = || {
            let mut x = vec![0.0; self.dim()];
            x[0] = 1.0;
            x
        };
        let Ok(neg) = hermitian_eig(&self.rho_pt, EIG_TOL) else {
            return fallback();
        };
        let n = neg.eigenvector(0);
        let Ok(flip) = hermitian_eig(&pt2(&ComplexMatrix::outer(&n, &n)), EIG_TOL) else {
            return fallback();
        };
        let f = flip.eigenvector(0);
        let x: Vec<f64> = self
            .range
            .iter()
            .flat_map(|v| {
                let c = crate::numerics::inner(v, &f);
                [c.re, c.im]
            })
            .collect();
        if norm_sqr_real(&x) > 1e-12 {
            x
        } else {
            fallback()
        }
    }

    /// `t(e)` if some `t` is feasible, otherwise `1 + shortfall`.
    fn objective(&self, x: &[f64]) -> f64 {
        let Some((e, t_max)) = self.vector(x) else {
            return 2.0;
        };
        let pencil = Pencil {
            a: self.rho_pt.clone(),
            b: pt2(&ComplexMatrix::outer(&e, &e)),
        };
        match pencil.lowest_feasible(t_max.min(1.0)) {
            Ok(t) => t,
            Err(shortfall) => 1.0 + shortfall.min(1.0),
        }
    }
}

struct Objective<'a>(&'a Search);

impl CostFunction for Objective<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, x: &Self::Param) -> std::result::Result<f64, argmin::core::Error> {
        Ok(self.0.objective(x))
    }
}

/// `−min(λ_min(ρ − tE), λ_min((ρ − tE)^Γ))` over unrestricted `|e⟩ ∈ C⁴`.
struct ProbeScore<'a> {
    rho: &'a ComplexMatrix,
    t: f64,
}

impl CostFunction for ProbeScore<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, x: &Self::Param) -> std::result::Result<f64, argmin::core::Error> {
        Ok(-probe_score(self.rho, self.t, &params_to_vec(x)))
    }
}

fn params_to_vec(x: &[f64]) -> Vec<Complex64> {
    let v: Vec<Complex64> = x.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect();
    let n = norm_sqr(&v).sqrt();
    if n > 0.0 {
        v.into_iter().map(|z| z / n).collect()
    } else {
        v
    }
}

fn probe_score(rho: &ComplexMatrix, t: f64, e: &[Complex64]) -> f64 {
    if norm_sqr(e) < 0.5 {
        return -1.0;
    }
    let m = rho - &ComplexMatrix::outer(e, e).scale(t);
    min_eig(&m).min(min_eig(&pt2(&m)))
}

struct NmOutcome {
    x: Vec<f64>,
    cost: f64,
    converged: bool,
}

fn nelder_mead<C>(cost: C, x0: Vec<f64>, step: f64, iters: u64, sd_tol: f64) -> Result<NmOutcome>
where
    C: CostFunction<Param = Vec<f64>, Output = f64>,
{
    let mut simplex = vec![x0.clone()];
    for j in 0..x0.len() {
        let mut v = x0.clone();
        v[j] += step;
        simplex.push(v);
    }
    let solver = NelderMead::new(simplex)
        .with_sd_tolerance(sd_tol)
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let res = Executor::new(cost, solver)
        .configure(|s| s.max_iters(iters))
        .run()
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let state = res.state();
    let converged = matches!(
        state.get_termination_reason(),
        Some(TerminationReason::SolverConverged)
    );
    Ok(NmOutcome {
        x: state.get_best_param().cloned().unwrap_or(x0),
        cost: state.get_best_cost(),
        converged,
    })
}

fn norm_sqr_real(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

fn random_params<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n / 2)
        .flat_map(|_| {
            let z = complex_gaussian(rng);
            [z.re, z.im]
        })
        .collect()
}

/// Lowest cost over the runs, ties to the lowest start index.
fn best_of(runs: Vec<NmOutcome>) -> Option<NmOutcome> {
    runs.into_iter()
        .reduce(|best, r| if r.cost < best.cost { r } else { best })
}

/// Probes `λ + CERTIFICATE_STEP` for a feasible decomposition.
fn certify(rho: &DensityMatrix, lambda: f64, e: &[Complex64], seed: u64) -> Result<BsaCertificate> {
    let probe = lambda + CERTIFICATE_STEP;
    if probe > 1.0 {
        return Ok(BsaCertificate {
            probe_lambda: None,
            starts: 0,
            best_score: f64::NEG_INFINITY,
            certified: true,
        });
    }
    let t = 1.0 - probe;
    let x_best: Vec<f64> = e.iter().flat_map(|z| [z.re, z.im]).collect();
    let runs = (0..CERTIFICATE_STARTS)
        .into_par_iter()
        .map(|k| -> Result<(f64, bool)> {
            let mut x0 = x_best.clone();
            if k > 0 {
                let mut rng = stream_rng(seed, CERT_STREAM + k as u64);
                let scale = 0.02 * k as f64 / CERTIFICATE_STARTS as f64 + 0.01;
                for (xi, di) in x0.iter_mut().zip(random_params(8, &mut rng)) {
                    *xi += scale * di;
                }
            }
            let out = nelder_mead(ProbeScore { rho: rho.matrix(), t }, x0, 0.01, PROBE_ITERS, PROBE_SD_TOL)?;
            let ev = params_to_vec(&out.x);
            let state = PureState::normalized(vec![2, 2], ev)?;
            Ok((-out.cost, bsa_feasible(rho, probe, &state)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BsaCertificate {
        probe_lambda: Some(probe),
        starts: CERTIFICATE_STARTS,
        best_score: runs.iter().map(|r| r.0).fold(f64::NEG_INFINITY, f64::max),
        certified: runs.iter().all(|r| !r.1),
    })
}

fn assemble(
    rho: &DensityMatrix,
    t: f64,
    e: Vec<Complex64>,
    converged: bool,
    seed: u64,
) -> Result<BsaDecomposition> {
    let lambda = 1.0 - t;
    let big_e = ComplexMatrix::outer(&e, &e);
    let mut s = if lambda > 0.0 {
        (rho.matrix() - &big_e.scale(t)).scale(1.0 / lambda)
    } else {
        ComplexMatrix::identity(4).scale(0.25)
    };
    s.hermitize();
    let residual_norm = rho
        .matrix()
        .max_abs_diff(&(&s.scale(lambda) + &big_e.scale(t)));
    let certificate = certify(rho, lambda, &e, seed)?;
    Ok(BsaDecomposition {
        lambda,
        rho_s: DensityMatrix::new(vec![2, 2], s.clone())
            .unwrap_or_else(|_| DensityMatrix::from_trusted(vec![2, 2], s)),
        p_e: Some(PureState::normalized(vec![2, 2], e)?),
        residual_norm,
        converged,
        certificate,
    })
}

/// Decomposes a two-qubit state into its best separable approximation.
///
/// PPT inputs return `λ = 1` and no entangled part; pure entangled inputs
/// return `λ = 0`. Otherwise `restarts` Nelder-Mead runs minimize the
/// entangled weight: the first starts from the dominant eigenvector of ρ, the
/// second from the direction that most reduces the negativity of `ρ^Γ`, and
/// the rest from random vectors drawn from `seed`. If no run finds a feasible
/// `|e⟩`, further batches of random starts are tried. The best run is polished
/// once.
pub fn bsa_decompose(rho: &DensityMatrix, restarts: usize, seed: u64) -> Result<BsaDecomposition> {
    require_two_qubits(rho)?;
    if restarts == 0 {
        return Err(Error::InvalidConfig("bsa needs at least one restart".into()));
    }
    let (ppt, _) = rho.is_ppt(FEASIBILITY_TOL)?;
    if ppt {
        return Ok(BsaDecomposition {
            lambda: 1.0,
            rho_s: rho.clone(),
            p_e: None,
            residual_norm: 0.0,
            converged: true,
            certificate: certify(rho, 1.0, &[ZERO; 4], seed)?,
        });
    }

    let search = Search::new(rho)?;
    if search.range.len() == 1 {
        let e = search.range[0].clone();
        return assemble(rho, 1.0, e, true, seed);
    }
    if search.range.len() == 2 {
        if let Some(dec) = rank_two(rho, &search, seed)? {
            return Ok(dec);
        }
    }

    let n = search.dim();
    let start = |k: usize| match k {
        0 => {
            let mut x = vec![0.0; n];
            x[0] = 1.0;
            x
        }
        1 => search.negativity_start(),
        _ => random_params(n, &mut stream_rng(seed, k as u64)),
    };
    // the feasible set can be thin; widen the search until some start lands in it
    let mut best: Option<NmOutcome> = None;
    let mut done = 0;
    for batch in 0..=SEARCH_BATCHES {
        let upto = if batch == 0 { restarts } else { done + restarts.max(8) };
        let runs = (done..upto)
            .into_par_iter()
            .map(|k| nelder_mead(Objective(&search), start(k), 0.2, NM_ITERS, NM_SD_TOL))
            .collect::<Result<Vec<_>>>()?;
        done = upto;
        best = best_of(best.into_iter().chain(runs).collect());
        if best.as_ref().is_some_and(|b| b.cost <= 1.0) {
            break;
        }
    }
    let best = best.expect("at least one restart");
    let polished = nelder_mead(Objective(&search), best.x.clone(), 0.01, NM_ITERS, NM_SD_TOL)?;
    let best = if polished.cost <= best.cost { polished } else { best };
    if best.cost > 1.0 {
        // no feasible vector found: nothing better than the trivial split
        let e = search.range[0].clone();
        return assemble(rho, 1.0, e, false, seed);
    }
    let (e, _) = search.vector(&best.x).expect("finite optimum");
    assemble(rho, best.cost, e, best.converged, seed)
}

/// Product vectors in `span{v1, v2}`, as coordinates `(x, y)` of `x·v1 + y·v2`.
///
/// Reshaping a two-qubit vector to a 2×2 matrix, product vectors are those
/// with zero determinant, a quadratic form in `(x, y)`.
fn product_vectors_in_span(v1: &[Complex64], v2: &[Complex64]) -> Vec<[Complex64; 2]> {
    let det = |a: &[Complex64]| a[0] * a[3] - a[1] * a[2];
    let d1 = det(v1);
    let d2 = det(v2);
    let cross = v1[0] * v2[3] + v1[3] * v2[0] - v1[1] * v2[2] - v1[2] * v2[1];
    let one = Complex64::new(1.0, 0.0);
    let scale = d1.norm().max(d2.norm()).max(cross.norm());
    if scale < 1e-300 {
        return Vec::new();
    }
    // d1 + z·cross + z²·d2 = 0 with v = v1 + z·v2; z = ∞ means v = v2.
    let mut out = Vec::new();
    if d2.norm() <= 1e-14 * scale {
        out.push([ZERO, one]);
        if cross.norm() > 1e-14 * scale {
            out.push([one, -d1 / cross]);
        }
    } else {
        let disc = (cross * cross - d1 * d2 * 4.0).sqrt();
        for root in [(-cross + disc) / (d2 * 2.0), (-cross - disc) / (d2 * 2.0)] {
            out.push([one, root]);
        }
    }
    out
}

/// Exact decomposition for rank-2 inputs.
///
/// A separable part supported on the 2-dimensional range of ρ is a mixture
/// `p|a⟩⟨a| + q|b⟩⟨b|` of the (generically two) product vectors in that range.
/// With `α, β` their whitened coordinates and `H` their Gram matrix,
/// `ρ − p|a⟩⟨a| − q|b⟩⟨b| ⪰ 0` reads `diag(1/p, 1/q) ⪰ H`, and `p + q` is
/// maximized in closed form along the boundary.
fn rank_two(rho: &DensityMatrix, search: &Search, seed: u64) -> Result<Option<BsaDecomposition>> {
    let (v1, v2) = (&search.range[0], &search.range[1]);
    let mut prods: Vec<Vec<Complex64>> = Vec::new();
    for [x, y] in product_vectors_in_span(v1, v2) {
        let v: Vec<Complex64> = v1.iter().zip(v2).map(|(a, b)| x * a + y * b).collect();
        let n = norm_sqr(&v).sqrt();
        let v: Vec<Complex64> = v.into_iter().map(|z| z / n).collect();
        // skip a repeated root
        if prods.iter().all(|p| crate::numerics::inner(p, &v).norm() < 1.0 - 1e-12) {
            prods.push(v);
        }
    }
    if prods.is_empty() {
        return Ok(None);
    }
    // whitened coordinates ρ_V^{-1/2}·(⟨v_i|a⟩)
    let whiten = |a: &[Complex64]| -> [Complex64; 2] {
        [
            crate::numerics::inner(v1, a) / search.eigs[0].sqrt(),
            crate::numerics::inner(v2, a) / search.eigs[1].sqrt(),
        ]
    };
    let w: Vec<[Complex64; 2]> = prods.iter().map(|a| whiten(a)).collect();
    let h11 = w[0][0].norm_sqr() + w[0][1].norm_sqr();
    let mut candidates = vec![(1.0 / h11, 0.0)];
    if let Some(wb) = w.get(1) {
        let h22 = wb[0].norm_sqr() + wb[1].norm_sqr();
        let c = (w[0][0].conj() * wb[0] + w[0][1].conj() * wb[1]).norm_sqr();
        let rc = c.sqrt();
        candidates.push((0.0, 1.0 / h22));
        if c == 0.0 {
            candidates.push((1.0 / h11, 1.0 / h22));
        } else if h11 > rc && h22 > rc {
            let u = rc * (h11 - rc) / (h22 - rc);
            candidates.push((1.0 / (h11 + u), u / (h22 * u + c)));
        }
    }
    let (p, q) = candidates
        .into_iter()
        .fold((0.0, 0.0), |best, cand| if cand.0 + cand.1 > best.0 + best.1 { cand } else { best });
    let mut sep = ComplexMatrix::outer(&prods[0], &prods[0]).scale(p);
    if q > 0.0 {
        sep = &sep + &ComplexMatrix::outer(&prods[1], &prods[1]).scale(q);
    }
    let mut remainder = rho.matrix() - &sep;
    remainder.hermitize();
    let eig = hermitian_eig(&remainder, EIG_TOL)?;
    let e = eig.eigenvector(3);
    let t = 1.0 - (p + q);
    let lambda = p + q;
    let big_e = ComplexMatrix::outer(&e, &e);
    let mut rho_s = sep.scale(1.0 / lambda);
    rho_s.hermitize();
    let residual_norm = rho
        .matrix()
        .max_abs_diff(&(&rho_s.scale(lambda) + &big_e.scale(t)));
    let certificate = certify(rho, lambda, &e, seed)?;
    Ok(Some(BsaDecomposition {
        lambda,
        rho_s: DensityMatrix::new(vec![2, 2], rho_s.clone())
            .unwrap_or_else(|_| DensityMatrix::from_trusted(vec![2, 2], rho_s)),
        p_e: Some(PureState::normalized(vec![2, 2], e)?),
        residual_norm,
        converged: true,
        certificate,
    }))
}

/// Werner state `x|Ψ⁻⟩⟨Ψ⁻| + (1 − x) I/4` with singlet fidelity `F = (3x + 1)/4`.
pub fn werner_state(fidelity: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&fidelity) {
        return Err(Error::InvalidConfig(format!("Werner fidelity {fidelity} outside [0, 1]")));
    }
    let x = (4.0 * fidelity - 1.0) / 3.0;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let singlet = [ZERO, Complex64::new(h, 0.0), Complex64::new(-h, 0.0), ZERO];
    let mut m = &ComplexMatrix::outer(&singlet, &singlet).scale(x)
        + &ComplexMatrix::identity(4).scale((1.0 - x) / 4.0);
    m.hermitize();
    DensityMatrix::new(vec![2, 2], m)
}

/// Separable weight of the Werner state with singlet fidelity `F > 1/2`.
pub fn werner_lambda(fidelity: f64) -> f64 {
    if fidelity <= 0.5 {
        1.0
    } else {
        2.0 * (1.0 - fidelity)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LsStep {
    pub c_a_bc: f64,
    pub c_ab: f64,
    /// `|C_A(BC) − C_AB| ≤ tol` with `C_AB > tol`.
    pub premise_met: bool,
    pub lambda: Option<f64>,
    /// `λ ≤ 10·tol` when the premise holds; vacuously true otherwise.
    pub consistent: bool,
}

/// When `C_A(BC) = C_AB > 0`, every decomposition of ρ_AB has the same average
/// concurrence, which forces ρ_AB to have no separable part. Checks `λ ≈ 0`.
pub fn theorem1_ls_step(psi: &PureState, tol: f64, restarts: usize, seed: u64) -> Result<LsStep> {
    require_tripartite(psi)?;
    let c_a_bc = qubit_row_concurrence(&psi.factor(&[0])?);
    let rho_ab = psi.reduced(&[0, 1])?;
    let c_ab = concurrence_2qubit(&rho_ab)?;
    let premise_met = (c_a_bc - c_ab).abs() <= tol && c_ab > tol;
    if !premise_met {
        return Ok(LsStep {
            c_a_bc,
            c_ab,
            premise_met,
            lambda: None,
            consistent: true,
        });
    }
    let dec = bsa_decompose(&rho_ab, restarts, seed)?;
    Ok(LsStep {
        c_a_bc,
        c_ab,
        premise_met,
        lambda: Some(dec.lambda),
        consistent: dec.lambda <= 10.0 * tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::random::random_density_with;

    fn bell() -> PureState {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        PureState::new(
            vec![2, 2],
            vec![Complex64::new(h, 0.0), ZERO, ZERO, Complex64::new(h, 0.0)],
        )
        .unwrap()
    }

    fn singlet() -> PureState {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        PureState::new(
            vec![2, 2],
            vec![ZERO, Complex64::new(h, 0.0), Complex64::new(-h, 0.0), ZERO],
        )
        .unwrap()
    }

    #[test]
    fn feasibility_examples() {
        let mixed = DensityMatrix::maximally_mixed(vec![2, 2]).unwrap();
        assert!(bsa_feasible(&mixed, 1.0, &bell()).unwrap());
        assert!(!bsa_feasible(&bell().density(), 1.0, &bell()).unwrap());
        let w = werner_state(0.75).unwrap();
        assert!(bsa_feasible(&w, 0.5, &singlet()).unwrap());
        assert!(!bsa_feasible(&w, 0.6, &singlet()).unwrap());
        assert!(bsa_feasible(&w, 0.0, &singlet()).is_err());
        assert!(matches!(
            bsa_feasible(&DensityMatrix::maximally_mixed(vec![2]).unwrap(), 1.0, &bell()),
            Err(Error::WrongDims { .. })
        ));
    }

    #[test]
    fn degenerate_inputs() {
        let mixed = DensityMatrix::maximally_mixed(vec![2, 2]).unwrap();
        let d = bsa_decompose(&mixed, 4, 1).unwrap();
        assert_eq!(d.lambda, 1.0);
        assert!(d.p_e.is_none() && d.certificate.certified);

        let d = bsa_decompose(&bell().density(), 4, 1).unwrap();
        assert_eq!(d.lambda, 0.0);
        assert!(d.p_e.unwrap().inner(&bell()).norm() > 1.0 - 1e-12);
        assert!(d.residual_norm < 1e-12);
        assert!(d.certificate.certified);
    }

    #[test]
    fn werner_weight() {
        let d = bsa_decompose(&werner_state(0.75).unwrap(), 16, 3).unwrap();
        assert!((d.lambda - 0.5).abs() < 1e-6, "{}", d.lambda);
        assert!(d.p_e.unwrap().inner(&singlet()).norm() > 1.0 - 1e-6);
        assert!(d.certificate.certified && d.residual_norm < 1e-12);
        assert_eq!(bsa_decompose(&werner_state(0.5).unwrap(), 4, 3).unwrap().lambda, 1.0);
    }

    #[test]
    fn random_decomposition_is_valid() {
        let mut rng = stream_rng(8, 0);
        for rank in 1..=4 {
            let rho = random_density_with(&[2, 2], rank, &mut rng).unwrap();
            let d = bsa_decompose(&rho, 8, 5).unwrap();
            assert!(d.residual_norm < 1e-8);
            assert!(d.rho_s.is_ppt(1e-9).unwrap().0);
            if d.lambda < 1.0 - 1e-8 {
                let pe = d.p_e.unwrap();
                assert!(concurrence_2qubit(&pe.density()).unwrap() > 0.0);
            }
        }
    }

    #[test]
    fn ls_step() {
        let bell_c = PureState::new(vec![2, 2, 1], bell().into_amps()).unwrap();
        let zero = PureState::basis(vec![2], &[0]).unwrap();
        let psi = PureState::new(vec![2, 2, 2], bell().tensor(&zero).into_amps()).unwrap();
        for s in [bell_c, psi] {
            let step = theorem1_ls_step(&s, 1e-6, 4, 0).unwrap();
            assert!(step.premise_met && step.consistent);
            assert_eq!(step.lambda, Some(0.0));
        }
        let step = theorem1_ls_step(&crate::monogamy::build_example_state(), 1e-6, 4, 0).unwrap();
        assert!(!step.premise_met && step.lambda.is_none());
    }
}
