//! Randomized property batteries for the two product-form / equal-marginal
//! theorems, shared by the CLI and the acceptance tests.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::theorem1::check_theorem1;
use super::theorem2::{build_equal_marginal_state, verify_theorem2, EqualMarginalSpec};
use crate::error::{Error, Result};
use crate::io::StateFile;
use crate::measures::RoofConfig;
use crate::states::random::{random_pure_with, stream_rng};
use crate::states::PureState;

/// Bound on `C^a_AC` for product-form states.
pub const PRODUCT_ASSIST_TOL: f64 = 1e-7;
/// Bound on `|C_A(BC) − C_AB|` for product-form states.
pub const PRODUCT_GAP_TOL: f64 = 1e-9;
/// Generic states qualify when the roof finds `C^a_AC` at least this large ...
pub const GENERIC_ASSIST_MIN: f64 = 0.1;
/// ... and must then have `C_A(BC) − C_AB` at least this large.
pub const GENERIC_GAP_MIN: f64 = 1e-4;

/// Streams for the generic family start here so they never overlap the
/// product family under the same seed.
const GENERIC_STREAM_OFFSET: u64 = 1 << 40;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatteryFailure {
    pub family: String,
    pub index: usize,
    pub reason: String,
    pub state: StateFile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Battery {
    pub d: usize,
    pub seed: u64,
    pub product_samples: usize,
    /// Generic samples with `C^a_AC ≥ GENERIC_ASSIST_MIN`.
    pub generic_samples: usize,
    /// Generic draws skipped because the roof value was below the cutoff.
    pub generic_skipped: usize,
    pub max_product_assist: f64,
    pub max_product_gap: f64,
    pub min_generic_gap: f64,
    pub failures: Vec<BatteryFailure>,
}

fn random_product(d: usize, k: usize, seed: u64) -> Result<PureState> {
    let mut rng = stream_rng(seed, k as u64);
    if k % 2 == 0 {
        let a = random_pure_with(&[2], &mut rng)?;
        let bc = random_pure_with(&[2, d], &mut rng)?;
        let s = a.tensor(&bc);
        PureState::new(vec![2, 2, d], s.into_amps())
    } else {
        let ab = random_pure_with(&[2, 2], &mut rng)?;
        let c = random_pure_with(&[d], &mut rng)?;
        let s = ab.tensor(&c);
        PureState::new(vec![2, 2, d], s.into_amps())
    }
}

fn failure(family: &str, index: usize, reason: String, psi: &PureState) -> BatteryFailure {
    BatteryFailure {
        family: family.into(),
        index,
        reason,
        state: StateFile::from(psi),
    }
}

/// Product family (even indices factor out A, odd ones factor out C) must
/// satisfy all three predicates; generic Haar states with a sizeable
/// `C^a_AC` must have `C_A(BC) − C_AB ≥ GENERIC_GAP_MIN`.
pub fn theorem1_battery(
    d: usize,
    samples: usize,
    seed: u64,
    roof: &RoofConfig,
    tol: f64,
) -> Result<Theorem1Battery> {
    if d < 2 || samples == 0 {
        return Err(Error::InvalidConfig(format!(
            "battery needs d >= 2 and samples >= 1 (got d = {d}, samples = {samples})"
        )));
    }
    let product = (0..samples)
        .into_par_iter()
        .map(|k| -> Result<_> {
            let psi = random_product(d, k, seed)?;
            let v = check_theorem1(&psi, roof, tol)?;
            let gap = (v.c_a_bc - v.c_ab).abs();
            let mut reasons = Vec::new();
            if !(v.product && v.no_assistance && v.equal_concurrence) {
                reasons.push(format!(
                    "predicates (i, ii, iii) = ({}, {}, {})",
                    v.product, v.no_assistance, v.equal_concurrence
                ));
            }
            if v.c_ac_assist > PRODUCT_ASSIST_TOL {
                reasons.push(format!("C^a_AC = {:e}", v.c_ac_assist));
            }
            if gap > PRODUCT_GAP_TOL {
                reasons.push(format!("|C_A(BC) - C_AB| = {gap:e}"));
            }
            let fail = (!reasons.is_empty()).then(|| failure("product", k, reasons.join("; "), &psi));
            Ok((v.c_ac_assist, gap, fail))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut out = Theorem1Battery {
        d,
        seed,
        product_samples: samples,
        generic_samples: 0,
        generic_skipped: 0,
        max_product_assist: product.iter().map(|p| p.0).fold(0.0, f64::max),
        max_product_gap: product.iter().map(|p| p.1).fold(0.0, f64::max),
        min_generic_gap: f64::INFINITY,
        failures: product.into_iter().filter_map(|p| p.2).collect(),
    };

    // Draw generic states in blocks until `samples` of them qualify.
    let max_draws = 20 * samples;
    let mut next = 0;
    while out.generic_samples < samples && next < max_draws {
        let block = (samples - out.generic_samples).max(8);
        let results = (next..next + block)
            .into_par_iter()
            .map(|k| -> Result<_> {
                let mut rng = stream_rng(seed, GENERIC_STREAM_OFFSET + k as u64);
                let psi = random_pure_with(&[2, 2, d], &mut rng)?;
                Ok((k, check_theorem1(&psi, roof, tol)?, psi))
            })
            .collect::<Result<Vec<_>>>()?;
        next += block;
        for (k, v, psi) in results {
            if out.generic_samples == samples {
                break;
            }
            if v.c_ac_assist < GENERIC_ASSIST_MIN {
                out.generic_skipped += 1;
                continue;
            }
            out.generic_samples += 1;
            let gap = v.c_a_bc - v.c_ab;
            out.min_generic_gap = out.min_generic_gap.min(gap);
            let mut reasons = Vec::new();
            if gap < GENERIC_GAP_MIN {
                reasons.push(format!("C_A(BC) - C_AB = {gap:e} with C^a_AC = {}", v.c_ac_assist));
            }
            if !v.consistent {
                reasons.push(format!(
                    "predicates (i, ii, iii) = ({}, {}, {})",
                    v.product, v.no_assistance, v.equal_concurrence
                ));
            }
            if !reasons.is_empty() {
                out.failures.push(failure("generic", k, reasons.join("; "), &psi));
            }
        }
    }
    if out.generic_samples < samples {
        out.failures.push(BatteryFailure {
            family: "generic".into(),
            index: next,
            reason: format!(
                "only {} of {samples} draws reached C^a_AC >= {GENERIC_ASSIST_MIN}",
                out.generic_samples
            ),
            state: StateFile {
                dims: vec![2, 2, d],
                amps: Vec::new(),
            },
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem2Battery {
    pub d: usize,
    pub seed: u64,
    pub samples: usize,
    pub passed: usize,
    pub max_premise_gap: f64,
    pub max_c_ab: f64,
    pub min_ppt_eigenvalue: f64,
    pub max_psi_prime_deviation: f64,
    pub failures: Vec<BatteryFailure>,
}

/// Random equal-marginal states: the premise must hold, `ρ_AB` must be PPT
/// with `C_AB ≤ tol`, and the Ψ′ identity must hold in both expansions.
pub fn theorem2_battery(
    d: usize,
    samples: usize,
    seed: u64,
    roof: &RoofConfig,
    tol: f64,
) -> Result<Theorem2Battery> {
    if d < 2 || samples == 0 {
        return Err(Error::InvalidConfig(format!(
            "battery needs d >= 2 and samples >= 1 (got d = {d}, samples = {samples})"
        )));
    }
    let results = (0..samples)
        .into_par_iter()
        .map(|k| -> Result<_> {
            let spec = EqualMarginalSpec::random(d, &mut stream_rng(seed, k as u64))?;
            let v = verify_theorem2(&spec, roof, tol)?;
            let ok = v.premise_met && v.passed;
            let fail = (!ok).then(|| {
                let psi = build_equal_marginal_state(&spec).expect("valid spec");
                let reason = format!(
                    "premise_met = {}, C_A(BC) = {}, C^a_AC = {}, C_AB = {:e}, PPT min eig = {:e}, psi' deviations = {:?} / {:?}",
                    v.premise_met,
                    v.report.c_a_bc,
                    v.report.c_ac_assist,
                    v.report.c_ab,
                    v.report.ppt_min_eigenvalue,
                    v.psi_prime_deviation,
                    v.psi_prime_spectral_deviation
                );
                failure("equal-marginal", k, reason, &psi)
            });
            Ok((v, fail))
        })
        .collect::<Result<Vec<_>>>()?;

    let dev = |x: Option<f64>| x.unwrap_or(f64::INFINITY);
    Ok(Theorem2Battery {
        d,
        seed,
        samples,
        passed: results.iter().filter(|r| r.1.is_none()).count(),
        max_premise_gap: results
            .iter()
            .map(|r| (r.0.report.c_a_bc - r.0.report.c_ac_assist).abs())
            .fold(0.0, f64::max),
        max_c_ab: results.iter().map(|r| r.0.report.c_ab).fold(0.0, f64::max),
        min_ppt_eigenvalue: results
            .iter()
            .map(|r| r.0.report.ppt_min_eigenvalue)
            .fold(f64::INFINITY, f64::min),
        max_psi_prime_deviation: results
            .iter()
            .map(|r| dev(r.0.psi_prime_deviation).max(dev(r.0.psi_prime_spectral_deviation)))
            .fold(0.0, f64::max),
        failures: results.into_iter().filter_map(|r| r.1).collect(),
    })
}
