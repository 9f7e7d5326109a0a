use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::example::build_example_state;
use super::report::monogamy_triple;
use crate::error::{Error, Result};
use crate::io::StateFile;
use crate::measures::RoofConfig;
use crate::states::random::{random_pure_with, stream_rng};

/// Residuals below this are candidate violations of
/// `C²_A(BC) ≥ C²_AB + (C^a_AC)²`.
pub const VIOLATION_THRESHOLD: f64 = -1e-6;
/// Restart multiplier for re-running a candidate violation.
pub const RERUN_FACTOR: usize = 8;
pub const HISTOGRAM_BINS: usize = 32;

/// Uniform bins over `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<usize>,
}

impl Histogram {
    pub fn build(values: &[f64], bins: usize) -> Self {
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut counts = vec![0; bins];
        let width = hi - lo;
        for &v in values {
            let k = if width > 0.0 {
                (((v - lo) / width) * bins as f64) as usize
            } else {
                0
            };
            counts[k.min(bins - 1)] += 1;
        }
        Self { lo, hi, counts }
    }
}

/// A sample whose residual stayed below the threshold after the re-run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanViolation {
    pub index: usize,
    pub residual: f64,
    pub rerun_residual: f64,
    pub state: StateFile,
}

/// A hand-picked state evaluated alongside the random samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InjectedSample {
    pub label: String,
    pub residual: f64,
    pub c_a_bc: f64,
    pub c_ab: f64,
    pub c_ac_assist: f64,
    pub state: StateFile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub d: usize,
    pub samples: usize,
    pub seed: u64,
    pub min_residual: f64,
    pub max_residual: f64,
    pub mean_residual: f64,
    pub histogram: Histogram,
    /// Samples that went through the restart re-run.
    pub candidates_rerun: usize,
    pub violations: Vec<ScanViolation>,
    /// Samples where the roof optimizer hit its sweep limit.
    pub unconverged: usize,
    pub injected: Vec<InjectedSample>,
}

/// Samples Haar-random `[2, 2, d]` states and records the distribution of the
/// monogamy-equality residual.
///
/// Sample `k` draws from stream `k` of `seed`, and the samples run in
/// parallel on the current rayon pool; the summary does not depend on the
/// pool size. Residuals below [`VIOLATION_THRESHOLD`] are recomputed with
/// `restarts × RERUN_FACTOR`; those still below are kept with a state dump.
pub fn scan_conjecture(
    d: usize,
    samples: usize,
    seed: u64,
    roof: &RoofConfig,
    include_example: bool,
) -> Result<ScanSummary> {
    if d < 2 {
        return Err(Error::InvalidConfig(format!("scan needs d >= 2, got {d}")));
    }
    if samples == 0 {
        return Err(Error::InvalidConfig("scan needs at least one sample".into()));
    }
    let rerun_cfg = roof.clone().with_restarts(roof.restarts.max(1) * RERUN_FACTOR);
    let dims = [2, 2, d];

    let outcomes = (0..samples)
        .into_par_iter()
        .map(|k| -> Result<(f64, bool, Option<ScanViolation>, bool)> {
            let psi = random_pure_with(&dims, &mut stream_rng(seed, k as u64))?;
            let report = monogamy_triple(&psi, roof)?;
            let mut residual = report.equality_residual;
            let mut violation = None;
            let rerun = residual < VIOLATION_THRESHOLD;
            if rerun {
                let again = monogamy_triple(&psi, &rerun_cfg)?;
                let first = residual;
                residual = residual.max(again.equality_residual);
                if residual < VIOLATION_THRESHOLD {
                    violation = Some(ScanViolation {
                        index: k,
                        residual: first,
                        rerun_residual: again.equality_residual,
                        state: StateFile::from(&psi),
                    });
                }
            }
            Ok((residual, report.roof_converged, violation, rerun))
        })
        .collect::<Result<Vec<_>>>()?;

    let residuals: Vec<f64> = outcomes.iter().map(|o| o.0).collect();
    let mean_residual = residuals.iter().sum::<f64>() / samples as f64;
    let injected = if include_example {
        let psi = build_example_state();
        let r = monogamy_triple(&psi, roof)?;
        vec![InjectedSample {
            label: "example".into(),
            residual: r.equality_residual,
            c_a_bc: r.c_a_bc,
            c_ab: r.c_ab,
            c_ac_assist: r.c_ac_assist,
            state: StateFile::from(&psi),
        }]
    } else {
        Vec::new()
    };
    let histogram = Histogram::build(&residuals, HISTOGRAM_BINS);
    Ok(ScanSummary {
        d,
        samples,
        seed,
        min_residual: histogram.lo,
        max_residual: histogram.hi,
        mean_residual,
        candidates_rerun: outcomes.iter().filter(|o| o.3).count(),
        violations: outcomes.iter().filter_map(|o| o.2.clone()).collect(),
        unconverged: outcomes.iter().filter(|o| !o.1).count(),
        histogram,
        injected,
    })
}
