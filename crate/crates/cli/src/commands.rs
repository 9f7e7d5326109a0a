use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use monogamy_core::bsa::{bsa_decompose, werner_state, BsaDecomposition};
use monogamy_core::io::{parse_density, parse_state, DensityFile, StateFile};
use monogamy_core::measures::RoofConfig;
use monogamy_core::monogamy::{
    monogamy_triple, run_example_check, scan_conjecture, theorem1_battery, theorem2_battery,
    BatteryFailure, MonogamyReport,
};
use monogamy_core::states::DensityMatrix;
use monogamy_core::Error;
use serde::Serialize;
use serde_json::{json, Value};

use crate::{Cli, Command, Format, Which};

pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_DIMENSION: u8 = 3;
pub const EXIT_IO: u8 = 4;

const DEFAULT_RESTARTS: usize = 32;
/// Sample loops evaluate thousands of states, so they default to fewer
/// restarts; every restart converges to the same optimum on these inputs.
const DEFAULT_BATCH_RESTARTS: usize = 8;
const DEFAULT_BSA_RESTARTS: usize = 64;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::WrongDims { .. }
            | Error::BadCut(_)
            | Error::NotBipartite(_)
            | Error::DimMismatch { .. }
            | Error::WrongShape { .. }
            | Error::BadSubsystemIndex { .. } => EXIT_DIMENSION,
            Error::Parse { .. }
            | Error::InvalidConfig(_)
            | Error::InvalidSpec(_)
            | Error::NotNormalized(_)
            | Error::BadTrace(_)
            | Error::NotPsd { .. }
            | Error::NotHermitian { .. }
            | Error::ShapeMismatch(_)
            | Error::NonFinite
            | Error::EntryCount { .. }
            | Error::BadDims(_) => EXIT_USAGE,
            _ => EXIT_FAILURE,
        };
        Self::new(code, e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Everything that determines a run's output, echoed in machine reports.
#[derive(Debug, Serialize)]
struct RunConfig {
    command: &'static str,
    state_path: Option<PathBuf>,
    d: Option<u64>,
    samples: Option<u64>,
    seed: u64,
    restarts: usize,
    max_sweeps: u64,
    tol: f64,
    out_path: Option<PathBuf>,
    format: Format,
    #[serde(skip_serializing_if = "Option::is_none")]
    which: Option<Which>,
    #[serde(skip_serializing_if = "Option::is_none")]
    include_example: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    werner: Option<f64>,
}

impl RunConfig {
    fn from_cli(cli: &Cli) -> Self {
        let mut cfg = RunConfig {
            command: "",
            state_path: None,
            d: None,
            samples: None,
            seed: cli.seed,
            restarts: 0,
            max_sweeps: cli.max_sweeps,
            tol: cli.tol,
            out_path: cli.out.clone(),
            format: cli.format,
            which: None,
            include_example: None,
            werner: None,
        };
        let default_restarts = match &cli.command {
            Command::Measures { state } => {
                cfg.command = "measures";
                cfg.state_path = Some(state.clone());
                DEFAULT_RESTARTS
            }
            Command::Example => {
                cfg.command = "example";
                DEFAULT_RESTARTS
            }
            Command::Theorems {
                which, d, samples, ..
            } => {
                cfg.command = "theorems";
                cfg.which = Some(*which);
                cfg.d = Some(*d);
                cfg.samples = Some(*samples);
                DEFAULT_BATCH_RESTARTS
            }
            Command::Scan {
                d,
                samples,
                include_example,
            } => {
                cfg.command = "scan";
                cfg.d = Some(*d);
                cfg.samples = Some(*samples);
                cfg.include_example = Some(*include_example);
                DEFAULT_BATCH_RESTARTS
            }
            Command::Bsa { state, werner } => {
                cfg.command = "bsa";
                cfg.state_path = state.clone();
                cfg.werner = *werner;
                DEFAULT_BSA_RESTARTS
            }
        };
        cfg.restarts = cli.restarts.map_or(default_restarts, |r| r as usize);
        cfg
    }

    fn roof(&self) -> RoofConfig {
        RoofConfig::maximize()
            .with_restarts(self.restarts)
            .with_max_sweeps(self.max_sweeps as usize)
            .with_seed(self.seed)
    }
}

pub fn run(cli: &Cli) -> CliResult<ExitCode> {
    if !(cli.tol > 0.0 && cli.tol.is_finite()) {
        return Err(CliError::new(EXIT_USAGE, format!("--tol must be positive, got {}", cli.tol)));
    }
    let cfg = RunConfig::from_cli(cli);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.workers)
        .build()
        .map_err(|e| CliError::new(EXIT_USAGE, format!("cannot start worker pool: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Measures { state } => cmd_measures(&cfg, state),
        Command::Example => cmd_example(&cfg),
        Command::Theorems {
            which,
            d,
            samples,
            dump_dir,
        } => cmd_theorems(&cfg, *which, *d as usize, *samples as usize, dump_dir),
        Command::Scan {
            d,
            samples,
            include_example,
        } => cmd_scan(&cfg, *d as usize, *samples as usize, *include_example),
        Command::Bsa { state, werner } => cmd_bsa(&cfg, state.as_deref(), *werner),
    })
}

fn read_file(path: &Path) -> CliResult<String> {
    fs::read_to_string(path)
        .map_err(|e| CliError::new(EXIT_IO, format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text)
        .map_err(|e| CliError::new(EXIT_IO, format!("cannot write {}: {e}", path.display())))
}

fn to_json<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("report serializes")
}

/// Sends the report to `--out` or stdout in the requested format.
fn emit(cfg: &RunConfig, text: &str, result: Value) -> CliResult<()> {
    let body = match cfg.format {
        Format::Text => text.to_string(),
        Format::Machine => {
            let doc = json!({ "config": to_json(cfg), "result": result });
            serde_json::to_string_pretty(&doc).expect("report serializes") + "\n"
        }
    };
    match &cfg.out_path {
        Some(path) => write_file(path, &body),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "n/a".to_string(), |v| format!("{v:+.6e}"))
}

fn measures_text(r: &MonogamyReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "d = {}", r.d);
    let _ = writeln!(s, "c_a_bc = {:.6}", r.c_a_bc);
    let _ = writeln!(s, "c_ab = {:.6}", r.c_ab);
    let _ = writeln!(s, "c_ac_assist = {:.6}", r.c_ac_assist);
    let _ = writeln!(s, "equality_residual = {:+.6e}", r.equality_residual);
    let _ = writeln!(s, "ckw_residual = {}", fmt_opt(r.ckw_residual));
    let _ = writeln!(s, "dual_residual = {}", fmt_opt(r.dual_residual));
    let _ = writeln!(
        s,
        "ppt_ab = {} (min eigenvalue {:+.3e})",
        r.ppt_ab, r.ppt_min_eigenvalue
    );
    let _ = writeln!(s, "product_form = {:?}", r.product_form);
    let _ = writeln!(s, "roof_converged = {}", r.roof_converged);
    s
}

fn cmd_measures(cfg: &RunConfig, path: &Path) -> CliResult<ExitCode> {
    let psi = parse_state(&read_file(path)?)?;
    let report = monogamy_triple(&psi, &cfg.roof())?;
    if !report.roof_converged {
        eprintln!("warning: roof optimizer hit the sweep limit; C^a_AC is the best value found");
    }
    emit(cfg, &measures_text(&report), to_json(&report))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_example(cfg: &RunConfig) -> CliResult<ExitCode> {
    let check = run_example_check(&cfg.roof())?;
    let mut s = String::new();
    for c in &check.comparisons {
        let _ = writeln!(
            s,
            "{}: expected {:.9}, observed {:.9}, tolerance {:e} ... {}",
            c.name,
            c.expected,
            c.observed,
            c.tolerance,
            if c.passed { "PASS" } else { "FAIL" }
        );
    }
    let _ = writeln!(
        s,
        "ppt_ab: min eigenvalue of partial transpose {:+.3e} ... {}",
        check.ppt_min_eigenvalue,
        if check.ppt_ab { "PASS" } else { "FAIL" }
    );
    let _ = writeln!(s, "equality_residual = {:+.9}", check.equality_residual);
    for c in check.comparisons.iter().filter(|c| !c.passed) {
        if c.name == "c_ac_assist" {
            let _ = writeln!(
                s,
                "cause: C^a_AC shortfall: the roof optimizer reached {:.9} of {:.9} (converged: {}); raise --restarts or --max-sweeps",
                c.observed, c.expected, check.roof_converged
            );
        } else {
            let _ = writeln!(s, "cause: {} differs from its expected value", c.name);
        }
    }
    let _ = writeln!(s, "result: {}", if check.passed { "PASS" } else { "FAIL" });
    emit(cfg, &s, to_json(&check))?;
    Ok(if check.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILURE)
    })
}

fn dump_failures(
    dir: &Path,
    prefix: &str,
    failures: &[BatteryFailure],
) -> CliResult<Vec<PathBuf>> {
    if failures.is_empty() {
        return Ok(Vec::new());
    }
    fs::create_dir_all(dir)
        .map_err(|e| CliError::new(EXIT_IO, format!("cannot create {}: {e}", dir.display())))?;
    failures
        .iter()
        .map(|f| {
            let path = dir.join(format!("{prefix}-{}-{}.json", f.family, f.index));
            write_file(&path, &serde_json::to_string_pretty(f).expect("failure serializes"))?;
            Ok(path)
        })
        .collect()
}

fn cmd_theorems(
    cfg: &RunConfig,
    which: Which,
    d: usize,
    samples: usize,
    dump_dir: &Path,
) -> CliResult<ExitCode> {
    let roof = cfg.roof();
    let mut s = String::new();
    let (result, failures, prefix) = match which {
        Which::One => {
            let b = theorem1_battery(d, samples, cfg.seed, &roof, cfg.tol)?;
            let _ = writeln!(s, "theorem 1 battery, d = {d}, seed = {}", cfg.seed);
            let _ = writeln!(
                s,
                "product family: {} states, max C^a_AC {:.3e}, max |C_A(BC) - C_AB| {:.3e}",
                b.product_samples, b.max_product_assist, b.max_product_gap
            );
            let _ = writeln!(
                s,
                "generic family: {} states with C^a_AC >= 0.1 ({} skipped), min C_A(BC) - C_AB {:.6}",
                b.generic_samples, b.generic_skipped, b.min_generic_gap
            );
            (to_json(&b), b.failures, format!("theorem1-d{d}"))
        }
        Which::Two => {
            let b = theorem2_battery(d, samples, cfg.seed, &roof, cfg.tol)?;
            let _ = writeln!(s, "theorem 2 battery, d = {d}, seed = {}", cfg.seed);
            let _ = writeln!(s, "passed {} of {}", b.passed, b.samples);
            let _ = writeln!(
                s,
                "max |C_A(BC) - C^a_AC| {:.3e}, max C_AB {:.3e}, min PT eigenvalue {:+.3e}, max psi' deviation {:.3e}",
                b.max_premise_gap, b.max_c_ab, b.min_ppt_eigenvalue, b.max_psi_prime_deviation
            );
            (to_json(&b), b.failures, format!("theorem2-d{d}"))
        }
    };
    let _ = writeln!(s, "failures: {}", failures.len());
    let dumped = dump_failures(dump_dir, &prefix, &failures)?;
    for (f, path) in failures.iter().zip(&dumped) {
        let _ = writeln!(s, "  {} #{}: {} -> {}", f.family, f.index, f.reason, path.display());
    }
    emit(cfg, &s, result)?;
    Ok(if failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILURE)
    })
}

fn cmd_scan(cfg: &RunConfig, d: usize, samples: usize, include_example: bool) -> CliResult<ExitCode> {
    let summary = scan_conjecture(d, samples, cfg.seed, &cfg.roof(), include_example)?;
    let mut s = String::new();
    let _ = writeln!(s, "d = {d}, samples = {samples}, seed = {}", cfg.seed);
    let _ = writeln!(s, "min residual = {:+.6e}", summary.min_residual);
    let _ = writeln!(s, "mean residual = {:+.6e}", summary.mean_residual);
    let _ = writeln!(s, "max residual = {:+.6e}", summary.max_residual);
    let _ = writeln!(s, "candidates re-run = {}", summary.candidates_rerun);
    let _ = writeln!(s, "violations = {}", summary.violations.len());
    for inj in &summary.injected {
        let _ = writeln!(s, "{} residual = {:+.9}", inj.label, inj.residual);
    }
    match &cfg.out_path {
        Some(path) => {
            let text = serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n";
            write_file(path, &text)?;
            match cfg.format {
                Format::Text => print!("{s}"),
                Format::Machine => println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "config": to_json(cfg),
                        "result": { "summary_path": path, "min_residual": summary.min_residual,
                                    "violations": summary.violations.len() }
                    }))
                    .expect("report serializes")
                ),
            }
        }
        None => emit(cfg, &s, to_json(&summary))?,
    }
    Ok(ExitCode::SUCCESS)
}

fn load_two_qubit(path: &Path) -> CliResult<DensityMatrix> {
    let text = read_file(path)?;
    let value: Value = serde_json::from_str(&text).map_err(|e| {
        CliError::from(Error::Parse {
            field: "document".into(),
            message: e.to_string(),
        })
    })?;
    let rho = if value.get("mat").is_some() {
        parse_density(&text)?
    } else {
        parse_state(&text)?.density()
    };
    if rho.dims() != [2, 2] {
        return Err(Error::WrongDims {
            expected: "[2, 2]",
            got: rho.dims().to_vec(),
        }
        .into());
    }
    Ok(rho)
}

fn bsa_text(d: &BsaDecomposition) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "lambda = {:.9}", d.lambda);
    let _ = writeln!(s, "rho_s =");
    let m = d.rho_s.matrix();
    for i in 0..4 {
        let row: Vec<String> = (0..4)
            .map(|j| format!("{:+.6}{:+.6}i", m[(i, j)].re, m[(i, j)].im))
            .collect();
        let _ = writeln!(s, "  [{}]", row.join(", "));
    }
    match &d.p_e {
        Some(e) => {
            let amps: Vec<String> = e
                .amps()
                .iter()
                .map(|z| format!("{:+.6}{:+.6}i", z.re, z.im))
                .collect();
            let _ = writeln!(s, "p_e = [{}]", amps.join(", "));
        }
        None => {
            let _ = writeln!(s, "p_e = none (separable input)");
        }
    }
    let _ = writeln!(s, "residual_norm = {:.3e}", d.residual_norm);
    let _ = writeln!(s, "converged = {}", d.converged);
    let c = &d.certificate;
    match c.probe_lambda {
        Some(probe) => {
            let _ = writeln!(
                s,
                "certificate: no feasible split at lambda = {:.6} from {} starts: {} (best score {:+.3e})",
                probe, c.starts, c.certified, c.best_score
            );
        }
        None => {
            let _ = writeln!(s, "certificate: lambda = 1 is maximal");
        }
    }
    s
}

fn cmd_bsa(cfg: &RunConfig, state: Option<&Path>, werner: Option<f64>) -> CliResult<ExitCode> {
    let rho = match (state, werner) {
        (_, Some(f)) => werner_state(f)?,
        (Some(path), None) => load_two_qubit(path)?,
        (None, None) => return Err(CliError::new(EXIT_USAGE, "need a state file or --werner")),
    };
    let d = bsa_decompose(&rho, cfg.restarts, cfg.seed)?;
    if !d.converged {
        eprintln!("warning: the search did not converge; the decomposition is the best found");
    }
    let result = json!({
        "lambda": d.lambda,
        "rho_s": to_json(&DensityFile::from(&d.rho_s)),
        "p_e": d.p_e.as_ref().map(|e| to_json(&StateFile::from(e))),
        "residual_norm": d.residual_norm,
        "converged": d.converged,
        "certificate": to_json(&d.certificate),
    });
    emit(cfg, &bsa_text(&d), result)?;
    Ok(ExitCode::SUCCESS)
}
