use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Serialize;

use nonlocality::bell::{cglmp_functional, chsh_functional, BellFunctional};
use nonlocality::quantum::{bell_operator, canonical_settings};
use nonlocality::resistance::{chsh_embed_numeric, chsh_embed_resistance, compare_measures, threshold, NoiseModel, ThresholdReport};
use nonlocality::seesaw::{optimize_violation, OptimizerConfig};
use nonlocality::spectra::{max_violation, table1 as violation_table};
use nonlocality::tensor::{max_entangled, schmidt_decompose, schmidt_state, CMatrix, PureState, Subsystem};
use nonlocality::witness::{scan_decomposition, witness_from};
use nonlocality::{Complex, Rational64};

use crate::error::{CliError, Result};
use crate::output::{emit, fmt_num, json_string, round, round_all};

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FunctionalArg {
    Cglmp,
    Chsh,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseArg {
    White,
    Marginals,
    ClosestSep,
}

impl From<NoiseArg> for NoiseModel {
    fn from(n: NoiseArg) -> Self {
        match n {
            NoiseArg::White => NoiseModel::White,
            NoiseArg::Marginals => NoiseModel::ProductMarginals,
            NoiseArg::ClosestSep => NoiseModel::ClosestSeparablePure,
        }
    }
}

fn written(out: &Option<PathBuf>) -> Vec<PathBuf> {
    out.iter().cloned().collect()
}

#[derive(Debug, Args, Serialize)]
pub struct Table1Args {
    #[arg(long, default_value_t = 3)]
    pub d_min: usize,
    #[arg(long, default_value_t = 8)]
    pub d_max: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct Table1Row {
    d: usize,
    violation_psi: f64,
    violation_max: f64,
    difference_percent: f64,
    /// Schmidt coefficients of the maximizing eigenvector, descending.
    schmidt_coefficients: Vec<f64>,
    degenerate: bool,
}

pub fn table1(a: &Table1Args) -> Result<Vec<PathBuf>> {
    if a.d_min < 3 || a.d_min > a.d_max {
        return Err(CliError::Usage(format!("need 3 <= d-min <= d-max, got {}..{}", a.d_min, a.d_max)));
    }
    let rows = violation_table::<f64>(a.d_min, a.d_max)?
        .into_iter()
        .map(|r| {
            Ok(Table1Row {
                d: r.d,
                violation_psi: round(r.value_max_entangled),
                violation_max: round(r.value_operator_max),
                difference_percent: round(r.difference_percent),
                schmidt_coefficients: round_all(&schmidt_decompose(&r.optimal_state)?.coefficients),
                degenerate: r.degenerate,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let text = match a.format {
        Format::Json => json_string(&rows)?,
        Format::Csv => {
            let mut s = String::from("d,violation_psi,violation_max,difference_percent\n");
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{}",
                    r.d,
                    fmt_num(r.violation_psi),
                    fmt_num(r.violation_max),
                    fmt_num(r.difference_percent)
                );
            }
            s
        }
    };
    emit(&text, a.out.as_deref())?;
    Ok(written(&a.out))
}

fn canonical_operator(d: usize) -> Result<CMatrix<f64>> {
    let f = cglmp_functional::<f64>(d)?;
    Ok(bell_operator(&f, &canonical_settings::<f64>(d)?)?)
}

#[derive(Debug, Args, Serialize)]
pub struct WitnessScanArgs {
    #[arg(long, default_value_t = 3)]
    pub d: usize,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub k_min: f64,
    #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
    pub k_max: f64,
    #[arg(long, default_value_t = 301)]
    pub steps: usize,
    /// CSV destination; without it the CSV goes to standard output and the
    /// summary to standard error.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

pub fn witness_scan(a: &WitnessScanArgs) -> Result<Vec<PathBuf>> {
    if a.d < 3 {
        return Err(CliError::Usage(format!("witness-scan needs d >= 3, got {}", a.d)));
    }
    let w = witness_from(&canonical_operator(a.d)?, 2.0)?;
    let scan = scan_decomposition(&w, a.k_min, a.k_max, a.steps)?;
    let mut csv = String::from("k,min_eigenvalue\n");
    for (k, m) in scan.k_values.iter().zip(&scan.min_eigenvalues) {
        let _ = writeln!(csv, "{},{}", fmt_num(*k), fmt_num(*m));
    }
    emit(&csv, a.out.as_deref())?;
    let (best_k, best_min) = scan.best();
    let interval = match scan.feasible_interval {
        Some((lo, hi)) => format!("[{}, {}]", fmt_num(lo), fmt_num(hi)),
        None => "none".into(),
    };
    let summary = format!(
        "d={} feasible interval: {interval}; largest min eigenvalue {} at k={}",
        a.d,
        fmt_num(best_min),
        fmt_num(best_k)
    );
    if a.out.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(written(&a.out))
}

#[derive(Debug, Args, Serialize)]
pub struct ResistanceArgs {
    #[arg(long, default_value_t = 3)]
    pub d: usize,
    /// `psi`, `mv` or `schmidt:c1,c2,...`
    #[arg(long, default_value = "psi")]
    pub state: String,
    #[arg(long, value_enum, default_value_t = NoiseArg::White)]
    pub noise: NoiseArg,
    /// Report all three noise models.
    #[arg(long)]
    pub all_models: bool,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct ThresholdJson {
    model: &'static str,
    lambda_star: f64,
    signal_value: f64,
    noise_value: f64,
    bound: f64,
    clipped: bool,
}

impl From<&ThresholdReport<f64>> for ThresholdJson {
    fn from(r: &ThresholdReport<f64>) -> Self {
        ThresholdJson {
            model: r.model.name(),
            lambda_star: round(r.lambda_star),
            signal_value: round(r.signal_value),
            noise_value: round(r.noise_value),
            bound: round(r.bound),
            clipped: r.clipped,
        }
    }
}

#[derive(Serialize)]
struct ResistanceJson<'a> {
    d: usize,
    state: &'a str,
    reports: Vec<ThresholdJson>,
}

fn parse_state(spec: &str, d: usize) -> Result<PureState<f64>> {
    match spec {
        "psi" => Ok(max_entangled(d)?),
        "mv" => Ok(max_violation(&canonical_operator(d)?)?.state),
        _ => {
            let list = spec
                .strip_prefix("schmidt:")
                .ok_or_else(|| CliError::Usage(format!("unknown state {spec:?}; use psi, mv or schmidt:c1,c2,...")))?;
            let coeffs = list
                .split(',')
                .map(|c| c.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("bad Schmidt coefficient {c:?}"))))
                .collect::<Result<Vec<_>>>()?;
            if coeffs.len() != d {
                return Err(CliError::Usage(format!("{} Schmidt coefficients given for d={d}", coeffs.len())));
            }
            Ok(schmidt_state(&coeffs)?)
        }
    }
}

pub fn resistance(a: &ResistanceArgs) -> Result<Vec<PathBuf>> {
    let phi = parse_state(&a.state, a.d)?;
    let f = cglmp_functional::<f64>(a.d)?;
    let s = canonical_settings::<f64>(a.d)?;
    let reports: Vec<ThresholdReport<f64>> = if a.all_models {
        compare_measures(&phi, &f, &s)?.to_vec()
    } else {
        vec![threshold(&phi, &f, &s, a.noise.into())?]
    };
    let json = ResistanceJson { d: a.d, state: &a.state, reports: reports.iter().map(ThresholdJson::from).collect() };
    emit(&json_string(&json)?, a.out.as_deref())?;
    Ok(written(&a.out))
}

#[derive(Debug, Args, Serialize)]
pub struct ChshEmbedArgs {
    #[arg(long, default_value_t = 10)]
    pub d_max: usize,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

pub fn chsh_embed(a: &ChshEmbedArgs) -> Result<Vec<PathBuf>> {
    if a.d_max < 2 {
        return Err(CliError::Usage(format!("d-max must be at least 2, got {}", a.d_max)));
    }
    let mut csv = String::from("d,closed_form,numeric,abs_difference\n");
    for d in 2..=a.d_max {
        let closed: f64 = chsh_embed_resistance(d)?;
        let numeric = chsh_embed_numeric::<f64>(d)?.lambda_star;
        let _ = writeln!(csv, "{d},{},{},{}", fmt_num(closed), fmt_num(numeric), fmt_num((closed - numeric).abs()));
    }
    emit(&csv, a.out.as_deref())?;
    Ok(written(&a.out))
}

#[derive(Debug, Args, Serialize)]
pub struct OptimizeArgs {
    #[arg(long, default_value_t = 3)]
    pub d: usize,
    #[arg(long, value_enum, default_value_t = FunctionalArg::Cglmp)]
    pub functional: FunctionalArg,
    #[arg(long, default_value_t = 20)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 300)]
    pub max_iterations: usize,
    #[arg(long, default_value_t = 1e-11)]
    pub tolerance: f64,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct ComplexMatrixJson {
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl From<&CMatrix<f64>> for ComplexMatrixJson {
    fn from(m: &CMatrix<f64>) -> Self {
        let part = |f: fn(&Complex<f64>) -> f64| (0..m.rows()).map(|i| m.row(i).iter().map(|z| round(f(z))).collect()).collect();
        ComplexMatrixJson { re: part(|z| z.re), im: part(|z| z.im) }
    }
}

#[derive(Serialize)]
struct ComplexVectorJson {
    re: Vec<f64>,
    im: Vec<f64>,
}

#[derive(Serialize)]
struct SettingsJson {
    alice: [ComplexMatrixJson; 2],
    bob: [ComplexMatrixJson; 2],
}

#[derive(Serialize)]
struct OptimizeJson {
    functional: FunctionalArg,
    d: usize,
    restarts: usize,
    seed: u64,
    best_value: f64,
    restart: usize,
    iterations_used: usize,
    converged: bool,
    half_steps: usize,
    best_state: ComplexVectorJson,
    best_settings: SettingsJson,
}

fn functional(kind: FunctionalArg, d: usize) -> Result<BellFunctional<f64>> {
    Ok(match kind {
        FunctionalArg::Cglmp => cglmp_functional(d)?,
        FunctionalArg::Chsh => chsh_functional(d)?,
    })
}

pub fn optimize(a: &OptimizeArgs) -> Result<Vec<PathBuf>> {
    let cfg = OptimizerConfig { restarts: a.restarts, max_iterations: a.max_iterations, tolerance: a.tolerance, seed: a.seed };
    let f = functional(a.functional, a.d)?;
    let r = optimize_violation::<f64, f64>(&f, a.d, &cfg)?;
    let party = |p: Subsystem| {
        let u = r.best_settings.party(p);
        [ComplexMatrixJson::from(u[0].matrix()), ComplexMatrixJson::from(u[1].matrix())]
    };
    let amps = r.best_state.amplitudes();
    let json = OptimizeJson {
        functional: a.functional,
        d: a.d,
        restarts: a.restarts,
        seed: a.seed,
        best_value: round(r.best_value),
        restart: r.restart,
        iterations_used: r.iterations_used,
        converged: r.converged,
        half_steps: r.history.len(),
        best_state: ComplexVectorJson {
            re: amps.iter().map(|z| round(z.re)).collect(),
            im: amps.iter().map(|z| round(z.im)).collect(),
        },
        best_settings: SettingsJson { alice: party(Subsystem::A), bob: party(Subsystem::B) },
    };
    emit(&json_string(&json)?, a.out.as_deref())?;
    Ok(written(&a.out))
}

#[derive(Debug, Args, Serialize)]
pub struct LvBoundArgs {
    #[arg(long, default_value_t = 3)]
    pub d: usize,
    #[arg(long, value_enum, default_value_t = FunctionalArg::Cglmp)]
    pub functional: FunctionalArg,
}

pub fn lv_bound(a: &LvBoundArgs) -> Result<Vec<PathBuf>> {
    let f = match a.functional {
        FunctionalArg::Cglmp => cglmp_functional::<Rational64>(a.d)?,
        FunctionalArg::Chsh => chsh_functional::<Rational64>(a.d)?,
    };
    let b = nonlocality::bell::lv_bound(&f)?;
    let text = format!(
        "bound: {}\nstrategies: {}\nbest: a=({},{}) b=({},{})\n",
        b.value, b.strategies, b.best_a[0], b.best_a[1], b.best_b[0], b.best_b[1]
    );
    emit(&text, None::<&Path>)?;
    Ok(Vec::new())
}
