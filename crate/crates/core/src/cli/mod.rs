//! Command-line front end. `run` parses arguments, merges them over an
//! optional INI config file, runs one subcommand and returns the exit code:
//! 0 success, 1 usage error, 2 numerical failure, 3 acceptance failure.

mod config;
mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

pub use config::{CampaignConfig, OutputFormat, Span};
pub use output::{csv_float, Artifact};

use crate::equilibrium::{self, Interval};
use crate::error::{Error, Result};
use crate::kacrice::{expected_real_zeros, gn_density};
use crate::kernel::{kernel_diagonal, scaled_density_ratio};
use crate::orthonorm::basis_scale;
use crate::sampling::{run_batch, CoefficientDistribution, TrialBatchReport};
use crate::verify::{criteria, run_criterion, CriterionResult, Suite};
use crate::weights::parse_weight_spec;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;
pub const EXIT_ACCEPTANCE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "wrz", version, about = "Expected real zeros of random polynomials for radial weights")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Support, bulk and Robin constant of the equilibrium problem.
    Equilibrium(Common),
    /// Log norm constants of the orthonormal monomials.
    Basis(Common),
    /// Kernel diagonal, its log-derivatives and the scaled density ratio.
    KernelCheck(KernelArgs),
    /// Expected number of real zeros on intervals.
    Expected(ExpectedArgs),
    /// Monte Carlo real-root counts and complex-root occupancy.
    Simulate(SimulateArgs),
    /// Acceptance checks.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct Common {
    /// INI config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// `weyl` or `circular:alpha=<a>,beta=<b>`.
    #[arg(long)]
    weight: Option<String>,
    /// Degrees, comma separated.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    /// Output format, csv or json.
    #[arg(long)]
    out: Option<String>,
    /// Write to this file instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct KernelArgs {
    #[command(flatten)]
    common: Common,
    /// Evaluation points, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    x: Option<Vec<f64>>,
}

#[derive(Args, Debug)]
struct ExpectedArgs {
    #[command(flatten)]
    common: Common,
    /// `all` or `lo:hi`, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    interval: Option<String>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    common: Common,
    /// gaussian, rademacher, uniform or discrete:v@p,...
    #[arg(long)]
    dist: Option<String>,
    /// Number of sampled polynomials per degree.
    #[arg(long)]
    trials: Option<u64>,
    /// Campaign seed; trial k draws from stream k of it.
    #[arg(long)]
    seed: Option<u64>,
    /// Annuli `lo:hi`, comma separated.
    #[arg(long)]
    regions: Option<String>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// INI config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// quick (A1–A5) or full (A1–A12).
    #[arg(long)]
    suite: Option<String>,
    /// Run only these criteria, e.g. `A1,A7`.
    #[arg(long, value_delimiter = ',')]
    only: Option<Vec<String>>,
    /// Format of the `--output` report, csv or json. Stdout always gets PASS/FAIL lines.
    #[arg(long)]
    out: Option<String>,
    /// Write the report to this file.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn load(path: &Option<PathBuf>) -> Result<CampaignConfig> {
    match path {
        None => Ok(CampaignConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
            CampaignConfig::from_ini(&text).map_err(|e| Error::Config(format!("{}: {e}", p.display())))
        }
    }
}

impl Common {
    fn merge(&self) -> Result<CampaignConfig> {
        let mut c = load(&self.config)?;
        if let Some(w) = &self.weight {
            c.weight = w.clone();
        }
        if let Some(n) = &self.n {
            c.degrees = n.clone();
        }
        if let Some(o) = &self.out {
            c.output_format = o.parse()?;
        }
        if let Some(p) = &self.output {
            c.output_path = Some(p.clone());
        }
        Ok(c)
    }
}

fn parse_list<T>(s: &str, f: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    s.split(',').map(str::trim).filter(|t| !t.is_empty()).map(f).collect()
}

/// Tag a failure with the step that produced it.
fn ctx(what: String) -> impl Fn(Error) -> Error {
    move |e| e.context(what.clone())
}

#[derive(Serialize)]
struct EquilibriumRow {
    weight: String,
    r0: f64,
    #[serde(rename = "R0")]
    big_r0: f64,
    robin_constant: f64,
    limit_integral: f64,
    support: Vec<Interval>,
    bulk: Vec<Interval>,
    warnings: Vec<String>,
}

#[derive(Serialize)]
struct BasisRow {
    weight: String,
    n: usize,
    log_c: Vec<f64>,
}

#[derive(Serialize)]
struct KernelRow {
    n: usize,
    x: f64,
    #[serde(rename = "log_K")]
    log_k: f64,
    #[serde(rename = "K01_sign")]
    k01_sign: i8,
    /// Absent when `K01 = 0`.
    #[serde(rename = "log_K01_abs")]
    log_k01_abs: Option<f64>,
    #[serde(rename = "log_K11")]
    log_k11: f64,
    #[serde(rename = "log_V")]
    log_v: Option<f64>,
    gn: f64,
    density_ratio: f64,
}

#[derive(Serialize)]
struct ExpectedRow {
    n: usize,
    /// `null` means −∞.
    lo: Option<f64>,
    /// `null` means +∞.
    hi: Option<f64>,
    expected: f64,
    expected_over_sqrt_n: f64,
    quadrature_error: f64,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

fn equilibrium_cmd(c: &CampaignConfig) -> Result<Artifact> {
    let w = parse_weight_spec(&c.weight)?;
    let eq = equilibrium::solve(&w).map_err(ctx("equilibrium".into()))?;
    let s = eq.summary().map_err(ctx("equilibrium".into()))?;
    let row = EquilibriumRow {
        weight: w.name().to_string(),
        r0: s.r0,
        big_r0: s.big_r0,
        robin_constant: s.robin_constant,
        limit_integral: s.limit_integral,
        support: eq.support().to_vec(),
        bulk: s.bulk.clone(),
        warnings: eq.warnings().to_vec(),
    };
    let spans = |v: &[Interval]| v.iter().map(|i| format!("{}:{}", csv_float(i.lo), csv_float(i.hi))).collect::<Vec<_>>().join(" ");
    let csv = vec![vec![
        row.weight.clone(),
        csv_float(row.r0),
        csv_float(row.big_r0),
        csv_float(row.robin_constant),
        csv_float(row.limit_integral),
        spans(&row.support),
        spans(&row.bulk),
    ]];
    Artifact::new(
        "equilibrium",
        c,
        &row,
        &["weight", "r0", "R0", "robin_constant", "limit_integral", "support", "bulk"],
        csv,
    )
}

fn basis_cmd(c: &CampaignConfig) -> Result<Artifact> {
    let w = parse_weight_spec(&c.weight)?;
    let mut rows = Vec::new();
    let mut csv = Vec::new();
    for &n in &c.degrees {
        let bs = basis_scale(&w, n).map_err(ctx(format!("basis (n={n})")))?;
        for (j, l) in bs.log_c().iter().enumerate() {
            csv.push(vec![n.to_string(), j.to_string(), csv_float(*l)]);
        }
        rows.push(BasisRow {
            weight: w.name().to_string(),
            n,
            log_c: bs.log_c().to_vec(),
        });
    }
    Artifact::new("basis", c, &rows, &["n", "j", "log_c"], csv)
}

fn kernel_cmd(c: &CampaignConfig) -> Result<Artifact> {
    let w = parse_weight_spec(&c.weight)?;
    let mut rows = Vec::new();
    for &n in &c.degrees {
        let bs = basis_scale(&w, n).map_err(ctx(format!("kernel-check (n={n})")))?;
        for &x in &c.points {
            let k = kernel_diagonal(&bs, x);
            rows.push(KernelRow {
                n,
                x,
                log_k: k.log_k,
                k01_sign: k.k01_sign,
                log_k01_abs: finite(k.log_k01_abs),
                log_k11: k.log_k11,
                log_v: finite(k.log_v),
                gn: gn_density(&bs, x),
                density_ratio: scaled_density_ratio(&bs, x),
            });
        }
    }
    let opt = |v: Option<f64>| v.map_or_else(|| "-inf".to_string(), csv_float);
    let csv = rows
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                csv_float(r.x),
                csv_float(r.log_k),
                r.k01_sign.to_string(),
                opt(r.log_k01_abs),
                csv_float(r.log_k11),
                opt(r.log_v),
                csv_float(r.gn),
                csv_float(r.density_ratio),
            ]
        })
        .collect();
    Artifact::new(
        "kernel-check",
        c,
        &rows,
        &["n", "x", "log_K", "K01_sign", "log_K01_abs", "log_K11", "log_V", "gn", "density_ratio"],
        csv,
    )
}

fn expected_cmd(c: &CampaignConfig) -> Result<Artifact> {
    let w = parse_weight_spec(&c.weight)?;
    let mut rows = Vec::new();
    for &n in &c.degrees {
        let bs = basis_scale(&w, n).map_err(ctx(format!("expected (n={n})")))?;
        for s in &c.intervals {
            let e = expected_real_zeros(&bs, s.lo, s.hi).map_err(ctx(format!("expected (n={n}, {s})")))?;
            rows.push(ExpectedRow {
                n,
                lo: finite(s.lo),
                hi: finite(s.hi),
                expected: e.value,
                expected_over_sqrt_n: e.value / (n as f64).sqrt(),
                quadrature_error: e.quadrature_error,
            });
        }
    }
    let csv = rows
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                csv_float(r.lo.unwrap_or(f64::NEG_INFINITY)),
                csv_float(r.hi.unwrap_or(f64::INFINITY)),
                csv_float(r.expected),
                csv_float(r.expected_over_sqrt_n),
                csv_float(r.quadrature_error),
            ]
        })
        .collect();
    Artifact::new(
        "expected",
        c,
        &rows,
        &["n", "lo", "hi", "expected", "expected_over_sqrt_n", "quadrature_error"],
        csv,
    )
}

fn simulate_cmd(c: &CampaignConfig) -> Result<Artifact> {
    let w = parse_weight_spec(&c.weight)?;
    let dist = CoefficientDistribution::parse(&c.distribution)?;
    let mut reports: Vec<TrialBatchReport> = Vec::new();
    for &n in &c.degrees {
        let bs = basis_scale(&w, n).map_err(ctx(format!("simulate (n={n})")))?;
        let r = run_batch(&bs, &dist, c.trials, &c.regions, c.seed).map_err(ctx(format!("simulate (n={n})")))?;
        reports.push(r);
    }
    let mut csv = Vec::new();
    for r in &reports {
        let head = |q: &str| vec![r.n.to_string(), r.dist.clone(), r.trials.to_string(), r.seed.to_string(), q.to_string()];
        let mut row = head("real_roots");
        row.extend([
            String::new(),
            String::new(),
            csv_float(r.mean_real_roots),
            csv_float(r.stderr),
            r.failures.len().to_string(),
        ]);
        csv.push(row);
        for g in &r.regions {
            let mut row = head("region_fraction");
            row.extend([
                csv_float(g.lo),
                csv_float(g.hi),
                csv_float(g.mean_fraction),
                csv_float(g.stderr),
                r.failures.len().to_string(),
            ]);
            csv.push(row);
        }
    }
    Artifact::new(
        "simulate",
        c,
        &reports,
        &["n", "dist", "trials", "seed", "quantity", "lo", "hi", "mean", "stderr", "failed_trials"],
        csv,
    )
}

fn verify_cmd(args: &VerifyArgs, stdout: &mut dyn Write) -> Result<(Vec<CriterionResult>, CampaignConfig)> {
    let mut c = load(&args.config)?;
    if let Some(s) = &args.suite {
        c.suite = s.parse::<Suite>().map_err(|e| Error::Config(format!("suite: {e}")))?;
    }
    if let Some(o) = &args.out {
        c.output_format = o.parse()?;
    }
    if let Some(p) = &args.output {
        c.output_path = Some(p.clone());
    }
    let ids: Vec<String> = match &args.only {
        Some(only) => {
            let known = criteria(Suite::Full);
            for id in only {
                if !known.iter().any(|k| k.eq_ignore_ascii_case(id)) {
                    return Err(Error::InvalidArgument(format!("unknown criterion '{id}'")));
                }
            }
            only.clone()
        }
        None => criteria(c.suite).into_iter().map(String::from).collect(),
    };
    let mut results = Vec::new();
    for id in ids {
        if let Some(r) = run_criterion(&id) {
            let _ = writeln!(stdout, "{}", r.line());
            let _ = stdout.flush();
            results.push(r);
        }
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    let _ = writeln!(stdout, "{} passed, {failed} failed", results.len() - failed);
    Ok((results, c))
}

fn dispatch(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    let (artifact, code) = match &cli.command {
        Command::Verify(args) => {
            let (results, c) = verify_cmd(args, stdout)?;
            let code = if results.iter().all(|r| r.passed) { EXIT_OK } else { EXIT_ACCEPTANCE };
            if c.output_path.is_none() {
                return Ok(code);
            }
            let csv = results
                .iter()
                .map(|r| vec![r.id.clone(), r.passed.to_string(), csv_float(r.elapsed_s), r.detail.clone()])
                .collect();
            (Artifact::new("verify", &c, &results, &["id", "passed", "elapsed_s", "detail"], csv)?, code)
        }
        other => {
            let c = match other {
                Command::Equilibrium(a) | Command::Basis(a) => a.merge()?,
                Command::KernelCheck(a) => {
                    let mut c = a.common.merge()?;
                    if let Some(x) = &a.x {
                        c.points = x.clone();
                    }
                    c
                }
                Command::Expected(a) => {
                    let mut c = a.common.merge()?;
                    if let Some(i) = &a.interval {
                        c.intervals = parse_list(i, str::parse::<Span>)?;
                    }
                    c
                }
                Command::Simulate(a) => {
                    let mut c = a.common.merge()?;
                    if let Some(d) = &a.dist {
                        c.distribution = d.clone();
                    }
                    if let Some(t) = a.trials {
                        c.trials = t;
                    }
                    if let Some(s) = a.seed {
                        c.seed = s;
                    }
                    if let Some(r) = &a.regions {
                        c.regions = CampaignConfig::from_ini(&format!("[domain]\nregions = {r}\n"))?.regions;
                    }
                    c
                }
                Command::Verify(_) => unreachable!(),
            };
            c.validate()?;
            let artifact = match other {
                Command::Equilibrium(_) => equilibrium_cmd(&c)?,
                Command::Basis(_) => basis_cmd(&c)?,
                Command::KernelCheck(_) => kernel_cmd(&c)?,
                Command::Expected(_) => expected_cmd(&c)?,
                Command::Simulate(_) => simulate_cmd(&c)?,
                Command::Verify(_) => unreachable!(),
            };
            (artifact, EXIT_OK)
        }
    };
    match &artifact.path {
        Some(p) => {
            std::fs::write(p, artifact.render())?;
            let _ = writeln!(stderr, "wrote {}", p.display());
        }
        None => stdout.write_all(artifact.render().as_bytes())?,
    }
    Ok(code)
}

/// Run the command line `args` (program name first) and return the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(&cli, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if e.is_usage() {
                EXIT_USAGE
            } else {
                EXIT_NUMERIC
            }
        }
    }
}

/// Size the worker pool from `WRZ_THREADS` (unset or 0 = one per core).
pub fn configure_threads() -> Result<()> {
    let n = match std::env::var("WRZ_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::Config(format!("WRZ_THREADS: '{v}' is not a nonnegative integer")))?,
        Err(_) => 0,
    };
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(format!("WRZ_THREADS: {e}")))?;
    }
    Ok(())
}
