use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use opke::cauchy::TwoPointContext;
use opke::kernel::KernelEvaluator;
use opke::limits::{cauchy_limit, sinc_kernel};
use opke::oracle::{brute_ratio_average, mcmc_ratio_average, BRUTE_MAX_N};
use opke::orthopoly::{recurrence, WeightSpec};
use opke::ratios::{limit_ratio_average, ratio_average, scaled_ratio_average, RatioQuery};
use rayon::prelude::*;

use crate::error::{CliError, Result};
use crate::parse;
use crate::report::{sci, sha256_hex, ConvergenceReport, Row};

/// Relative discrepancy allowed between the determinantal formula and the
/// tensor-quadrature oracle.
pub const ORACLE_RTOL: f64 = 1e-7;

/// Nodes per axis for the tensor-quadrature oracle.
const ORACLE_NODES: usize = 80;

/// Monte Carlo estimates may deviate by this many standard errors.
const MCMC_SIGMAS: f64 = 4.0;

#[derive(Debug, Parser)]
#[command(name = "opke", version, about = "Ratios of characteristic polynomials in orthogonal polynomial ensembles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print recurrence coefficients a_k, b_k and leading coefficients γ_k for k = 1..N.
    Recurrence(RecurrenceArgs),
    /// Evaluate ⟨∏ D_n(α_j)/D_n(β_j)⟩ with the determinantal formula.
    Ratio(RatioArgs),
    /// Scaled ratio averages at x against their large-n limit.
    Converge(ConvergeArgs),
    /// Scaled kernel K_n(x + a/K̃, x + b/K̃)/K_n(x, x) against the sine kernel.
    KernelConverge(KernelConvergeArgs),
    /// Compare the determinantal formula with brute-force quadrature (n ≤ 3) or Metropolis sampling.
    Oracle(OracleArgs),
    /// Scaled Cauchy transform of the kernel against its large-n limit.
    CauchyConverge(ConvergeArgs),
}

#[derive(Debug, Args)]
pub struct SpecArgs {
    /// Weight description file (key=value lines).
    #[arg(long)]
    pub spec: PathBuf,
    /// Tolerance for adaptive Stieltjes transforms.
    #[arg(long, default_value_t = opke::DEFAULT_TOL)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct RecurrenceArgs {
    /// Weight description file (key=value lines).
    #[arg(long)]
    pub spec: PathBuf,
    /// Number of rows.
    #[arg(long)]
    pub n: usize,
}

#[derive(Debug, Args)]
pub struct RatioArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Ensemble size.
    #[arg(long)]
    pub n: usize,
    /// Numerator shifts, comma-separated complex tokens (`0`, `0.5+1j`).
    #[arg(long, allow_hyphen_values = true)]
    pub alphas: String,
    /// Denominator shifts, non-real.
    #[arg(long, allow_hyphen_values = true)]
    pub betas: String,
}

#[derive(Debug, Args)]
pub struct ConvergeArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Bulk point.
    #[arg(long, allow_hyphen_values = true)]
    pub x: f64,
    /// Real numerator shifts.
    #[arg(long, allow_hyphen_values = true)]
    pub alphas: String,
    /// Non-real denominator shifts.
    #[arg(long, allow_hyphen_values = true)]
    pub betas: String,
    /// Orders n, comma-separated.
    #[arg(long)]
    pub n_list: String,
    /// Report file.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct KernelConvergeArgs {
    /// Weight description file (key=value lines).
    #[arg(long)]
    pub spec: PathBuf,
    /// Bulk point.
    #[arg(long, allow_hyphen_values = true)]
    pub x: f64,
    /// `a:b` pairs, comma-separated.
    #[arg(long, allow_hyphen_values = true)]
    pub pairs: String,
    /// Orders n, comma-separated.
    #[arg(long)]
    pub n_list: String,
    /// Report file.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Ensemble size.
    #[arg(long)]
    pub n: usize,
    /// Numerator shifts.
    #[arg(long, allow_hyphen_values = true)]
    pub alphas: String,
    /// Denominator shifts, non-real.
    #[arg(long, allow_hyphen_values = true)]
    pub betas: String,
    /// Also run a Metropolis chain of this many sweeps.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Chain seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let sink: &mut dyn Write = if code == 0 { out } else { err };
            let _ = write!(sink, "{}", e.render());
            return if code == 0 { crate::EXIT_OK } else { crate::EXIT_USAGE };
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => crate::EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Recurrence(a) => cmd_recurrence(&a, out),
        Command::Ratio(a) => cmd_ratio(&a, out),
        Command::Converge(a) => cmd_converge(&a, out),
        Command::KernelConverge(a) => cmd_kernel_converge(&a, out),
        Command::Oracle(a) => cmd_oracle(&a, out),
        Command::CauchyConverge(a) => cmd_cauchy_converge(&a, out),
    }
}

fn load_spec(path: &Path) -> Result<WeightSpec> {
    Ok(WeightSpec::from_file(path)?)
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0) {
        return Err(CliError::Usage(format!("--tol must be positive, got {tol}")));
    }
    Ok(())
}

/// Sweeps run on a pool of `OPKE_THREADS` workers when set.
fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("OPKE_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Usage(format!("OPKE_THREADS must be a positive integer, got {v:?}")))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))
}

pub fn cmd_recurrence(a: &RecurrenceArgs, out: &mut dyn Write) -> Result<()> {
    let spec = load_spec(&a.spec)?;
    writeln!(out, "k,a_k,b_k,gamma_k")?;
    if a.n == 0 {
        return Ok(());
    }
    let rec = recurrence(&spec, a.n + 1)?;
    for k in 1..=a.n {
        let gamma = rec.leading_coeff(k)?;
        writeln!(out, "{k},{},{},{}", sci(rec.a()[k - 1]), sci(rec.b()[k - 1]), sci(gamma))?;
    }
    Ok(())
}

/// Fixed 12-decimal form without a sign on zero.
fn fixed(x: f64) -> String {
    let s = format!("{x:.12}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

fn query(alphas: &str, betas: &str) -> Result<RatioQuery> {
    Ok(RatioQuery::new(parse::complex_list(alphas)?, parse::complex_list(betas)?)?)
}

fn real_query(alphas: &str, betas: &str) -> Result<RatioQuery> {
    Ok(RatioQuery::with_real_alphas(&parse::real_list(alphas)?, parse::complex_list(betas)?)?)
}

fn context(spec: &WeightSpec, n: usize, tol: f64) -> Result<TwoPointContext> {
    Ok(TwoPointContext::for_spec(spec.clone(), n)?.with_tol(tol)?)
}

pub fn cmd_ratio(a: &RatioArgs, out: &mut dyn Write) -> Result<()> {
    check_tol(a.spec.tol)?;
    let spec = load_spec(&a.spec.spec)?;
    let q = query(&a.alphas, &a.betas)?;
    let v = ratio_average(&context(&spec, a.n, a.spec.tol)?, &q)?;
    writeln!(out, "{} {}", fixed(v.re), fixed(v.im))?;
    Ok(())
}

fn fmt_complex(z: Complex64) -> String {
    format!("{} {}", sci(z.re), sci(z.im))
}

pub fn cmd_oracle(a: &OracleArgs, out: &mut dyn Write) -> Result<()> {
    check_tol(a.spec.tol)?;
    let spec = load_spec(&a.spec.spec)?;
    let q = query(&a.alphas, &a.betas)?;
    let formula = ratio_average(&context(&spec, a.n, a.spec.tol)?, &q)?;
    writeln!(out, "formula {}", fmt_complex(formula))?;

    let mut failures = Vec::new();
    if a.n <= BRUTE_MAX_N || a.steps.is_none() {
        let m = ORACLE_NODES.max(a.n + q.k());
        let brute = brute_ratio_average(&spec, a.n, &q, m)?;
        let rel = (formula - brute).norm() / brute.norm();
        writeln!(out, "brute {}", fmt_complex(brute))?;
        writeln!(out, "discrepancy {}", sci(rel))?;
        if !(rel <= ORACLE_RTOL) {
            failures.push(format!(
                "formula {formula} and brute force {brute} differ by {rel:e} (relative), above {ORACLE_RTOL:e}"
            ));
        }
    }
    if let Some(steps) = a.steps {
        let est = mcmc_ratio_average(&spec, a.n, &q, steps, a.seed)?;
        let dev = (est.estimate - formula).norm();
        writeln!(out, "mcmc {}", fmt_complex(est.estimate))?;
        writeln!(out, "mcmc_stderr {}", sci(est.stderr))?;
        writeln!(out, "mcmc_acceptance {:.4}", est.acceptance_rate)?;
        if !(dev <= MCMC_SIGMAS * est.stderr) {
            failures.push(format!(
                "Metropolis estimate {} is {:.1} standard errors from the formula {formula}",
                est.estimate,
                dev / est.stderr
            ));
        }
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::CheckFailed(failures.join("; ")))
    }
}

/// Compact label for a shift, without commas.
fn label(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else {
        format!("{}{:+}j", z.re, z.im)
    }
}

fn timestamp() -> String {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs().to_string()).unwrap_or_default()
}

struct Sweep<'a> {
    command: &'static str,
    spec: &'a WeightSpec,
    x: f64,
    query: String,
    tol: Option<f64>,
    ns: Vec<usize>,
    out_path: &'a Path,
}

impl Sweep<'_> {
    /// Evaluates `row_at` for every `n` concurrently, writes the report in
    /// `n` order and prints a summary. A failing `n` truncates the report,
    /// which is still written with `status=incomplete`.
    fn run<F>(&self, row_at: F, out: &mut dyn Write) -> Result<()>
    where
        F: Fn(usize) -> Result<Vec<Row>> + Sync,
    {
        let pool = thread_pool()?;
        let results: Vec<Result<Vec<Row>>> = pool.install(|| self.ns.par_iter().map(|&n| row_at(n)).collect());

        let mut report = ConvergenceReport::default();
        report.set_meta("command", self.command);
        report.set_meta("spec", self.spec.to_string());
        report.set_meta("spec_sha256", sha256_hex(&self.spec.to_string()));
        report.set_meta("x", format!("{}", self.x));
        report.set_meta("query", &self.query);
        if let Some(tol) = self.tol {
            report.set_meta("tol", format!("{tol:e}"));
        }
        report.set_meta("timestamp", timestamp());
        report.set_meta("version", concat!("opke ", env!("CARGO_PKG_VERSION")));

        let mut failure = None;
        for (n, r) in self.ns.iter().zip(results) {
            match r {
                Ok(rows) => report.rows.extend(rows),
                Err(e) => {
                    failure = Some((*n, e));
                    break;
                }
            }
        }
        report.set_meta("status", if failure.is_some() { "incomplete" } else { "complete" });
        report.sort();
        std::fs::write(self.out_path, report.render())?;

        if let Some((n, e)) = failure {
            return Err(CliError::Incomplete { n, path: self.out_path.display().to_string(), source: Box::new(e) });
        }
        summarize(&report, out)
    }
}

fn summarize(report: &ConvergenceReport, out: &mut dyn Write) -> Result<()> {
    let mut cases: Vec<&str> = Vec::new();
    for r in &report.rows {
        if !cases.contains(&r.case.as_str()) {
            cases.push(&r.case);
        }
    }
    for case in cases {
        let rows: Vec<&Row> = report.rows.iter().filter(|r| r.case == case).collect();
        let last = rows.last().expect("case has rows");
        let ratios: Vec<String> = rows
            .windows(2)
            .map(|w| {
                let (a, b) = (w[0].abs_error(), w[1].abs_error());
                if b > 0.0 {
                    format!("{:.3}", a / b)
                } else {
                    "inf".to_string()
                }
            })
            .collect();
        writeln!(
            out,
            "case {case}: final n = {} abs_error = {}; error ratio per step: {}",
            last.n,
            sci(last.abs_error()),
            if ratios.is_empty() { "-".to_string() } else { ratios.join(", ") }
        )?;
    }
    Ok(())
}

pub fn cmd_converge(a: &ConvergeArgs, out: &mut dyn Write) -> Result<()> {
    check_tol(a.spec.tol)?;
    let spec = load_spec(&a.spec.spec)?;
    let q = real_query(&a.alphas, &a.betas)?;
    let limit = limit_ratio_average(&q)?;
    let sweep = Sweep {
        command: "converge",
        spec: &spec,
        x: a.x,
        query: format!("alphas={};betas={}", a.alphas, a.betas),
        tol: Some(a.spec.tol),
        ns: parse::n_list(&a.n_list)?,
        out_path: &a.out,
    };
    sweep.run(
        |n| {
            let v = scaled_ratio_average(&context(&spec, n, a.spec.tol)?, a.x, &q)?;
            Ok(vec![Row { case: "ratio".into(), n, value: v, limit }])
        },
        out,
    )
}

pub fn cmd_kernel_converge(a: &KernelConvergeArgs, out: &mut dyn Write) -> Result<()> {
    let spec = load_spec(&a.spec)?;
    let pairs = parse::pairs(&a.pairs)?;
    let sweep = Sweep {
        command: "kernel-converge",
        spec: &spec,
        x: a.x,
        query: format!("pairs={}", a.pairs),
        tol: None,
        ns: parse::n_list(&a.n_list)?,
        out_path: &a.out,
    };
    sweep.run(
        |n| {
            let ev = KernelEvaluator::new(spec.clone(), n)?;
            pairs
                .iter()
                .map(|&(p, q)| {
                    Ok(Row {
                        case: format!("{}:{}", label(p), label(q)),
                        n,
                        value: ev.scaled_kernel(a.x, p, q)?,
                        limit: sinc_kernel(p, q),
                    })
                })
                .collect()
        },
        out,
    )
}

pub fn cmd_cauchy_converge(a: &ConvergeArgs, out: &mut dyn Write) -> Result<()> {
    check_tol(a.spec.tol)?;
    let spec = load_spec(&a.spec.spec)?;
    let alphas = parse::real_list(&a.alphas)?;
    let betas = parse::complex_list(&a.betas)?;
    if alphas.len() != betas.len() || alphas.is_empty() {
        return Err(CliError::Usage(format!(
            "need matching non-empty α and β lists ({} vs {})",
            alphas.len(),
            betas.len()
        )));
    }
    let limits = alphas.iter().zip(&betas).map(|(&al, &be)| cauchy_limit(al, be)).collect::<opke::Result<Vec<_>>>()?;
    let sweep = Sweep {
        command: "cauchy-converge",
        spec: &spec,
        x: a.x,
        query: format!("alphas={};betas={}", a.alphas, a.betas),
        tol: Some(a.spec.tol),
        ns: parse::n_list(&a.n_list)?,
        out_path: &a.out,
    };
    sweep.run(
        |n| {
            let ctx = context(&spec, n, a.spec.tol)?;
            alphas
                .iter()
                .zip(&betas)
                .zip(&limits)
                .map(|((&al, &be), &limit)| {
                    Ok(Row {
                        case: format!("{}:{}", label(Complex64::new(al, 0.0)), label(be)),
                        n,
                        value: ctx.scaled_cauchy(a.x, al, be)?,
                        limit,
                    })
                })
                .collect()
        },
        out,
    )
}
