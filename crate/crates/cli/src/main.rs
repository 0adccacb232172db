use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use rankin_core::bounds::{divisor_leading_coefficient, fit_exponent, MU_HUXLEY};
use rankin_core::coefficients::{oracle_tau_eisenstein_with_limit, CoefficientSource};
use rankin_core::error_terms::{
    delta_sensitivity, error_term_sample, estimate_c, DivisorSummatory, Method,
};
use rankin_core::export::{write_csv, write_json_lines};
use rankin_core::persist::{import_external_tau, load_table, save_table};
use rankin_core::short_interval::{interval_mean_square, sweep};
use rankin_core::voronoi::{evaluate, truncation_scan};
use rankin_core::{CoefficientTable, Error};

#[derive(Parser)]
#[command(
    name = "rankin",
    version,
    about = "Exact experiments on the Rankin-Selberg error term"
)]
struct Cli {
    /// Table cache file; read if present, written after a fresh build.
    #[arg(long, global = true)]
    cache: Option<PathBuf>,

    /// Table size to sieve when no usable cache exists.
    #[arg(long, global = true, default_value_t = 200_000)]
    nmax: usize,

    /// Build the table from an external "n tau(n)" text file instead of sieving.
    #[arg(long, global = true, conflicts_with = "cache")]
    tau_file: Option<PathBuf>,

    /// Worker threads for parallel stages.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build (and cache) the coefficient table.
    Sieve {
        /// Cross-check the sieve against the Eisenstein oracle up to M.
        #[arg(long, value_name = "M")]
        oracle_check: Option<usize>,
    },
    /// Print Δ(x).
    Delta {
        #[arg(long)]
        x: f64,
        #[arg(long)]
        c: Option<f64>,
    },
    /// Estimate the mean constant C.
    EstimateC {
        #[arg(long, value_enum, default_value_t = MethodArg::Both)]
        method: MethodArg,
    },
    /// Truncated Voronoi expansion at x, or its truncation-error scan.
    Voronoi {
        #[arg(long)]
        x: f64,
        #[arg(long)]
        kmax: usize,
        /// Scan K = 16, 64, 256, ... up to kmax and fit the error decay.
        #[arg(long)]
        scan: bool,
        #[arg(long)]
        c: Option<f64>,
    },
    /// Mean squares of Δ(x+U) − Δ(x) over [X, 2X].
    Meansquare {
        #[arg(long)]
        x: u64,
        #[arg(long)]
        u: f64,
        /// Allow non-integer U.
        #[arg(long)]
        real_u: bool,
        #[arg(long, value_parser = parse_mu, default_value = "0")]
        mu: f64,
        #[arg(long)]
        c: Option<f64>,
    },
    /// Mean squares over a grid of X and U = X^u.
    Sweep {
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        x_list: Vec<u64>,
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true, value_parser = parse_fraction)]
        u_exp_list: Vec<f64>,
        /// μ(½) bound used by the envelopes: 0 or 32/205 (or any value in [0, 1/2)).
        #[arg(long, value_parser = parse_mu, default_value = "0")]
        mu: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        c: Option<f64>,
    },
    /// Log-log fit of two columns of a CSV file.
    Fit {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        xcol: String,
        #[arg(long)]
        ycol: String,
    },
    /// Cubic fit of the divisor-problem short-interval mean square.
    DivisorBaseline {
        #[arg(long)]
        x: u64,
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        u_list: Vec<u64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Lsq,
    Diffquot,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn parse_fraction(s: &str) -> Result<f64, String> {
    let v = match s.split_once('/') {
        Some((n, d)) => {
            let n: f64 = n
                .trim()
                .parse()
                .map_err(|_| format!("bad numerator in {s:?}"))?;
            let d: f64 = d
                .trim()
                .parse()
                .map_err(|_| format!("bad denominator in {s:?}"))?;
            n / d
        }
        None => s
            .trim()
            .parse()
            .map_err(|_| format!("{s:?} is not a number"))?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{s:?} is not finite"))
    }
}

fn parse_mu(s: &str) -> Result<f64, String> {
    if s.trim() == "32/205" {
        return Ok(MU_HUXLEY);
    }
    parse_fraction(s)
}

/// A failure after argument parsing; `Usage` maps to exit code 2.
enum Failure {
    Usage(String),
    Compute(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Compute(Error::Io(e))
    }
}

fn obtain_table(cli: &Cli) -> Result<CoefficientTable, Failure> {
    if let Some(path) = &cli.tau_file {
        return Ok(import_external_tau(path)?);
    }
    if let Some(path) = &cli.cache {
        if path.exists() {
            let table = load_table(path)?;
            if table.n_max() >= cli.nmax {
                return Ok(table);
            }
        }
    }
    let table = CoefficientTable::build(cli.nmax)?;
    if let Some(path) = &cli.cache {
        save_table(path, &table)?;
    }
    Ok(table)
}

fn mean_constant(table: &CoefficientTable, given: Option<f64>) -> Result<f64, Failure> {
    match given {
        Some(c) => Ok(c),
        None => Ok(estimate_c(table, Method::LeastSquares)?.value),
    }
}

fn emit(out: &mut impl Write, record: &impl Serialize) -> Result<(), Failure> {
    let line = serde_json::to_string(record).map_err(|e| Failure::Usage(e.to_string()))?;
    writeln!(out, "{line}")?;
    Ok(())
}

#[derive(Serialize)]
struct SieveSummary {
    n_max: usize,
    kappa: u32,
    tau_n_max: String,
    c_partial_sum: f64,
    oracle_checked_to: Option<usize>,
}

#[derive(Serialize)]
struct DeltaRecord {
    x: f64,
    c: f64,
    c_uncertainty: f64,
    delta: f64,
    /// Shift of Δ(x) caused by moving C by its uncertainty.
    delta_uncertainty: f64,
    normalized: f64,
}

fn run(cli: &Cli, out: &mut impl Write) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    match &cli.command {
        Command::Sieve { oracle_check } => {
            let table = obtain_table(cli)?;
            if let Some(m) = *oracle_check {
                if m > table.n_max() {
                    return Err(Failure::Usage(format!(
                        "--oracle-check {m} exceeds the table size {}",
                        table.n_max()
                    )));
                }
                let oracle = oracle_tau_eisenstein_with_limit(m, m.max(1))?;
                if let Some(n) = (1..=m).find(|&n| oracle[n] != table.tau()[n]) {
                    return Err(Failure::Compute(Error::CrossCheck {
                        n,
                        imported: table.tau()[n],
                        sieved: oracle[n],
                    }));
                }
            }
            emit(
                out,
                &SieveSummary {
                    n_max: table.n_max(),
                    kappa: table.kappa(),
                    tau_n_max: table.tau()[table.n_max()].to_string(),
                    c_partial_sum: table.partial_sum(table.n_max()),
                    oracle_checked_to: *oracle_check,
                },
            )
        }
        Command::Delta { x, c } => {
            let table = obtain_table(cli)?;
            let (c, c_uncertainty) = match c {
                Some(c) => (*c, 0.0),
                None => {
                    let e = estimate_c(&table, Method::LeastSquares)?;
                    (e.value, e.uncertainty)
                }
            };
            let s = error_term_sample(*x, c, &table)?;
            emit(
                out,
                &DeltaRecord {
                    x: s.x,
                    c,
                    c_uncertainty,
                    delta: s.delta,
                    delta_uncertainty: delta_sensitivity(s.x, c_uncertainty).abs(),
                    normalized: s.normalized,
                },
            )
        }
        Command::EstimateC { method } => {
            let table = obtain_table(cli)?;
            let methods: &[Method] = match method {
                MethodArg::Lsq => &[Method::LeastSquares],
                MethodArg::Diffquot => &[Method::DifferenceQuotient],
                MethodArg::Both => &[Method::LeastSquares, Method::DifferenceQuotient],
            };
            for &m in methods {
                emit(out, &estimate_c(&table, m)?)?;
            }
            Ok(())
        }
        Command::Voronoi { x, kmax, scan, c } => {
            let table = obtain_table(cli)?;
            let c = mean_constant(&table, *c)?;
            if *scan {
                let ks: Vec<usize> = std::iter::successors(Some(16usize), |k| Some(k * 4))
                    .take_while(|k| k <= kmax)
                    .collect();
                if ks.len() < 3 {
                    return Err(Failure::Usage(format!(
                        "--scan needs --kmax >= 256 to fit three K values, got {kmax}"
                    )));
                }
                for fit in truncation_scan(&[*x], &ks, &table, c)? {
                    emit(out, &fit)?;
                }
                Ok(())
            } else {
                emit(out, &evaluate(*x, *kmax, c, &table)?)
            }
        }
        Command::Meansquare {
            x,
            u,
            real_u,
            mu,
            c,
        } => {
            if !real_u && u.fract() != 0.0 {
                return Err(Failure::Usage(format!(
                    "U = {u} is not an integer; pass --real-u for real windows"
                )));
            }
            let table = obtain_table(cli)?;
            let c = mean_constant(&table, *c)?;
            emit(out, &interval_mean_square(*x, *u, c, *mu, &table)?)
        }
        Command::Sweep {
            x_list,
            u_exp_list,
            mu,
            format,
            c,
        } => {
            let table = obtain_table(cli)?;
            let c = mean_constant(&table, *c)?;
            let report = sweep(x_list, u_exp_list, c, *mu, &table)?;
            for s in &report.skipped {
                eprintln!(
                    "warning: skipped X = {}, u = {}: {}",
                    s.x, s.u_exp, s.reason
                );
            }
            match format {
                Format::Csv => write_csv(&mut *out, &report.cells)?,
                Format::Json => write_json_lines(&mut *out, &report.cells)?,
            }
            Ok(())
        }
        Command::Fit { input, xcol, ycol } => {
            let mut reader = csv::Reader::from_path(input).map_err(csv_failure)?;
            let headers = reader.headers().map_err(csv_failure)?.clone();
            let find = |name: &str| {
                headers.iter().position(|h| h == name).ok_or_else(|| {
                    Failure::Usage(format!("column {name:?} not found in {input:?}"))
                })
            };
            let (ix, iy) = (find(xcol)?, find(ycol)?);
            let mut points = Vec::new();
            for (i, record) in reader.records().enumerate() {
                let record = record.map_err(csv_failure)?;
                let get = |j: usize| -> Result<f64, Failure> {
                    record
                        .get(j)
                        .and_then(|v| v.trim().parse().ok())
                        .ok_or_else(|| {
                            Failure::Compute(Error::Format {
                                line: i + 2,
                                msg: format!(
                                    "column {} is not a number",
                                    headers.get(j).unwrap_or("?")
                                ),
                            })
                        })
                };
                points.push((get(ix)?, get(iy)?));
            }
            emit(out, &fit_exponent(&points)?)
        }
        Command::DivisorBaseline { x, u_list } => {
            let top = u_list.iter().copied().max().unwrap_or(0);
            let needed = x
                .checked_mul(2)
                .and_then(|v| v.checked_add(top))
                .ok_or_else(|| Failure::Usage(format!("X = {x} is too large")))?;
            let divisors = DivisorSummatory::new(needed as usize);
            emit(out, &divisor_leading_coefficient(*x, u_list, &divisors)?)
        }
    }
}

fn csv_failure(e: csv::Error) -> Failure {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Failure::Compute(Error::Io(io)),
        other => Failure::Compute(Error::InvalidArgument(format!("csv: {other:?}"))),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let result = run(&cli, &mut out);
    let flushed = out.flush();
    match result {
        Ok(()) if flushed.is_ok() => ExitCode::SUCCESS,
        Ok(()) => {
            eprintln!("error: {}", flushed.unwrap_err());
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
