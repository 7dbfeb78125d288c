//! `gkrein`: compound matrices, total nonnegativity checks and second-eigenvalue
//! reports from the command line.
//!
//! Exit codes: 0 success, 1 verdict failure, 2 input error, 3 numerical failure.

mod render;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use gkrein_core::compound::{compound_matrix_with, SizeCap};
use gkrein_core::gk::{analyze_with, verify_batch, AnalyzeOptions, GKReport, Theorem};
use gkrein_core::io::{matrix_to_csv, parse_matrix, parse_tabulated};
use gkrein_core::kernel::{discretize, kernel_tn_check, KernelSpec, QuadratureRule};
use gkrein_core::positivity::{
    is_totally_nonnegative_with, random_general, random_oscillatory, random_tn, TNCertificate,
    TnOptions,
};
use gkrein_core::{DenseMatrix, Error};

#[derive(Parser, Debug)]
#[command(
    name = "gkrein",
    version,
    about = "Second-eigenvalue analysis for nonnegative matrices and kernels"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Numerical tolerance.
    #[arg(long, global = true, default_value_t = gkrein_core::spectra::DEFAULT_TOL, value_parser = positive)]
    tol: f64,
    /// Ignore size caps on dense compound and tensor matrices.
    #[arg(long, global = true)]
    force: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Rule {
    Midpoint,
    Trapezoid,
}

impl From<Rule> for QuadratureRule {
    fn from(r: Rule) -> Self {
        match r {
            Rule::Midpoint => QuadratureRule::Midpoint,
            Rule::Trapezoid => QuadratureRule::Trapezoid,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Second-eigenvalue report for a matrix file (CSV or JSON).
    Analyze {
        #[arg(value_parser = existing)]
        file: PathBuf,
    },
    /// j-th compound matrix.
    Compound {
        #[arg(value_parser = existing)]
        file: PathBuf,
        #[arg(long)]
        order: usize,
    },
    /// Checks that all minors of orders 1..=k are nonnegative; exits 1 otherwise.
    TnCheck {
        #[arg(value_parser = existing)]
        file: PathBuf,
        #[arg(long)]
        order: usize,
        /// Sample this many minors for any order too large to enumerate.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Discretizes a kernel, checks its order-1 and order-2 determinants and analyzes the grid.
    Kernel {
        /// Builtin kernel: green_string, gaussian, cauchy, constant, cosine.
        #[arg(long, conflicts_with = "file", required_unless_present = "file")]
        name: Option<String>,
        /// Parameter of the builtin (sigma for gaussian, frequency for cosine).
        #[arg(long, requires = "name")]
        param: Option<f64>,
        /// Tabulated kernel (CSV on uniform midpoint nodes, or JSON with nodes).
        #[arg(long, value_parser = existing)]
        file: Option<PathBuf>,
        /// Grid size; defaults to 200 for builtins and the table size for files.
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long, value_enum, default_value_t = Rule::Midpoint)]
        rule: Rule,
        /// Random determinants drawn per order.
        #[arg(long, default_value_t = 500)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Points of the sampling grid for the determinant check.
        #[arg(long, default_value_t = 64)]
        sample_nodes: usize,
    },
    /// Seeded random matrix as CSV (JSON with --format json).
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        /// Bidiagonal factors for the totally nonnegative generator (default 2n).
        #[arg(long, conflicts_with_all = ["oscillatory", "general"])]
        factors: Option<usize>,
        #[arg(long, conflicts_with = "general")]
        oscillatory: bool,
        /// Uniform entries in [-1, 1] instead of a totally nonnegative matrix.
        #[arg(long)]
        general: bool,
    },
    /// Checks a product-spectrum identity on seeded random matrices; exits 1 on any mismatch.
    Verify {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        theorem: u8,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(format!("expected a positive number, got {s:?}")),
    }
}

fn existing(s: &str) -> Result<PathBuf, String> {
    let p = PathBuf::from(s);
    if p.is_file() {
        Ok(p)
    } else {
        Err(format!("no such file: {s}"))
    }
}

/// A failed run: exit code plus message for stderr.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Validation(_)
            | Error::Resource { .. }
            | Error::Precondition(_)
            | Error::Format(_) => 2,
            Error::NoConvergence { .. }
            | Error::DegeneratePerron { .. }
            | Error::NoNonnegativeEigenvector { .. }
            | Error::ZeroVector { .. }
            | Error::Generation(_)
            | Error::Inconsistent(_) => 3,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn input_error(message: String) -> Failure {
    Failure { code: 2, message }
}

/// What a subcommand produced: the report, optional CSV for text mode, and the exit code.
struct Output {
    report: Value,
    csv: Option<String>,
    code: u8,
}

impl Output {
    fn report<T: Serialize>(r: &T) -> Self {
        Output {
            report: to_value(r),
            csv: None,
            code: 0,
        }
    }
}

fn to_value<T: Serialize>(r: &T) -> Value {
    serde_json::to_value(r).expect("reports contain only finite numbers and string keys")
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn load_matrix(path: &Path) -> Result<DenseMatrix, Failure> {
    parse_matrix(&read(path)?).map_err(|e| {
        let f = Failure::from(e);
        Failure {
            message: format!("{}: {}", path.display(), f.message),
            ..f
        }
    })
}

fn cap(g: &Global) -> SizeCap {
    if g.force {
        SizeCap::forced()
    } else {
        SizeCap::default()
    }
}

fn analyze_options(g: &Global) -> AnalyzeOptions {
    AnalyzeOptions {
        cap: cap(g),
        ..AnalyzeOptions::with_tol(g.tol)
    }
}

#[derive(Serialize)]
struct KernelReport {
    kernel: KernelSpec,
    grid: usize,
    rule: QuadratureRule,
    symmetric: bool,
    determinants_order1: TNCertificate,
    determinants_order2: TNCertificate,
    analysis: GKReport,
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    let g = &cli.global;
    match &cli.command {
        Command::Analyze { file } => {
            let m = load_matrix(file)?;
            Ok(Output::report(&analyze_with(&m, &analyze_options(g))?))
        }
        Command::Compound { file, order } => {
            let m = load_matrix(file)?;
            let c = compound_matrix_with(&m, *order, cap(g))?;
            Ok(Output {
                report: json!({ "order": order, "n": m.n(), "data": c.to_rows() }),
                csv: Some(matrix_to_csv(&c)),
                code: 0,
            })
        }
        Command::TnCheck {
            file,
            order,
            samples,
            seed,
        } => {
            let m = load_matrix(file)?;
            let opts = match samples {
                Some(s) => TnOptions::with_sampling(*s, *seed),
                None => TnOptions::default(),
            };
            let cert = is_totally_nonnegative_with(&m, *order, g.tol, opts)?;
            let code = if cert.verdict { 0 } else { 1 };
            Ok(Output {
                code,
                ..Output::report(&cert)
            })
        }
        Command::Kernel {
            name,
            param,
            file,
            grid,
            rule,
            trials,
            seed,
            sample_nodes,
        } => {
            let spec = match (name, file) {
                (Some(name), _) => KernelSpec::builtin(name, *param)?,
                (None, Some(path)) => KernelSpec::tabulated(parse_tabulated(&read(path)?)?),
                (None, None) => unreachable!("clap requires --name or --file"),
            };
            let grid = match (&spec, grid) {
                (_, Some(n)) => *n,
                (KernelSpec::Tabulated { table }, None) => table.nodes().len(),
                (KernelSpec::Builtin { .. }, None) => 200,
            };
            let discretized = discretize(&spec, grid, (*rule).into())?;
            let report = KernelReport {
                symmetric: spec.is_symmetric(),
                determinants_order1: kernel_tn_check(
                    &spec,
                    *sample_nodes,
                    1,
                    *trials,
                    *seed,
                    g.tol,
                )?,
                determinants_order2: kernel_tn_check(
                    &spec,
                    *sample_nodes,
                    2,
                    *trials,
                    *seed,
                    g.tol,
                )?,
                analysis: analyze_with(&discretized.nystrom(), &analyze_options(g))?,
                kernel: spec,
                grid,
                rule: (*rule).into(),
            };
            Ok(Output::report(&report))
        }
        Command::Generate {
            n,
            seed,
            factors,
            oscillatory,
            general,
        } => {
            let m = if *oscillatory {
                random_oscillatory(*n, *seed)?
            } else if *general {
                random_general(*n, *seed)?
            } else {
                random_tn(*n, *seed, factors.unwrap_or(2 * n))?
            };
            Ok(Output {
                csv: Some(matrix_to_csv(&m)),
                ..Output::report(&m)
            })
        }
        Command::Verify {
            theorem,
            n,
            trials,
            seed,
        } => {
            let theorem = Theorem::from_number(*theorem)?;
            let batch = verify_batch(theorem, *n, *trials, *seed, g.tol, cap(g))?;
            let code = if batch.all_matched { 0 } else { 1 };
            Ok(Output {
                code,
                ..Output::report(&batch)
            })
        }
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| input_error(format!("{}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|o| {
        let text = match (cli.global.format, o.csv) {
            (Format::Json, _) => {
                let mut s = serde_json::to_string_pretty(&o.report).expect("serializable");
                s.push('\n');
                s
            }
            (Format::Text, Some(csv)) => csv,
            (Format::Text, None) => render::text(&o.report),
        };
        emit(&text, cli.global.out.as_deref()).map(|_| o.code)
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
