//! `nacopula`: evaluate, sample and fit nested Archimedean copulas from the
//! command line.
//!
//! Exit codes: 0 success, 1 other failure, 2 structure parse error,
//! 3 data value outside the open unit cube, 4 unsupported structure.

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nacopula::mle::{fit2, grid_scan, linspace};
use nacopula::oracle::selftest;
use nacopula::{log_density, sample_nested, Error, NacChild, NacTree, SampleMatrix};
use rayon::prelude::*;

#[derive(Parser)]
#[command(name = "nacopula", version, about = "Nested Archimedean copula densities, sampling and fitting")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Input CSV files have no header row, and no header is written.
    #[arg(long, global = true)]
    no_header: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct StructureArg {
    /// Structure expression, e.g. `G(1.3333; 1, G(2; 2, 3))`.
    #[arg(long)]
    structure: String,
}

#[derive(Args)]
struct DataArg {
    /// CSV file with one observation per row (`-` for standard input).
    #[arg(long)]
    data: String,
}

#[derive(Subcommand)]
enum Command {
    /// Log-density of every row of a data file.
    Logpdf {
        #[command(flatten)]
        structure: StructureArg,
        #[command(flatten)]
        data: DataArg,
    },
    /// Draw a sample (nested Gumbel or Clayton, at most two levels).
    Sample {
        #[command(flatten)]
        structure: StructureArg,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Two-parameter maximum likelihood fit (root parameter, common child parameter).
    Fit {
        #[command(flatten)]
        structure: StructureArg,
        #[command(flatten)]
        data: DataArg,
        /// Starting point `theta0,theta1` (default: the template's parameters).
        #[arg(long)]
        init: Option<String>,
    },
    /// Negative log-likelihood over a parameter grid, as CSV.
    Grid {
        #[command(flatten)]
        structure: StructureArg,
        #[command(flatten)]
        data: DataArg,
        /// `a:b:steps`
        #[arg(long)]
        theta0_grid: String,
        /// `a:b:steps`
        #[arg(long)]
        theta1_grid: String,
    },
    /// Check the evaluation routines against independent oracles.
    Selftest,
}

struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. } => 2,
            Error::Boundary { .. } | Error::Data { .. } => 3,
            Error::Unsupported(_) => 4,
            _ => 1,
        };
        Failure { code, msg: e.to_string() }
    }
}

fn other(msg: impl Into<String>) -> Failure {
    Failure { code: 1, msg: msg.into() }
}

fn io_fail(e: io::Error) -> Failure {
    other(format!("i/o error: {e}"))
}

fn parse_structure(text: &str) -> Result<NacTree, Failure> {
    nacopula::parse(text).map_err(|e| match e {
        Error::Unsupported(_) => Failure::from(e),
        other => Failure {
            code: 2,
            msg: format!("invalid structure: {other}"),
        },
    })
}

fn read_data(path: &str, header: bool) -> Result<SampleMatrix, Failure> {
    let input: Box<dyn Read> = if path == "-" {
        Box::new(io::stdin())
    } else {
        Box::new(File::open(path).map_err(|e| other(format!("cannot open {path}: {e}")))?)
    };
    let mut reader = csv::ReaderBuilder::new().has_headers(header).trim(csv::Trim::All).from_reader(input);
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| other(format!("row {row}: {e}")))?;
        let values = rec
            .iter()
            .map(|f| f.parse::<f64>().map_err(|_| other(format!("row {row}: '{f}' is not a number"))))
            .collect::<Result<Vec<f64>, _>>()?;
        rows.push(values);
    }
    Ok(SampleMatrix::from_rows(rows)?)
}

fn parse_grid(spec: &str) -> Result<Vec<f64>, Failure> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || other(format!("grid '{spec}' is not of the form a:b:steps"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let a: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let b: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let steps: usize = parts[2].trim().parse().map_err(|_| bad())?;
    Ok(linspace(a, b, steps))
}

fn template_theta(tree: &NacTree) -> [f64; 2] {
    let t0 = tree.generator().theta();
    let t1 = tree
        .children()
        .iter()
        .find_map(|c| match c {
            NacChild::Node(s) => Some(s.generator().theta()),
            NacChild::Leaf(_) => None,
        })
        .unwrap_or(t0);
    [t0, t1]
}

fn cmd_logpdf(tree: &NacTree, data: &SampleMatrix, header: bool, out: &mut dyn Write) -> Result<(), Failure> {
    let d = tree.dim();
    if data.nrows() > 0 && data.ncols() != d {
        return Err(Error::Data {
            row: 1,
            msg: format!("expected {d} columns, found {}", data.ncols()),
        }
        .into());
    }
    let rows: Vec<&[f64]> = data.rows().collect();
    let results: Vec<_> = rows.par_iter().map(|r| log_density(tree, r)).collect();
    if header {
        writeln!(out, "logpdf").map_err(io_fail)?;
    }
    for (i, r) in results.into_iter().enumerate() {
        let row = i + 1;
        let ld = r.map_err(|e| match e {
            Error::Boundary { value, .. } => Failure {
                code: 3,
                msg: format!("row {row}: value {value} is not in (0, 1)"),
            },
            other => {
                let f = Failure::from(other);
                Failure {
                    code: f.code,
                    msg: format!("row {row}: {}", f.msg),
                }
            }
        })?;
        if ld.precision_warning() {
            eprintln!(
                "warning: row {row}: estimated relative error {:.1e} (cancellation factor {:.1e})",
                ld.rel_error_estimate(),
                ld.cancellation
            );
        }
        writeln!(out, "{}", ld.value).map_err(io_fail)?;
    }
    Ok(())
}

fn cmd_sample(tree: &NacTree, n: usize, seed: u64, header: bool, out: &mut dyn Write) -> Result<(), Failure> {
    let m = sample_nested(tree, n, seed)?;
    if header {
        let names: Vec<String> = (1..=m.ncols()).map(|j| format!("u{j}")).collect();
        writeln!(out, "{}", names.join(",")).map_err(io_fail)?;
    }
    for r in m.rows() {
        let cells: Vec<String> = r.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{}", cells.join(",")).map_err(io_fail)?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| other(format!("cannot configure threads: {e}")))?;
    }
    let header = !cli.no_header;
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    match cli.command {
        Command::Logpdf { structure, data } => {
            let tree = parse_structure(&structure.structure)?;
            let data = read_data(&data.data, header)?;
            cmd_logpdf(&tree, &data, header, &mut out)?;
        }
        Command::Sample { structure, n, seed } => {
            let tree = parse_structure(&structure.structure)?;
            cmd_sample(&tree, n, seed, header, &mut out)?;
        }
        Command::Fit { structure, data, init } => {
            let tree = parse_structure(&structure.structure)?;
            let data = read_data(&data.data, header)?;
            let init = match init {
                Some(s) => {
                    let v: Vec<f64> = s
                        .split(',')
                        .map(|p| p.trim().parse::<f64>())
                        .collect::<Result<_, _>>()
                        .map_err(|_| other(format!("--init '{s}' is not of the form theta0,theta1")))?;
                    if v.len() != 2 {
                        return Err(other(format!("--init '{s}' is not of the form theta0,theta1")));
                    }
                    [v[0], v[1]]
                }
                None => template_theta(&tree),
            };
            let r = fit2(&tree, &data, init)?;
            writeln!(out, "theta0={}", r.theta_hat[0]).map_err(io_fail)?;
            writeln!(out, "theta1={}", r.theta_hat[1]).map_err(io_fail)?;
            writeln!(out, "nll={}", r.nll_min).map_err(io_fail)?;
            writeln!(out, "iterations={}", r.iterations).map_err(io_fail)?;
            writeln!(out, "converged={}", r.converged).map_err(io_fail)?;
            writeln!(out, "constraint_active={}", r.constraint_active).map_err(io_fail)?;
            if !r.converged {
                eprintln!("warning: optimizer stopped after {} iterations without converging", r.iterations);
            }
        }
        Command::Grid {
            structure,
            data,
            theta0_grid,
            theta1_grid,
        } => {
            let tree = parse_structure(&structure.structure)?;
            let g0 = parse_grid(&theta0_grid)?;
            let g1 = parse_grid(&theta1_grid)?;
            let data = read_data(&data.data, header)?;
            let scan = grid_scan(&tree, &g0, &g1, &data)?;
            scan.write_csv(&mut out, header)?;
        }
        Command::Selftest => {
            let checks = selftest();
            let mut failed = 0;
            for c in &checks {
                writeln!(out, "[{}] {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)
                    .map_err(io_fail)?;
                if !c.passed {
                    failed += 1;
                }
            }
            out.flush().map_err(io_fail)?;
            if failed > 0 {
                return Err(other(format!("{failed} of {} self checks failed", checks.len())));
            }
        }
    }
    out.flush().map_err(io_fail)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
