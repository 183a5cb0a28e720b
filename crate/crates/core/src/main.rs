use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use qheis::braiding::{braid_composition, braid_grid, BraidReport};
use qheis::harness::{emit_orbits, emit_report, parse_space, run_suite, write_atomic, RunConfig, Suite};

#[derive(Parser)]
#[command(name = "qheis", version, about = "Property checks for the quantum Heisenberg group toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run property suites and write a JSON report.
    Verify {
        /// groups, dressing, algebra, representations, braiding or all; repeatable.
        #[arg(long = "suite", default_value = "all")]
        suites: Vec<String>,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        lambda: f64,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 256)]
        grid_n: usize,
        #[arg(long, default_value_t = 8.0)]
        grid_l: f64,
        /// Grid-check budget; per-check tolerances scale with it.
        #[arg(long, default_value_t = qheis::harness::DEFAULT_TOL_GRID)]
        tol: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Record wall time in the report.
        #[arg(long)]
        timing: bool,
        /// Report path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write dressed orbit samples as CSV.
    Orbits {
        /// G, Gt, H or Ht.
        #[arg(long)]
        space: String,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        lambda: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Double braid of two Schrödinger-type representations.
    Braid {
        #[arg(long, allow_negative_numbers = true)]
        r: f64,
        #[arg(long = "r-prime", allow_negative_numbers = true)]
        r_prime: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        lambda: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("QHEIS_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().with_context(|| format!("QHEIS_THREADS={v} is not a count"))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn write_or_print(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => write_atomic(p, text.as_bytes())?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    configure_threads()?;
    match cli.cmd {
        Cmd::Verify {
            suites,
            lambda,
            n,
            grid_n,
            grid_l,
            tol,
            seed,
            timing,
            out,
        } => {
            let mut list = Vec::new();
            for s in &suites {
                list.extend(Suite::parse_list(s)?);
            }
            let config = RunConfig {
                lambda,
                n,
                grid_n,
                grid_l,
                tol_grid: tol,
                seed,
                suites: list,
                timing,
                out: out.clone(),
                ..RunConfig::default()
            };
            let report = run_suite(&config)?;
            match &out {
                Some(p) => emit_report(&report, p)?,
                None => print!("{}", report.to_json()?),
            }
            for c in report.checks.iter().filter(|c| !c.pass) {
                eprintln!("FAIL {} residual={:e} tol={:e}", c.name, c.residual, c.tol);
            }
            eprintln!("{} passed, {} failed", report.summary.passed, report.summary.failed);
            Ok(report.all_passed())
        }
        Cmd::Orbits {
            space,
            count,
            lambda,
            seed,
            out,
        } => {
            emit_orbits(parse_space(&space)?, count, lambda, seed, &out)?;
            Ok(true)
        }
        Cmd::Braid { r, r_prime, lambda, out } => {
            let report: BraidReport = braid_composition(lambda, r, r_prime, braid_grid(), None)?;
            let mut text = serde_json::to_string_pretty(&report)?;
            text.push('\n');
            write_or_print(out.as_ref(), &text)?;
            Ok(report.passes(1e-6, None))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
