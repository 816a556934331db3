mod bench;
mod instance;

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use mwelect::diagnostics::{report, run_suite, Rule, RunOptions, Suite};
use mwelect::io;
use mwelect::{Arithmetic, Error, DEFAULT_ENUMERATION_CAP};

use instance::{generate, render, GenSpec, Runnable};

const EXIT_USAGE: u8 = 2;
const EXIT_VERIFY: u8 = 3;
const EXIT_CAP: u8 = 4;

#[derive(Parser)]
#[command(name = "mwelect", version, about = "Committee selection under s-Borda scores")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate an instance file.
    Gen {
        #[command(flatten)]
        spec: GenSpec,
        #[arg(long, env = "MWELECT_SEED", default_value_t = 0)]
        seed: u64,
        /// Output path; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run selection rules on an instance and write a report.
    Solve {
        #[arg(long = "in")]
        input: PathBuf,
        /// May be repeated.
        #[arg(long, required = true, value_parser = parse_rule)]
        rule: Vec<Rule>,
        #[arg(long)]
        k: usize,
        /// Defaults to the value stored in the instance, else 1.
        #[arg(long)]
        s: Option<usize>,
        #[arg(long, env = "MWELECT_SEED", default_value_t = 0)]
        seed: u64,
        /// Exact rational arithmetic; on by default below m = 2000.
        #[arg(long, conflicts_with = "float")]
        exact: bool,
        #[arg(long)]
        float: bool,
        /// Largest number of committees `opt` may enumerate.
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        opt_cap: u128,
        /// `.csv` writes CSV, anything else JSON; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run invariant batteries; exits 3 on any violation.
    Verify {
        /// May be repeated; all suites when absent.
        #[arg(long, value_parser = parse_suite)]
        suite: Vec<Suite>,
        /// Random instances per suite.
        #[arg(long, default_value_t = 100)]
        seeds: usize,
        #[arg(long, env = "MWELECT_SEED", default_value_t = 0)]
        seed: u64,
        /// JSON summary.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep a manifest and write one CSV row per (instance, seed, k, s, rule).
    Bench {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads; rayon's default when absent.
        #[arg(long)]
        jobs: Option<usize>,
    },
}

fn parse_rule(s: &str) -> std::result::Result<Rule, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_suite(s: &str) -> std::result::Result<Suite, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn emit(out: Option<&Path>, body: &str) -> Result<()> {
    match out {
        Some(p) => io::write_atomic(p, body.as_bytes()).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(body.as_bytes())?;
            Ok(())
        }
    }
}

fn is_ext(p: Option<&Path>, ext: &str) -> bool {
    p.and_then(|p| p.extension()).is_some_and(|e| e.eq_ignore_ascii_case(ext))
}

fn run(cli: Cli) -> Result<u8> {
    match cli.cmd {
        Cmd::Gen { spec, seed, out } => {
            let g = generate(&spec, seed)?;
            emit(out.as_deref(), &render(&g.profile, is_ext(out.as_deref(), "json")))?;
            Ok(0)
        }
        Cmd::Solve { input, rule, k, s, seed, exact, float, opt_cap, out } => {
            let any = io::load(&input).with_context(|| format!("loading {}", input.display()))?;
            let s = s
                .or(match &any {
                    io::AnyProfile::Explicit { s_default, .. } => *s_default,
                    _ => None,
                })
                .unwrap_or(1);
            let arithmetic = match (exact, float) {
                (true, _) => Arithmetic::Exact,
                (_, true) => Arithmetic::Float,
                _ => Arithmetic::auto(any.m()),
            };
            let r = Runnable::from_any(any)?;
            let opts = RunOptions { seed, arithmetic, enumeration_cap: opt_cap };
            let name = input.file_stem().map(|x| x.to_string_lossy().into_owned()).unwrap_or_default();
            let rep = report(&name, r.electorate(), &rule, k, s, &opts)?;
            let body = if is_ext(out.as_deref(), "csv") { rep.to_csv() } else { rep.to_json() + "\n" };
            emit(out.as_deref(), &body)?;
            Ok(0)
        }
        Cmd::Verify { suite, seeds, seed, out } => {
            let suites = if suite.is_empty() { Suite::ALL.to_vec() } else { suite };
            let mut reports = Vec::new();
            let mut ok = true;
            for s in suites {
                let r = run_suite(s, seeds, seed)?;
                for c in &r.checks {
                    let tag = if c.passed() { "PASS" } else { "FAIL" };
                    let detail = if c.detail.is_empty() { String::new() } else { format!(" ({})", c.detail) };
                    println!("{tag} [{s}] {}: {} cases, {} violations{detail}", c.name, c.cases, c.violations);
                }
                ok &= r.passed();
                reports.push(r);
            }
            if let Some(p) = out {
                emit(Some(&p), &(serde_json::to_string_pretty(&reports)? + "\n"))?;
            }
            Ok(if ok { 0 } else { EXIT_VERIFY })
        }
        Cmd::Bench { manifest, out, jobs } => {
            let mf = bench::load_manifest(&manifest)?;
            let rows = match jobs {
                Some(j) => rayon::ThreadPoolBuilder::new().num_threads(j).build()?.install(|| bench::run(&mf))?,
                None => bench::run(&mf)?,
            };
            emit(out.as_deref(), &bench::to_csv(&rows)?)?;
            Ok(0)
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::CapExceeded { .. } | Error::BudgetExceeded { .. } | Error::IterationLimit(_)) => EXIT_CAP,
        Some(Error::InvalidArgument(_) | Error::Parse { .. } | Error::InvalidProfile(_)) => EXIT_USAGE,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
