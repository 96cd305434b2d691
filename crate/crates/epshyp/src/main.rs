use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use epshyp::{io, pipeline, CliError, Config, THREADS_ENV};
use epshyp_core::verify::Report;

#[derive(Parser)]
#[command(name = "epshyp", version, about = "Builds and checks ε-hypercyclic weighted shifts")]
struct Cli {
    /// JSON config; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory, overriding the config's `out`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for target generation, the dense family and probes.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build the operator and certificate, run every suite, write report.json and checks.csv.
    Verify,
    /// Write orbit.csv with the relative distance of T^n x̄ to one target.
    Orbit {
        #[arg(long, default_value_t = 0)]
        target: usize,
        #[arg(long, default_value_t = 200)]
        n_max: u128,
    },
    /// Direct sum of a Rolewicz operator with the weighted shift.
    Product,
}

fn load(cli: &Cli) -> Result<Config, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if let Some(seed) = cli.seed {
        cfg = cfg.with_seed(seed);
    }
    if let Some(out) = &cli.out {
        cfg.out = out.clone();
    }
    Ok(cfg)
}

fn threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = v.parse().map_err(|_| CliError::Config(format!("{THREADS_ENV} must be an integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))
}

fn summarize(report: &Report) {
    for s in &report.sections {
        let asserted = s.records.iter().filter(|r| r.asserted).count();
        let failed = s.failures().count();
        println!("{:<13} {:>5} checks  {:>3} failed", s.name, asserted, failed);
        for r in s.failures() {
            eprintln!("FAIL {}/{} [{}]: {:e} vs {:e}", r.suite, r.check, r.at, r.lhs, r.rhs);
        }
    }
}

fn finish(cfg: &Config, report: &Report) -> Result<u8, CliError> {
    let (json, csv) = io::write_report(&cfg.out, report)?;
    summarize(report);
    println!("wrote {} and {}", json.display(), csv.display());
    Ok(if report.passed() { 0 } else { 1 })
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    let cfg = load(cli)?;
    threads()?;
    match cli.cmd {
        Cmd::Verify => finish(&cfg, &pipeline::verify(&cfg)?),
        Cmd::Product => finish(&cfg, &pipeline::product(&cfg)?),
        Cmd::Orbit { target, n_max } => {
            let rows = pipeline::orbit(&cfg, target, n_max)?;
            let path = cfg.out.join("orbit.csv");
            io::write_orbit(&path, &rows)?;
            let best = rows.iter().map(|r| r.relative).fold(f64::INFINITY, f64::min);
            println!("wrote {} ({} rows, min relative {best:.6})", path.display(), rows.len());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
