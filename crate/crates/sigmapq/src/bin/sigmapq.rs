//! Command-line driver for the sigmapq pipeline.
//!
//! Configuration comes from an optional JSON config file (`--config`)
//! overlaid with flags (flags win); every command emits a
//! [`sigmapq::report::PipelineReport`] as JSON or Markdown on stdout.
//! Exit codes: 0 success, 2 configuration or usage errors, 1 everything
//! else (verification failures, unresolved candidates, unexpected
//! survivors).

use clap::{Parser, Subcommand};
use num_bigint::BigUint;
use sigmapq::factor::{self, FactorDb};
use sigmapq::lattice::ReductionCase;
use sigmapq::report::{
    CertificateDto, FactorizationDto, NamedValue, OutputFormat, PipelineReport, RunConfig,
};
use sigmapq::{order, Error, Result};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "sigmapq", version, about = "Solve sigma(2^a), sigma(3^b), sigma(5^c) = p^f q^g")]
struct Cli {
    /// JSON config file; command-line flags override its fields.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Factor-table path (default: $SIGMAPQ_FACTOR_DB, else the bundled
    /// table).
    #[arg(long, global = true, value_name = "PATH")]
    db: Option<PathBuf>,

    /// Output format.
    #[arg(long, global = true, value_parser = ["json", "md"])]
    format: Option<String>,

    /// Include wall-clock timings per stage (breaks byte-for-byte report
    /// reproducibility).
    #[arg(long, global = true)]
    timings: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Recompute the global exponent bounds with certificates.
    Bounds,
    /// Run one lattice-reduction case.
    Reduce {
        #[arg(long, value_parser = ["first", "nodiv", "div"])]
        case: String,
        /// Scaling constant C (decimal integer >= 10^10; default per case).
        #[arg(long, value_name = "C")]
        scaling_c: Option<String>,
        /// Criterion weight gamma.
        #[arg(long)]
        gamma: Option<u32>,
        /// Working precision for the logarithms (decimal digits).
        #[arg(long)]
        precision: Option<u32>,
    },
    /// Regenerate the residual-order tables.
    Tables,
    /// Run the full pipeline and report the solution families.
    Solve {
        /// Exhaustive cross-check box: verify all a, b, c below this bound.
        #[arg(long)]
        brute_box: Option<u64>,
        /// Also write the report to this path.
        #[arg(long, value_name = "PATH")]
        report: Option<PathBuf>,
    },
    /// Factor one repunit (base^exp - 1)/(base - 1) via the bundled table.
    Factor { base: u32, exp: u64 },
    /// Multiplicative order of a modulo the prime q.
    Order {
        a: u64,
        q: u64,
        #[arg(long)]
        smooth_bound: Option<u64>,
    },
    /// Brute-force checks of the classical results the proof relies on.
    Sanity {
        #[arg(long, default_value_t = 200)]
        bound: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}

/// Build the effective configuration: file first, then global flags.
fn build_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(db) = &cli.db {
        cfg.db_path = Some(db.clone());
    }
    if let Some(fmt) = &cli.format {
        cfg.format = match fmt.as_str() {
            "md" => OutputFormat::Md,
            _ => OutputFormat::Json,
        };
    }
    if cli.timings {
        cfg.timings = true;
    }
    Ok(cfg)
}

/// Load the factor table per config: explicit path, else environment
/// variable, else the bundled table.
fn load_db(cfg: &RunConfig) -> Result<FactorDb> {
    match &cfg.db_path {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            FactorDb::parse(&text)
        }
        None => FactorDb::load_default(),
    }
}

/// Record one stage's wall-clock time when timings are enabled.
fn time_stage<T>(
    report: &mut PipelineReport,
    name: &str,
    f: impl FnOnce() -> Result<T>,
) -> Result<T> {
    let start = Instant::now();
    let out = f()?;
    if report.config.timings {
        let ms = start.elapsed().as_millis() as u64;
        report.timings_ms.get_or_insert_with(Vec::new).push((name.to_string(), ms));
    }
    Ok(out)
}

fn emit(report: &PipelineReport) -> Result<()> {
    print!("{}", report.render()?);
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = build_config(&cli)?;
    match cli.command {
        Command::Bounds => {
            cfg.validate()?;
            let mut report = PipelineReport::new("bounds", &cfg);
            let g = time_stage(&mut report, "bounds", sigmapq::baker::global_bounds)?;
            let chain = sigmapq::baker::chain_constants();
            report.constants.push(NamedValue::new("C(3)", &sigmapq::baker::matveev_c(3)));
            report.constants.push(NamedValue::new("C(4)", &sigmapq::baker::matveev_c(4)));
            report.constants.push(NamedValue::new("C_0", &chain.c0.hi));
            for (i, c) in chain.c_strong.iter().enumerate() {
                report.constants.push(NamedValue::new(&format!("C_{}", i + 1), c));
            }
            for (i, c) in chain.c_log.iter().enumerate() {
                report.constants.push(NamedValue::new(&format!("C_{}", i + 4), c));
            }
            report.derivations = chain.derivation.clone();
            report.certificates = g.certificates.iter().map(CertificateDto::from).collect();
            emit(&report)
        }
        Command::Reduce { case, scaling_c, gamma, precision } => {
            if let Some(c) = scaling_c {
                cfg.scaling_c = Some(c);
            }
            if let Some(g) = gamma {
                cfg.gamma = g;
            }
            if let Some(p) = precision {
                cfg.precision = Some(p);
            }
            cfg.validate()?;
            let which = match case.as_str() {
                "first" => ReductionCase::FirstPass,
                "nodiv" => ReductionCase::QNotDivX,
                "div" => ReductionCase::QDivX,
                other => return Err(Error::Config(format!("unknown reduction case {other}"))),
            };
            let mut report = PipelineReport::new("reduce", &cfg);
            let outcome = time_stage(&mut report, &format!("reduce/{case}"), || {
                let (c0_default, _, prec_default) = which.scaling();
                let c0 = cfg.scaling_override().unwrap_or(c0_default);
                let prec = cfg.precision.unwrap_or(prec_default);
                sigmapq::lattice::reduce_case_with(which, c0, cfg.gamma, prec)
            })?;
            report.reductions.push((&outcome).into());
            emit(&report)
        }
        Command::Factor { base, exp } => {
            cfg.validate()?;
            if base < 2 {
                return Err(Error::Config(format!("base must be >= 2 (got {base})")));
            }
            if exp < 1 {
                return Err(Error::Config(format!("exp must be >= 1 (got {exp})")));
            }
            let mut report = PipelineReport::new("factor", &cfg);
            let dto = time_stage(&mut report, "factor", || {
                let db = load_db(&cfg)?;
                match db.get(base, exp) {
                    Some(fac) => Ok(FactorizationDto::new(base, exp, fac)),
                    None => {
                        // Not in the table: attack the repunit directly with
                        // the default budget and report whatever is certified.
                        let n = factor::repunit(base, exp);
                        let fac =
                            factor::factor_bounded(&n, None, &factor::Budget::default());
                        Ok(FactorizationDto::new(base, exp, &fac))
                    }
                }
            })?;
            report.factorization = Some(dto);
            emit(&report)
        }
        Command::Order { a, q, smooth_bound } => {
            if let Some(b) = smooth_bound {
                cfg.smooth_bound = b;
            }
            cfg.validate()?;
            if a < 2 {
                return Err(Error::Config(format!("base a must be >= 2 (got {a})")));
            }
            let qb = BigUint::from(q);
            if !factor::is_prime(&qb) {
                return Err(Error::Config(format!("modulus q must be prime (got {q})")));
            }
            let ab = BigUint::from(a);
            if (&ab % &qb) == BigUint::ZERO {
                return Err(Error::Config(format!("base {a} is divisible by modulus {q}")));
            }
            let mut report = PipelineReport::new("order", &cfg);
            let fact = time_stage(&mut report, "order", || {
                let fact =
                    order::refined_fact(&ab, &qb, cfg.smooth_bound, &factor::Budget::default())?;
                fact.verify()?;
                Ok(fact)
            })?;
            report.order = Some((&fact).into());
            emit(&report)
        }
        Command::Tables | Command::Solve { .. } | Command::Sanity { .. } => {
            Err(Error::Config("the sieve stage is not wired yet".into()))
        }
    }
}
