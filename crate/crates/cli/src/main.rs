//! `hcm`: verify harmonic almost contact metric structures from the command line.
//!
//! Exit codes: 0 when every check passes, 1 when at least one fails, 2 on
//! usage or configuration errors (message on stderr).

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use harmonic_contact::catalog::{entries, find_entry, parse_target, resolve_target, BuiltObject};
use harmonic_contact::harmonicity::registry;
use harmonic_contact::report::{convergence, emit_convergence, emit_report, verify, Format, RunSpec};
use harmonic_contact::Result;

#[derive(Parser)]
#[command(name = "hcm", version, about = "Numerical checks for harmonic almost contact metric structures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Catalog entries and the identity registry.
    List,
    /// Parameters, expected flags and geometry of one catalog entry.
    Describe {
        /// Catalog key, optionally with parameters: `unit_tangent_surface(c=4)`.
        entry: String,
    },
    /// Evaluate every applicable check on a catalog entry or TOML config.
    Verify {
        target: String,
        /// Comma-separated check ids; default: all applicable.
        #[arg(long, value_delimiter = ',')]
        checks: Option<Vec<String>>,
        /// Perturb the structure by a seeded rotation of this size, 0 < eps < 0.1.
        #[arg(long)]
        perturb: Option<f64>,
        /// Record wall-clock runtime in the summary (makes output non-reproducible).
        #[arg(long)]
        timing: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Max residual of one check at several step sizes.
    Convergence {
        target: String,
        #[arg(long)]
        check: String,
        #[arg(long, value_delimiter = ',', required = true)]
        steps: Vec<f64>,
        #[arg(long)]
        perturb: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = RunSpec::DEFAULT_POINTS)]
    points: usize,
    /// Sample seed; defaults to $HCM_SEED, then 42.
    #[arg(long, env = "HCM_SEED", default_value_t = RunSpec::DEFAULT_SEED)]
    seed: u64,
    /// Finite-difference step (overrides the config file's).
    #[arg(long)]
    step: Option<f64>,
    /// Finite-difference order, 2 or 4.
    #[arg(long)]
    order: Option<u32>,
    /// Multiplies every tolerance class.
    #[arg(long, default_value_t = 1.0)]
    tol_scale: f64,
    /// json, csv or text.
    #[arg(long, default_value = "text")]
    format: String,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn spec(&self, target: &str, perturb: Option<f64>) -> RunSpec {
        RunSpec {
            points: self.points,
            seed: self.seed,
            step: self.step,
            order: self.order,
            perturb,
            tol_scale: self.tol_scale,
            ..RunSpec::new(target)
        }
    }

    fn sink(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(path) => Box::new(BufWriter::new(File::create(path)?)),
            None => Box::new(io::stdout().lock()),
        })
    }
}

fn list(out: &mut dyn Write) -> Result<()> {
    writeln!(out, "catalog:")?;
    for e in entries() {
        let params: Vec<String> = e.params.iter().map(|p| format!("{}={}", p.name, p.default)).collect();
        let head = if params.is_empty() { e.key.to_string() } else { format!("{}({})", e.key, params.join(", ")) };
        writeln!(out, "  {head:<48} {}", e.description)?;
    }
    writeln!(out, "\nidentities:")?;
    for c in registry() {
        writeln!(out, "  {:<18} {:?}  {}", c.id, c.tolerance, c.description)?;
    }
    Ok(())
}

fn describe(target: &str, out: &mut dyn Write) -> Result<()> {
    let (key, _) = parse_target(target)?;
    let entry = find_entry(&key)?;
    let built = resolve_target(target)?;
    writeln!(out, "{} ({:?})", entry.key, entry.kind)?;
    writeln!(out, "  {}", entry.description)?;
    for p in entry.params {
        let value = built.params.get(p.name).map(String::as_str).unwrap_or(p.default);
        writeln!(out, "  param {} = {value}  (default {}; {})", p.name, p.default, p.doc)?;
    }
    writeln!(out, "  structure {}", built.name())?;
    let dim = match &built.object {
        BuiltObject::Hermitian(h) => h.dim(),
        _ => built.contact().map(|s| s.dim()).unwrap_or(0),
    };
    writeln!(out, "  dimension {dim}")?;
    let show = |v: Option<bool>| v.map(|b| b.to_string()).unwrap_or_else(|| "-".into());
    let e = built.expected;
    writeln!(
        out,
        "  expected: contact metric {}, K-contact {}, H-contact {}, harmonic {}",
        show(e.contact_metric),
        show(e.k_contact),
        show(e.h_contact),
        show(e.harmonic)
    )?;
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::List => {
            list(&mut io::stdout().lock())?;
            Ok(true)
        }
        Command::Describe { entry } => {
            describe(&entry, &mut io::stdout().lock())?;
            Ok(true)
        }
        Command::Verify { target, checks, perturb, timing, common } => {
            let format: Format = common.format.parse()?;
            let spec = RunSpec { checks, timing, ..common.spec(&target, perturb) };
            let report = verify(&spec)?;
            emit_report(&report, format, &mut *common.sink()?)?;
            Ok(report.all_pass())
        }
        Command::Convergence { target, check, steps, perturb, common } => {
            let format: Format = common.format.parse()?;
            let report = convergence(&common.spec(&target, perturb), &check, &steps)?;
            emit_convergence(&report, format, &mut *common.sink()?)?;
            Ok(report.within_band())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("hcm: {e}");
            ExitCode::from(2)
        }
    }
}
