//! `cochain`: certified Hausdorff approximations from the command line.
//!
//! Exit codes: 0 success, 1 parse or configuration error, 2 fuel timeout
//! (a partial report is written), 3 a named verification failure.

mod plot;

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use cochain_core::approx::{
    verify_certificate, Certificate, CertifiedApproximator, SearchConfig, SearchOutcome, VerifyError, VerifyOptions,
    Witness,
};
use cochain_core::effsets::SetSpec;
use cochain_core::rational::{format_rational, parse_rational};
use cochain_core::{Space, SpaceSpec};

#[derive(Parser)]
#[command(name = "cochain", version, about = "Certified approximations of co-c.e. spheres and cells")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Seed for every sampling step (plot samples).
    #[arg(long, global = true, default_value_t = 0)]
    rng_seed: u64,

    /// Worker threads; 0 uses all cores.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Search for a certified approximation and write its certificate.
    Approximate(ApproximateArgs),
    /// Replay a certificate.
    Verify(VerifyArgs),
    /// Export balls and set samples as CSV, with exact values alongside.
    PlotData(PlotArgs),
}

#[derive(Args)]
struct ApproximateArgs {
    /// `euclidean:N` or `hilbert-cube`; defaults to the set's dimension.
    #[arg(long)]
    space: Option<String>,

    /// Builtin shape: circle, sphere2, disk, ellipse, square_cell.
    #[arg(long, conflicts_with = "set_file")]
    shape: Option<String>,

    /// JSON set definition.
    #[arg(long)]
    set_file: Option<PathBuf>,

    /// JSON witness; the shape's builtin witness when omitted.
    #[arg(long)]
    witness_file: Option<PathBuf>,

    /// Target precision: output within 3·2^-k (spheres) or 7·2^-k (cells)
    #[arg(short = 'k', long = "precision")]
    k: u32,

    /// Fuel ceiling.
    #[arg(long, default_value_t = 64)]
    fuel: u32,

    /// Grid sides to seed from, e.g. `20,30`; estimated when omitted.
    #[arg(long, value_delimiter = ',')]
    m_schedule: Vec<usize>,

    /// Ball radius caps as fractions of ε, e.g. `1/2,1/4`.
    #[arg(long, value_delimiter = ',')]
    delta_schedule: Vec<String>,

    /// Only try seeded candidates.
    #[arg(long)]
    no_enumerate: bool,

    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    certificate: PathBuf,

    /// Replay fuel; the recorded fuel when omitted.
    #[arg(long)]
    fuel: Option<u32>,
}

#[derive(Args)]
struct PlotArgs {
    certificate: PathBuf,

    /// CSV path; the exact values go to the same path with a `.json`
    /// extension. Defaults to `<certificate stem>.plot.csv`.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Number of set samples.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
}

/// A failure with a name, reported with exit code 3.
#[derive(Debug)]
struct Named {
    check: String,
    detail: String,
}

impl fmt::Display for Named {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} failed: {}", self.check, self.detail)
    }
}

impl std::error::Error for Named {}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("COCHAIN_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Named>().is_some() {
                ExitCode::from(3)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Approximate(args) => approximate(args, cli.jobs),
        Command::Verify(args) => verify(args),
        Command::PlotData(args) => plot::plot_data(&args.certificate, args.out.as_deref(), args.samples, cli.rng_seed),
    }
}

fn parse_space(s: &str, dim: Option<usize>) -> Result<SpaceSpec> {
    let s = s.trim();
    if s.starts_with('{') {
        return serde_json::from_str(s).context("space JSON");
    }
    match s.split_once(':') {
        Some(("euclidean", n)) => {
            Ok(SpaceSpec::Euclidean { n: n.parse().with_context(|| format!("dimension {n:?}"))? })
        }
        None if s == "euclidean" => {
            Ok(SpaceSpec::Euclidean { n: dim.ok_or_else(|| anyhow!("cannot infer the dimension of the set"))? })
        }
        None if s == "hilbert-cube" => Ok(SpaceSpec::HilbertCube),
        _ => bail!("unknown space {s:?}; expected euclidean:N or hilbert-cube"),
    }
}

fn set_dimension(spec: &SetSpec) -> Result<Option<usize>> {
    Ok(match spec {
        SetSpec::Custom { bounding_ball, .. } => Some(bounding_ball.center().dim()),
        other => other.geometry()?.map(|g| g.dim()),
    })
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, format!("{text}\n")).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            writeln!(stdout, "{text}")?;
            Ok(())
        }
    }
}

fn approximate(args: ApproximateArgs, jobs: usize) -> Result<ExitCode> {
    let spec = match (&args.shape, &args.set_file) {
        (Some(name), None) => SetSpec::named(name)?,
        (None, Some(path)) => serde_json::from_str(&read(path)?).context("set definition")?,
        _ => bail!("give exactly one of --shape and --set-file"),
    };
    let witness = match &args.witness_file {
        Some(path) => serde_json::from_str::<Witness>(&read(path)?).context("witness")?,
        None => Witness::builtin(&spec).context("no builtin witness; pass --witness-file")?,
    };
    let dim = set_dimension(&spec)?.or(Some(witness.sets().faces.len()));
    let space_spec = match &args.space {
        Some(s) => parse_space(s, dim)?,
        None => SpaceSpec::Euclidean { n: dim.ok_or_else(|| anyhow!("cannot infer the space; pass --space"))? },
    };
    let space = Space::from_spec(&space_spec)?;
    let mut config =
        SearchConfig { fuel_ceiling: args.fuel, jobs, enumerate: !args.no_enumerate, ..SearchConfig::default() };
    config.m_schedule = args.m_schedule.clone();
    if !args.delta_schedule.is_empty() {
        config.delta_fractions = args.delta_schedule.iter().map(|s| parse_rational(s)).collect::<Result<_, _>>()?;
    }
    config.validate()?;
    let set = spec.build(&space)?;
    let search = CertifiedApproximator::new(&space, set, witness.clone(), config)?;
    match search.certify(args.k)? {
        SearchOutcome::Certified(found) => {
            let cert = Certificate::new(&space_spec, &spec, &witness, &found)?;
            log::info!(
                "certified k = {} with {} balls, bound {}",
                cert.k,
                cert.balls.len(),
                format_rational(&cert.bound)
            );
            write_output(args.out.as_deref(), &cert.to_json_string()?)?;
            Ok(ExitCode::SUCCESS)
        }
        SearchOutcome::Timeout(partial) => {
            eprintln!("timeout: no certified chain at k = {} within fuel {}", args.k, args.fuel);
            write_output(args.out.as_deref(), &serde_json::to_string(&partial.to_json())?)?;
            Ok(ExitCode::from(2))
        }
    }
}

fn verify(args: VerifyArgs) -> Result<ExitCode> {
    let text = read(&args.certificate)?;
    match verify_certificate(&text, &VerifyOptions { fuel: args.fuel }) {
        Ok(summary) => {
            println!(
                "ok: {} conditions re-verified at k = {}, bound {}, {} balls",
                summary.conditions.len(),
                summary.k,
                format_rational(&summary.bound),
                summary.balls
            );
            Ok(ExitCode::SUCCESS)
        }
        Err(VerifyError::Parse(e)) => bail!("cannot parse certificate: {e}"),
        Err(VerifyError::Failed { check, detail }) => Err(Named { check, detail }.into()),
    }
}
