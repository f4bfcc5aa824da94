use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use geamkit::entanglement;
use geamkit::geam::{
    build_geam, check_conical_design, design_params, measure_frames, validate_geam, GeamConfig,
};
use geamkit::io;
use geamkit::presets::{preset, Preset};
use geamkit::report::{measure_report, DESIGN_TOL};
use geamkit::selftest::{SelftestOptions, Suite};
use geamkit::states::{
    bipartite_from_schmidt, random_bipartite_mixed, random_mixed, random_separable, seeded_rng,
    DensityMatrix, SchmidtVector,
};
use geamkit::GeamError;

/// Build and check generalized equiangular measurements, and compute the
/// entropic, variance, coherence and entanglement quantities they define.
///
/// Set GEAMKIT_THREADS to cap the number of worker threads.
#[derive(Parser)]
#[command(name = "geamkit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a named measurement family and report its parameters.
    Preset(PresetArgs),
    /// Build a measurement from a JSON configuration file.
    Build(BuildArgs),
    /// Check every defining condition of a measurement file.
    Validate(ValidateArgs),
    /// Compute the measure report for a state.
    Measure(MeasureArgs),
    /// Run the entanglement criteria on a bipartite state.
    Detect(DetectArgs),
    /// Sample a random density matrix.
    RandomState(RandomStateArgs),
    /// Run the verification suite.
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct Output {
    /// Write the result here (atomically) instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PresetArgs {
    /// One of mub, sic, mum, gsic, nm_povm.
    #[arg(long)]
    name: String,
    #[arg(long)]
    dim: usize,
    /// Number of frames N (nm_povm only).
    #[arg(long)]
    frames: Option<usize>,
    /// Outcomes per frame M (nm_povm only).
    #[arg(long)]
    outcomes: Option<usize>,
    /// Purity parameter b (mum, gsic, nm_povm).
    #[arg(long)]
    b: Option<f64>,
    /// Write the measurement JSON here (atomically).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the design constants JSON here (atomically).
    #[arg(long)]
    params_out: Option<PathBuf>,
}

#[derive(Args)]
struct BuildArgs {
    /// Configuration JSON: {"dim", "frames": [{"M", "gamma", "b"}], "target_S", "tau_signs"}.
    #[arg(long)]
    config: PathBuf,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    geam: PathBuf,
    /// Absolute tolerance for every condition.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct MeasureArgs {
    #[arg(long)]
    geam: PathBuf,
    #[arg(long)]
    state: PathBuf,
    /// Entropy orders, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0.5,1,1.5,2,2.5,3")]
    nu: Vec<f64>,
    /// Coherence exponents, comma separated; `mu` or `mu:nu`.
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.3,0.5,0.2:0.5")]
    munu: Vec<String>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct DetectArgs {
    #[arg(long)]
    geam: PathBuf,
    /// Bipartite state JSON.
    #[arg(long)]
    state: PathBuf,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct RandomStateArgs {
    /// Local dimension d.
    #[arg(long)]
    dim: usize,
    /// Rank of the state; defaults to 1 (pure).
    #[arg(long)]
    rank: Option<usize>,
    /// Sample on C^d (x) C^d.
    #[arg(long)]
    bipartite: bool,
    /// Schmidt coefficients, comma separated; implies a bipartite pure state.
    #[arg(long, value_delimiter = ',')]
    schmidt: Option<Vec<f64>>,
    /// Mixture of this many random product states; implies bipartite.
    #[arg(long)]
    separable: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct SelftestArgs {
    /// Include dimension 5 and 6 cases in the sampled checks.
    #[arg(long)]
    extended: bool,
    #[arg(long, default_value_t = SelftestOptions::default().seed)]
    seed: u64,
}

/// Failure classes mapped onto exit codes.
enum Failure {
    /// A check ran and did not pass: exit 1.
    Check(anyhow::Error),
    /// Bad input or unsupported request: exit 2.
    Usage(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(err: anyhow::Error) -> Self {
        match err.downcast_ref::<GeamError>() {
            Some(GeamError::PositivityViolation { .. }) => Failure::Check(err),
            _ => Failure::Usage(err),
        }
    }
}

impl From<GeamError> for Failure {
    fn from(err: GeamError) -> Self {
        anyhow::Error::from(err).into()
    }
}

type CliResult = Result<ExitCode, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    match run(cli.command) {
        Ok(code) => code,
        Err(Failure::Check(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(value) = std::env::var("GEAMKIT_THREADS") {
        let n: usize = value
            .parse()
            .with_context(|| format!("GEAMKIT_THREADS={value} is not a thread count"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    Ok(())
}

fn run(command: Command) -> CliResult {
    match command {
        Command::Preset(args) => cmd_preset(args),
        Command::Build(args) => cmd_build(args),
        Command::Validate(args) => cmd_validate(args),
        Command::Measure(args) => cmd_measure(args),
        Command::Detect(args) => cmd_detect(args),
        Command::RandomState(args) => cmd_random_state(args),
        Command::Selftest(args) => cmd_selftest(args),
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write_atomic(path: &Path, text: &str) -> anyhow::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("creating a temporary file in {}", dir.display()))?;
    tmp.write_all(text.as_bytes())?;
    tmp.write_all(b"\n")?;
    tmp.persist(path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn emit(output: &Output, text: &str) -> anyhow::Result<()> {
    match &output.out {
        Some(path) => write_atomic(path, text),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn pretty(value: &Value) -> String {
    serde_json::to_string_pretty(value).expect("JSON values always serialize")
}

fn load_geam(path: &Path) -> anyhow::Result<geamkit::geam::Geam> {
    io::geam_from_json(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn load_state(path: &Path) -> anyhow::Result<DensityMatrix> {
    io::state_from_json(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn cmd_preset(args: PresetArgs) -> CliResult {
    let kind = Preset::parse(&args.name, args.b, args.frames, args.outcomes)?;
    let geam = preset(&kind, args.dim)?;
    let closed_form = kind.family_params(args.dim);
    let frames = measure_frames(&geam);
    let mu = frames.iter().map(|f| f.a * f.gamma).sum::<f64>() / args.dim as f64;
    let params = design_params(&geam, DESIGN_TOL)?;
    let validation = validate_geam(&geam, 1e-10);

    if let Some(path) = &args.out {
        write_atomic(path, &io::geam_to_json(&geam)?)?;
    }
    if let Some(path) = &args.params_out {
        write_atomic(path, &io::to_json(&params)?)?;
    }
    let summary = json!({
        "preset": kind,
        "dim": args.dim,
        "operators": geam.num_operators(),
        "closed_form": closed_form,
        "measured": {
            "frames": frames,
            "mu": mu,
            "S": params.s,
            "C_max": params.c_max,
        },
        "valid": validation.passed,
    });
    println!("{}", pretty(&summary));
    Ok(if validation.passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_build(args: BuildArgs) -> CliResult {
    let config: GeamConfig = io::from_json(&read(&args.config)?)
        .with_context(|| format!("parsing {}", args.config.display()))?;
    let geam = build_geam(&config)?;
    emit(&args.output, &io::geam_to_json(&geam)?)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_validate(args: ValidateArgs) -> CliResult {
    if !(args.tol > 0.0) {
        return Err(Failure::Usage(anyhow!("--tol must be positive")));
    }
    let geam = load_geam(&args.geam)?;
    let report = validate_geam(&geam, args.tol);
    let design = check_conical_design(&geam, args.tol);
    let params = design_params(&geam, DESIGN_TOL).ok();
    let out = json!({
        "passed": report.passed,
        "tol": report.tol,
        "conditions": report.conditions,
        "min_eigenvalue": report.min_eigenvalue,
        "is_design": design.is_design && params.is_some(),
        "design_fit": design,
        "design": params,
    });
    emit(&args.output, &pretty(&out))?;
    if report.passed {
        Ok(ExitCode::SUCCESS)
    } else {
        for c in report.failed() {
            eprintln!("condition {} failed: deviation {:.3e}", c.name, c.max_deviation);
        }
        Ok(ExitCode::from(1))
    }
}

fn parse_munu(items: &[String]) -> anyhow::Result<Vec<(f64, Option<f64>)>> {
    items
        .iter()
        .map(|item| {
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .with_context(|| format!("bad exponent {s:?} in --munu"))
            };
            Ok(match item.split_once(':') {
                Some((mu, nu)) => (parse(mu)?, Some(parse(nu)?)),
                None => (parse(item)?, None),
            })
        })
        .collect()
}

fn cmd_measure(args: MeasureArgs) -> CliResult {
    let geam = load_geam(&args.geam)?;
    let rho = load_state(&args.state)?;
    let pairs = parse_munu(&args.munu)?;
    let report = measure_report(&geam, &rho, &args.nu, &pairs)?;
    emit(&args.output, &io::to_json(&report)?)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_detect(args: DetectArgs) -> CliResult {
    let geam = load_geam(&args.geam)?;
    let rho = load_state(&args.state)?;
    let report = entanglement::detect(&geam, &rho)?;
    emit(&args.output, &io::to_json(&report)?)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_random_state(args: RandomStateArgs) -> CliResult {
    let mut rng = seeded_rng(args.seed);
    let d = args.dim;
    let state = if let Some(coefficients) = args.schmidt {
        let lambda = SchmidtVector::new(coefficients)?;
        bipartite_from_schmidt(&lambda, d, &mut rng)?
    } else if let Some(terms) = args.separable {
        random_separable(d, terms, &mut rng)?
    } else if args.bipartite {
        random_bipartite_mixed(d, args.rank.unwrap_or(1), &mut rng)?
    } else {
        random_mixed(d, args.rank.unwrap_or(1), &mut rng)?
    };
    emit(&args.output, &io::state_to_json(&state)?)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_selftest(args: SelftestArgs) -> CliResult {
    let start = std::time::Instant::now();
    let suite = Suite::new(SelftestOptions {
        extended: args.extended,
        seed: args.seed,
    });
    let outcomes = suite.run_all();
    for outcome in &outcomes {
        println!("{outcome}");
    }
    let total = start.elapsed().as_secs_f64();
    let budget = if args.extended { 1200.0 } else { 300.0 };
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!(
        "{} of {} criteria passed in {total:.1} s (budget {budget:.0} s)",
        outcomes.len() - failed,
        outcomes.len()
    );
    Ok(if failed == 0 && total < budget {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
