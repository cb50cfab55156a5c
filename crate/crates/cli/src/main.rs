//! Command-line surface: every library operation as a subcommand with JSON
//! or CSV output, deterministic seeding and a one-shot verification suite.
//!
//! Exit codes: 0 success, 2 invalid arguments, 3 quadrature budget exhausted,
//! 4 invariant violation (including verification failures).

mod config;
mod output;

use clap::{Args, Parser, Subcommand};
use config::{EffectiveConfig, OutputFormat};
use orbital_core::checks::{run_all, CheckScale};
use orbital_core::error::Error as CoreError;
use orbital_core::montecarlo::sample_convolution;
use orbital_core::roots::{build_space, RadialPoint, SpaceFamily, SpectralParameter};
use orbital_core::spherical::spherical_fn;
use orbital_core::transform::{l2_norm_sq, DensityEvaluator, OrbitalConvolution};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "orbital",
    about = "Spherical transforms and convolutions of orbital measures on rank-one symmetric spaces",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by the computational subcommands. Every flag overrides the
/// config file, which overrides the built-in defaults.
#[derive(Args, Debug, Clone)]
struct CommonArgs {
    /// JSON config file with the same keys as the flags
    #[arg(long)]
    config: Option<PathBuf>,
    /// Space family: real-hyperbolic | complex-hyperbolic | generic-rank-one
    #[arg(long)]
    family: Option<String>,
    /// Dimension parameter of the real-hyperbolic family
    #[arg(long)]
    n: Option<usize>,
    /// Complex dimension of the complex-hyperbolic family
    #[arg(long)]
    m: Option<usize>,
    /// Comma-separated radial generators, e.g. --t 1,1,1
    #[arg(long, allow_hyphen_values = true)]
    t: Option<String>,
    /// Spectral integration cutoff
    #[arg(long)]
    lambda_max: Option<f64>,
    /// Number of spectral grid points for sweeps
    #[arg(long)]
    lambda_points: Option<usize>,
    /// Cap of the compact-group quadrature order ladder
    #[arg(long)]
    k_order: Option<usize>,
    /// Monte Carlo sample count
    #[arg(long, short = 'N', alias = "N")]
    samples: Option<usize>,
    /// Random seed (64-bit)
    #[arg(long)]
    seed: Option<u64>,
    /// Histogram bin count
    #[arg(long)]
    bins: Option<usize>,
    /// Emit a binned histogram instead of raw samples (simulate only)
    #[arg(long)]
    histogram: bool,
    /// Output file path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: json | csv
    #[arg(long)]
    format: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the structural descriptor of a space as JSON
    Describe(CommonArgs),
    /// Sweep the spherical function over a spectral grid at fixed t
    Spherical(CommonArgs),
    /// Plancherel-based squared norm of the convolution density with verdict
    L2(CommonArgs),
    /// Tabulate the inversion-formula density profile
    Density(CommonArgs),
    /// Draw radial samples of the convolution
    Simulate(CommonArgs),
    /// Run the verification suite
    Verify {
        /// Scaled-down suite (smaller sample counts and grids)
        #[arg(long)]
        quick: bool,
    },
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("ORBITAL_THREADS") {
        if let Ok(k) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
        }
    }
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Describe(args) => run(args, cmd_describe),
        Command::Spherical(args) => run(args, cmd_spherical),
        Command::L2(args) => run(args, cmd_l2),
        Command::Density(args) => run(args, cmd_density),
        Command::Simulate(args) => run(args, cmd_simulate),
        Command::Verify { quick } => cmd_verify(quick),
    };
    ExitCode::from(code)
}

fn run(args: CommonArgs, f: fn(&EffectiveConfig) -> Result<(), CliError>) -> u8 {
    let cfg = match EffectiveConfig::resolve(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    match f(&cfg) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[derive(Debug)]
enum CliError {
    InvalidArguments(String),
    Budget(String),
    Invariant(String),
    Io(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::InvalidArguments(m) => write!(f, "invalid arguments: {m}"),
            CliError::Budget(m) => write!(f, "quadrature budget: {m}"),
            CliError::Invariant(m) => write!(f, "invariant violation: {m}"),
            CliError::Io(m) => write!(f, "io: {m}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::InvalidArguments(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Invariant(_) => 4,
            CliError::Io(_) => 2,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::QuadratureBudget(m) => CliError::Budget(m),
            CoreError::RealizationInvariant(m) => CliError::Invariant(m),
            other => CliError::InvalidArguments(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

fn space_from(cfg: &EffectiveConfig) -> Result<orbital_core::roots::SpaceDescriptor, CliError> {
    let family = match cfg.family.as_str() {
        "real-hyperbolic" => SpaceFamily::RealHyperbolic { n: cfg.n },
        "complex-hyperbolic" => SpaceFamily::ComplexHyperbolic {
            m: cfg
                .m
                .ok_or_else(|| CliError::InvalidArguments("complex-hyperbolic needs --m".into()))?,
        },
        "generic-rank-one" => SpaceFamily::GenericRankOne {
            m_alpha: cfg.n as u32,
            m_2alpha: cfg.m.unwrap_or(0) as u32,
        },
        other => {
            return Err(CliError::InvalidArguments(format!(
                "unknown family {other}; expected real-hyperbolic, complex-hyperbolic or generic-rank-one"
            )))
        }
    };
    Ok(build_space(family)?)
}

fn cmd_describe(cfg: &EffectiveConfig) -> Result<(), CliError> {
    let space = space_from(cfg)?;
    if cfg.format == OutputFormat::Csv {
        return Err(CliError::InvalidArguments(
            "describe emits JSON only".into(),
        ));
    }
    output::write_json(cfg, "descriptor", serde_json::to_value(&space).unwrap())?;
    Ok(())
}

fn cmd_spherical(cfg: &EffectiveConfig) -> Result<(), CliError> {
    let space = space_from(cfg)?;
    let t = *cfg
        .generators
        .first()
        .ok_or_else(|| CliError::InvalidArguments("spherical needs --t <radial>".into()))?;
    let quad = cfg.quadrature();
    let point = RadialPoint::scalar(t)?;
    let mut rows = Vec::with_capacity(cfg.lambda_points);
    for i in 0..cfg.lambda_points {
        let lam = cfg.lambda_max * i as f64 / (cfg.lambda_points.max(2) - 1) as f64;
        let v = spherical_fn(&space, &SpectralParameter::scalar(lam), &point, &quad)?;
        rows.push((lam, v.value.re));
    }
    match cfg.format {
        OutputFormat::Csv => {
            let mut body = String::from("lambda,phi\n");
            for (lam, v) in rows {
                body.push_str(&format!("{lam:.16e},{v:.16e}\n"));
            }
            output::write_csv(cfg, &body)?;
        }
        OutputFormat::Json => {
            let values: Vec<serde_json::Value> = rows
                .iter()
                .map(|(lam, v)| serde_json::json!({"lambda": lam, "phi": v}))
                .collect();
            output::write_json(cfg, "spherical_sweep", serde_json::json!({"values": values}))?;
        }
    }
    Ok(())
}

fn conv_from(cfg: &EffectiveConfig) -> Result<OrbitalConvolution, CliError> {
    let space = space_from(cfg)?;
    if cfg.generators.is_empty() {
        return Err(CliError::InvalidArguments(
            "need --t with at least one radial generator".into(),
        ));
    }
    Ok(OrbitalConvolution::rank_one(space, &cfg.generators)?)
}

fn cmd_l2(cfg: &EffectiveConfig) -> Result<(), CliError> {
    let conv = conv_from(cfg)?;
    let report = l2_norm_sq(&conv, &cfg.quadrature())?;
    if cfg.format == OutputFormat::Csv {
        return Err(CliError::InvalidArguments("l2 emits JSON only".into()));
    }
    output::write_json(cfg, "convergence_report", serde_json::to_value(&report).unwrap())?;
    Ok(())
}

fn cmd_density(cfg: &EffectiveConfig) -> Result<(), CliError> {
    let conv = conv_from(cfg)?;
    let mut quad = cfg.quadrature();
    if cfg.lambda_max_explicit.is_none() {
        quad.lambda_max = orbital_core::spherical::QuadratureConfig::density_preset().lambda_max;
    }
    let ev = DensityEvaluator::new(&conv, &quad, 0)?;
    let extent = conv.total_displacement().map_err(CliError::from)? + 0.5;
    let profile = ev.profile(extent, cfg.lambda_points.max(801))?;
    match cfg.format {
        OutputFormat::Csv => {
            let mut body = String::from("t,rho,jacobian\n");
            for (t, v) in profile.grid.iter().zip(&profile.values) {
                let jac = orbital_core::transform::radial_weight(&conv.space, *t)?;
                body.push_str(&format!("{t:.16e},{v:.16e},{jac:.16e}\n"));
            }
            output::write_csv(cfg, &body)?;
        }
        OutputFormat::Json => {
            output::write_json(cfg, "density_profile", serde_json::to_value(&profile).unwrap())?;
        }
    }
    Ok(())
}

fn cmd_simulate(cfg: &EffectiveConfig) -> Result<(), CliError> {
    let conv = conv_from(cfg)?;
    let samples = sample_convolution(&conv, cfg.samples, cfg.seed)?;
    match (cfg.format, cfg.histogram) {
        (OutputFormat::Csv, false) => {
            let mut body = String::from("t\n");
            for s in &samples {
                body.push_str(&format!("{s:.16e}\n"));
            }
            output::write_csv(cfg, &body)?;
        }
        (OutputFormat::Csv, true) => {
            let hist = orbital_core::montecarlo::histogram(&conv.space, &samples, cfg.bins)?;
            let mut body = String::from("bin_center,density_estimate\n");
            for (i, d) in hist.density_estimate.iter().enumerate() {
                let center = 0.5 * (hist.bin_edges[i] + hist.bin_edges[i + 1]);
                body.push_str(&format!("{center:.16e},{d:.16e}\n"));
            }
            output::write_csv(cfg, &body)?;
        }
        (OutputFormat::Json, false) => {
            output::write_json(cfg, "samples", serde_json::json!({ "samples": samples }))?;
        }
        (OutputFormat::Json, true) => {
            let hist = orbital_core::montecarlo::histogram(&conv.space, &samples, cfg.bins)?;
            output::write_json(cfg, "histogram", serde_json::to_value(&hist).unwrap())?;
        }
    }
    Ok(())
}

fn cmd_verify(quick: bool) -> u8 {
    let scale = if quick {
        CheckScale::quick()
    } else {
        CheckScale::full()
    };
    let outcomes = run_all(&scale);
    let mut all_passed = true;
    for outcome in &outcomes {
        println!("{}", outcome.summary_line());
        for line in &outcome.details {
            println!("    {line}");
        }
        all_passed &= outcome.passed;
    }
    if all_passed {
        println!("verification: all criteria passed");
        0
    } else {
        println!("verification: FAILURES present (see lines above)");
        4
    }
}
