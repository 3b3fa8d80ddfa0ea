//! `grf`: batch front end for finite-element Gaussian random fields.
//!
//! Every run writes one output file and a `<output>.json` sidecar holding
//! the resolved configuration; `grf replay <sidecar>` reproduces the output
//! bit for bit.
//!
//! Exit codes: 0 success, 1 I/O or other runtime failure, 2 invalid
//! configuration or input, 3 solver or quadrature failure.

mod cache;
mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use cache::Cache;
use config::{
    config_error, parse_point, BcKind, BetaSource, Command, ConfigError, MassRootSpec, MeshSource, RunConfig,
    SectionSpec, VarianceSpec,
};

#[derive(Parser)]
#[command(
    name = "grf",
    version,
    about = "Finite-element Gaussian random fields with boundary corrections"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a generated (or re-serialized) mesh.
    Mesh(RunArgs),
    /// Covariance function G_2(center, .) along a straight section.
    Probe(RunArgs),
    /// Optimal Robin coefficient at the boundary points.
    Beta(RunArgs),
    /// Nodal variance (and scaling g with --normalize).
    Variance(RunArgs),
    /// Field realizations, one column per seed.
    Sample(RunArgs),
    /// Re-run the configuration stored in a sidecar file.
    Replay {
        sidecar: PathBuf,
        /// Write here instead of the recorded output path.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        cache: CacheArgs,
    },
}

#[derive(Clone)]
struct Point(Vec<f64>);

impl FromStr for Point {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        parse_point(s).map(Point)
    }
}

#[derive(Args)]
struct CacheArgs {
    /// Cache directory for Robin coefficients and variances
    /// [default: .grf-cache next to the output].
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    /// Neither read nor write the cache.
    #[arg(long)]
    no_cache: bool,
}

#[derive(Args)]
struct RunArgs {
    /// interval:N, square:N, cube:N, parallelogram:N or a mesh file.
    #[arg(long, default_value = "square:64")]
    mesh: MeshSource,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long, default_value_t = 121.0)]
    alpha: f64,
    /// dirichlet, neumann or robin.
    #[arg(long, default_value = "neumann")]
    bc: BcKind,
    /// Robin coefficient: const:VALUE, roininen, opt:centers or opt:radial.
    #[arg(long)]
    beta: Option<BetaSource>,
    /// Evaluate the optimal coefficient at every STRIDE-th boundary point.
    #[arg(long, default_value_t = 1)]
    stride: usize,
    /// Normalize the variance: direct or stochastic:N.
    #[arg(long)]
    normalize: Option<VarianceSpec>,
    /// Variance method of the variance command without --normalize.
    #[arg(long, default_value = "direct")]
    method: VarianceSpec,
    /// Source point of probe, comma separated.
    #[arg(long)]
    center: Option<Point>,
    /// Straight line p + s d, s in [0, 1]: px,py:dx,dy[:count].
    #[arg(long)]
    section: Option<SectionSpec>,
    /// Add the free-space Matérn covariance to the probe output.
    #[arg(long)]
    free_space: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of samples (seeds seed, seed+1, ...).
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// Square root of the mass matrix for sampling: lumped or dense.
    #[arg(long, default_value = "lumped")]
    mass_root: MassRootSpec,
    /// Solve with preconditioned CG to this relative tolerance instead of
    /// the direct factorization.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(short, long)]
    output: PathBuf,
    #[command(flatten)]
    cache: CacheArgs,
}

impl RunArgs {
    fn into_config(self, command: Command) -> (RunConfig, CacheArgs) {
        let cfg = RunConfig {
            command,
            mesh: self.mesh,
            gamma: self.gamma,
            alpha: self.alpha,
            bc: self.bc,
            beta: self.beta,
            stride: self.stride,
            normalize: self.normalize,
            variance: self.method,
            center: self.center.map(|p| p.0),
            section: self.section,
            free_space: self.free_space,
            seed: self.seed,
            count: self.count,
            mass_root: self.mass_root,
            tol: self.tol,
            output: self.output,
        };
        (cfg, self.cache)
    }
}

fn open_cache(args: &CacheArgs, output: &std::path::Path) -> Cache {
    if args.no_cache {
        return Cache::disabled();
    }
    let dir = args.cache_dir.clone().unwrap_or_else(|| {
        output
            .parent()
            .filter(|d| !d.as_os_str().is_empty())
            .map(|d| d.join(".grf-cache"))
            .unwrap_or_else(|| PathBuf::from(".grf-cache"))
    });
    Cache::new(Some(dir))
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("GRF_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| config_error(format!("GRF_THREADS must be a non-negative integer, got '{v}'")))?;
        grf_core::par::configure_threads(n);
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<()> {
    configure_threads()?;
    let (cfg, cache_args) = match cli.command {
        Cmd::Mesh(a) => a.into_config(Command::Mesh),
        Cmd::Probe(a) => a.into_config(Command::Probe),
        Cmd::Beta(a) => a.into_config(Command::Beta),
        Cmd::Variance(a) => a.into_config(Command::Variance),
        Cmd::Sample(a) => a.into_config(Command::Sample),
        Cmd::Replay { sidecar, output, cache } => {
            let text = std::fs::read_to_string(&sidecar).with_context(|| format!("reading {}", sidecar.display()))?;
            let mut cfg: RunConfig = serde_json::from_str(&text)
                .map_err(|e| config_error(format!("{}: not a run configuration: {e}", sidecar.display())))?;
            if let Some(o) = output {
                cfg.output = o;
            }
            (cfg, cache)
        }
    };
    cfg.validate().map_err(config_error)?;
    let cache = open_cache(&cache_args, &cfg.output);
    commands::run(&cfg, &cache)
}

/// 2 for bad input, 3 for numerical failures, 1 otherwise.
fn exit_code(err: &anyhow::Error) -> u8 {
    use grf_core::Error as E;
    for cause in err.chain() {
        if cause.downcast_ref::<ConfigError>().is_some() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<E>() {
            return match e {
                E::InvalidArgument(_) | E::Parse { .. } | E::NotFound(_) | E::Domain(_) | E::Unsupported(_) => 2,
                E::NoConvergence { .. }
                | E::NotPositiveDefinite { .. }
                | E::NodeSolve { .. }
                | E::DegenerateQuadrature { .. } => 3,
            };
        }
    }
    1
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
