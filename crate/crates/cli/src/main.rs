//! `hqst`: figure-data and validation runs for photon-mediated state transfer
//! between heterogeneous cavity-QED nodes.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::{DecayKindArg, Method, Scenario};

#[derive(Debug, Parser)]
#[command(name = "hqst", version, about = "Quantum state transfer between heterogeneous nodes: sweeps, budgets and checks")]
struct Cli {
    /// Scenario file (TOML). Without one the reference scenario is used.
    #[arg(long, short, global = true)]
    config: Option<PathBuf>,

    /// Write the CSV here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    /// Worker threads for sweeps. HQST_JOBS takes precedence when set.
    #[arg(long, short, global = true)]
    jobs: Option<usize>,

    /// Seed for randomized point sets and baselines.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Node-1 amplitudes, drive, and the ideal and transformed packets over time.
    Wavepacket(UnitaryArgs),
    /// Success probability for the configured unitary by overlap and by direct integration.
    Psuccess {
        #[command(flatten)]
        unitary: UnitaryArgs,
        /// Skip the direct integration.
        #[arg(long)]
        no_ode: bool,
    },
    /// Success probability along one or two error axes.
    Sweep(SweepArgs),
    /// Separability indices of the three two-variable error surfaces.
    Separability(SeparabilityArgs),
    /// Expected error-correction trials against the bare success probability.
    Budget(BudgetArgs),
    /// Expected trials of the error-correction scheme against the error size.
    Ecz {
        /// Error sizes as lo:hi:n.
        #[arg(long)]
        epsilon: Option<String>,
    },
    /// Node-1 emission efficiency and shape under spontaneous decay.
    Decay(DecayArgs),
    /// Direct integration against the overlap formula at random error points.
    Validate {
        /// Number of random points.
        #[arg(long)]
        points: Option<usize>,
        /// Region scale of the sampled points.
        #[arg(long)]
        scale: Option<f64>,
    },
    /// The cooperativity dataset with derived survival probabilities.
    Table {
        /// Cooperativity CSV to use instead of the bundled dataset.
        #[arg(long)]
        data: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct UnitaryArgs {
    /// Frequency shift of the channel (rate units).
    #[arg(long, allow_hyphen_values = true)]
    omega0: Option<f64>,
    /// Stretch factor of the channel.
    #[arg(long)]
    xi: Option<f64>,
    /// Timing parameter T of the channel.
    #[arg(long, allow_hyphen_values = true)]
    timing: Option<f64>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// First axis: omega0, xi or timing.
    #[arg(long)]
    axis: Option<String>,
    /// First axis samples as lo:hi:n in error variables.
    #[arg(long, allow_hyphen_values = true)]
    range: Option<String>,
    /// Optional second axis for a two-dimensional sweep.
    #[arg(long)]
    axis2: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    range2: Option<String>,
    #[arg(long, value_enum)]
    method: Option<Method>,
}

#[derive(Debug, Args)]
struct SeparabilityArgs {
    /// Region scale s of R_s.
    #[arg(long)]
    scale: Option<f64>,
    /// Samples per axis.
    #[arg(long)]
    points: Option<usize>,
    #[arg(long, value_enum)]
    method: Option<Method>,
    /// Trials of the uniform random-matrix baseline (0 to skip).
    #[arg(long)]
    baseline_trials: Option<usize>,
}

#[derive(Debug, Args)]
struct BudgetArgs {
    /// Shared cooperativity C_em = C_cav of both nodes; repeatable.
    #[arg(long)]
    c0: Vec<f64>,
    /// Line length over attenuation length.
    #[arg(long)]
    x_over_xtl: Option<f64>,
    /// Bare success probabilities as lo:hi:n.
    #[arg(long)]
    psuccess: Option<String>,
}

#[derive(Debug, Args)]
struct DecayArgs {
    #[arg(long, value_enum)]
    model: Option<DecayKindArg>,
    /// Emitter cooperativity; repeatable.
    #[arg(long)]
    cooperativity: Vec<f64>,
    /// Ratio r = gamma1/2k; repeatable.
    #[arg(long)]
    r: Vec<f64>,
    /// Detuning-broadened rate for the finite-detuning model.
    #[arg(long)]
    gamma_r: Option<f64>,
}

fn merge(cli: &Cli, s: &mut Scenario) {
    if let Some(seed) = cli.seed {
        s.seed = seed;
    }
    if let Some(o) = &cli.output {
        s.output = Some(o.clone());
    }
    let set_unitary = |s: &mut Scenario, u: &UnitaryArgs| {
        s.unitary.omega0 = u.omega0.or(s.unitary.omega0);
        s.unitary.xi = u.xi.or(s.unitary.xi);
        s.unitary.timing = u.timing.or(s.unitary.timing);
    };
    match &cli.command {
        Command::Wavepacket(u) => set_unitary(s, u),
        Command::Psuccess { unitary, .. } => set_unitary(s, unitary),
        Command::Sweep(a) => {
            if let Some(v) = &a.axis {
                s.sweep.axis = v.clone();
            }
            if let Some(v) = &a.range {
                s.sweep.range = v.clone();
            }
            if a.axis2.is_some() {
                s.sweep.axis2 = a.axis2.clone();
            }
            if a.range2.is_some() {
                s.sweep.range2 = a.range2.clone();
            }
            if let Some(m) = a.method {
                s.sweep.method = m;
            }
        }
        Command::Separability(a) => {
            let p = &mut s.separability;
            p.scale = a.scale.unwrap_or(p.scale);
            p.points = a.points.unwrap_or(p.points);
            p.method = a.method.unwrap_or(p.method);
            p.baseline_trials = a.baseline_trials.unwrap_or(p.baseline_trials);
        }
        Command::Budget(a) => {
            if !a.c0.is_empty() {
                s.budget.c0 = a.c0.clone();
            }
            s.budget.x_over_xtl = a.x_over_xtl.unwrap_or(s.budget.x_over_xtl);
            if let Some(p) = &a.psuccess {
                s.budget.psuccess = p.clone();
            }
        }
        Command::Ecz { epsilon } => {
            if let Some(e) = epsilon {
                s.ecz.epsilon = e.clone();
            }
        }
        Command::Decay(a) => {
            s.decay.model = a.model.unwrap_or(s.decay.model);
            if !a.cooperativity.is_empty() {
                s.decay.cooperativity = a.cooperativity.clone();
            }
            if !a.r.is_empty() {
                s.decay.r = a.r.clone();
            }
            s.decay.gamma_r = a.gamma_r.or(s.decay.gamma_r);
        }
        Command::Validate { points, scale } => {
            s.validate.points = points.unwrap_or(s.validate.points);
            s.validate.scale = scale.unwrap_or(s.validate.scale);
        }
        Command::Table { data } => {
            if data.is_some() {
                s.budget.data = data.clone();
            }
        }
    }
}

fn jobs(cli: &Cli) -> anyhow::Result<usize> {
    if let Ok(v) = std::env::var("HQST_JOBS") {
        let n: usize = v.trim().parse().map_err(|_| anyhow::anyhow!("HQST_JOBS must be a positive integer, got `{v}`"))?;
        if n == 0 {
            anyhow::bail!("HQST_JOBS must be a positive integer, got `{v}`");
        }
        return Ok(n);
    }
    match cli.jobs {
        Some(0) => anyhow::bail!("--jobs must be at least 1"),
        Some(n) => Ok(n),
        None => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

/// Setup failures (bad flags, config, environment) are usage errors; anything
/// the library rejects is a domain error.
enum Failure {
    Usage(anyhow::Error),
    Run(anyhow::Error),
}

fn run(cli: Cli) -> Result<(), Failure> {
    let mut scenario = match &cli.config {
        Some(p) => Scenario::load(p).map_err(Failure::Usage)?,
        None => Scenario::default(),
    };
    merge(&cli, &mut scenario);
    let n = jobs(&cli).map_err(Failure::Usage)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map_err(|e| Failure::Usage(anyhow::anyhow!("thread pool: {e}")))?;
    pool.install(|| commands::dispatch(&cli.command, &scenario)).map_err(Failure::Run)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e:#}");
            if e.chain().any(|c| c.downcast_ref::<hqst::Error>().is_some()) {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
