use clap::{Args, Parser, Subcommand};
use pfaffwalk_cli::{
    cmd_figure, cmd_gap, cmd_kernel, cmd_simulate, cmd_verify, configure_threads, resolve,
    CliError, Overrides,
};

/// Mixed annihilating/coalescing walks on Z and their Pfaffian kernels.
#[derive(Parser)]
#[command(name = "pfaffwalk", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// JSON configuration file; flags override its fields.
    #[arg(long, global = true)]
    config: Option<String>,
    /// Reaction parameter in [0, 1].
    #[arg(long, global = true)]
    theta: Option<f64>,
    /// Observation time.
    #[arg(long, global = true)]
    t: Option<f64>,
    /// Diffusive scale for lattice/continuum comparisons.
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    /// Base RNG seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker thread cap.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output CSV path (stdout when omitted).
    #[arg(long, global = true)]
    out: Option<String>,
    /// Model variant: bulk | halfspace | killed | reflected.
    #[arg(long, global = true)]
    variant: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a trajectory ensemble and emit Monte Carlo estimates.
    Simulate(CommonArgs),
    /// Solve the scalar kernel and emit the grid with matrix entries.
    Kernel(CommonArgs),
    /// Run a verification suite: pfaffian | duality | scaling | gaps.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// Which suite to run.
        suite: String,
    },
    /// Emit absorbing/reflecting intensity profiles.
    Figure(CommonArgs),
    /// Emit gap-probability tables.
    Gap(CommonArgs),
}

fn overrides_of(a: &CommonArgs) -> Overrides {
    Overrides {
        theta: a.theta,
        t: a.t,
        epsilon: a.epsilon,
        seed: a.seed,
        threads: a.threads,
        out: a.out.clone(),
        variant: a.variant.clone(),
    }
}

fn run() -> Result<(), CliError> {
    let cli = Cli::parse();
    let (common, action): (&CommonArgs, Box<dyn FnOnce(&pfaffwalk_cli::RunConfig) -> Result<(), CliError>>) =
        match &cli.command {
            Command::Simulate(c) => (c, Box::new(cmd_simulate)),
            Command::Kernel(c) => (c, Box::new(cmd_kernel)),
            Command::Figure(c) => (c, Box::new(cmd_figure)),
            Command::Gap(c) => (c, Box::new(cmd_gap)),
            Command::Verify { common, suite } => {
                let suite = suite.clone();
                (common, Box::new(move |cfg| cmd_verify(cfg, &suite)))
            }
        };
    let cfg = resolve(common.config.as_deref(), &overrides_of(common))?;
    configure_threads(cfg.threads);
    action(&cfg)
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
