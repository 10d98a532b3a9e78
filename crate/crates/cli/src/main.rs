use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use rfed_cli::{cmd_compare, cmd_consensus_bench, cmd_run, DatasetSpec, ExperimentSpec, Task};
use rfed_core::consensus::{ConsensusConfig, ConsensusMethod};
use rfed_core::fedopt::{Algorithm, AlgorithmConfig, IterateChoice};

/// Federated optimization over Riemannian manifolds: experiment driver.
#[derive(Parser)]
#[command(name = "rfed", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one algorithm, persisting histories, aggregates and charts.
    Run(RunArgs),
    /// Run all three algorithms on identical data and initial points.
    Compare(RunArgs),
    /// Benchmark the two consensus methods on random sphere configurations.
    ConsensusBench(ConsensusBenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum TaskArg {
    Pca,
    Kpca,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Rfedsvrg,
    Rfedavg,
    Rfedprox,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConsensusArg {
    Tangent,
    Karcher,
}

#[derive(Clone, Copy, ValueEnum)]
enum OptionArg {
    Last,
    Sample,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_enum, default_value = "pca")]
    task: TaskArg,
    /// `gaussian`, `csv:PATH` or `idx:PATH`.
    #[arg(long, default_value = "gaussian")]
    dataset: String,
    /// Ambient dimension for the gaussian dataset.
    #[arg(long, default_value_t = 20)]
    d: usize,
    /// Sample count for the gaussian dataset.
    #[arg(long, default_value_t = 1000)]
    p: usize,
    /// Subspace rank (1 for pca).
    #[arg(long, default_value_t = 1)]
    r: usize,
    /// Number of clients.
    #[arg(long, default_value_t = 10)]
    n: usize,
    /// Clients sampled per round; defaults to n/10 (at least 1).
    #[arg(long)]
    k: Option<usize>,
    /// Local steps per client; defaults to 1 for rfedsvrg and 5 otherwise.
    #[arg(long)]
    tau: Option<usize>,
    /// Local step size.
    #[arg(long, default_value_t = 0.1)]
    eta: f64,
    /// Proximal weight; defaults to n/10.
    #[arg(long)]
    mu: Option<f64>,
    /// Consensus moving-average weight.
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// Communication rounds.
    #[arg(long, default_value_t = 600)]
    rounds: usize,
    #[arg(long, default_value_t = 10)]
    repeats: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Ignored by `compare`, which always runs all three.
    #[arg(long, value_enum, default_value = "rfedsvrg")]
    algorithm: AlgorithmArg,
    #[arg(long, value_enum, default_value = "tangent")]
    consensus: ConsensusArg,
    #[arg(long = "server-option", value_enum, default_value = "last")]
    server_option: OptionArg,
    #[arg(long = "client-option", value_enum, default_value = "last")]
    client_option: OptionArg,
    /// Subtract the per-feature mean before building covariances.
    #[arg(long)]
    center: bool,
    /// Center and scale every feature to unit variance.
    #[arg(long)]
    standardize: bool,
    #[arg(long = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct ConsensusBenchArgs {
    /// Comma-separated sphere dimensions.
    #[arg(long = "d-list", value_delimiter = ',', default_value = "100,200,500")]
    d_list: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    k: usize,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "out")]
    out: PathBuf,
}

fn experiment_spec(args: &RunArgs) -> Result<ExperimentSpec, rfed_core::Error> {
    let algorithm = match args.algorithm {
        AlgorithmArg::Rfedsvrg => Algorithm::RFedSvrg,
        AlgorithmArg::Rfedavg => Algorithm::RFedAvg,
        AlgorithmArg::Rfedprox => Algorithm::RFedProx,
    };
    let tau = args.tau.unwrap_or(match algorithm {
        Algorithm::RFedSvrg => 1,
        _ => 5,
    });
    let consensus = ConsensusConfig {
        method: match args.consensus {
            ConsensusArg::Tangent => ConsensusMethod::TangentSpace,
            ConsensusArg::Karcher => ConsensusMethod::Karcher,
        },
        beta: args.beta,
        ..ConsensusConfig::default()
    };
    let choice = |o: OptionArg| match o {
        OptionArg::Last => IterateChoice::Last,
        OptionArg::Sample => IterateChoice::UniformSample,
    };
    let cfg = AlgorithmConfig {
        algorithm,
        num_clients: args.n,
        clients_per_round: args.k.unwrap_or((args.n / 10).max(1)),
        rounds: args.rounds,
        local_steps: tau,
        step_size: args.eta,
        server_option: choice(args.server_option),
        client_option: choice(args.client_option),
        prox_weight: args.mu.unwrap_or(args.n as f64 / 10.0),
        consensus,
        seed: args.seed,
    };
    Ok(ExperimentSpec {
        task: match args.task {
            TaskArg::Pca => Task::Pca,
            TaskArg::Kpca => Task::Kpca,
        },
        dataset: DatasetSpec::parse(&args.dataset, args.p, args.d)?,
        r: args.r,
        algorithm: cfg,
        output_dir: args.out.clone(),
        repeats: args.repeats,
        center: args.center,
        standardize: args.standardize,
    })
}

fn init_workers() {
    if let Ok(text) = std::env::var("RFED_WORKERS") {
        if let Ok(n) = text.parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn execute(cli: Cli) -> Result<(), rfed_core::Error> {
    match cli.command {
        Command::Run(args) => {
            let spec = experiment_spec(&args)?;
            cmd_run(&spec)?;
            println!("results written to {}", spec.output_dir.display());
        }
        Command::Compare(args) => {
            let spec = experiment_spec(&args)?;
            cmd_compare(&spec)?;
            println!("results written to {}", spec.output_dir.display());
        }
        Command::ConsensusBench(args) => {
            cmd_consensus_bench(&args.d_list, args.k, args.trials, args.seed, &args.out)?;
            println!("results written to {}", args.out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    init_workers();
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(2)
        }
    }
}
