use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pl_bai::bounds::complexity_terms;
use pl_bai::experiments::{self, Algorithm, EnvSource, ExperimentSpec, SweepAxis};
use pl_bai::{Error, InstanceFile, PlInstance, Result};

#[derive(Parser)]
#[command(name = "pl-bai", version, about = "Best-item identification experiments for Plackett-Luce models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in environments.
    ListEnvs,
    /// Run a seeded sweep and write its CSV.
    Run(RunArgs),
    /// Print the complexity terms of an environment.
    Bounds(BoundsArgs),
}

#[derive(Args)]
struct EnvArgs {
    /// Built-in environment name.
    #[arg(long, conflicts_with = "theta_file", required_unless_present = "theta_file")]
    env: Option<String>,
    /// JSON file of the form {"theta": [...]}.
    #[arg(long)]
    theta_file: Option<PathBuf>,
}

impl EnvArgs {
    fn source(&self) -> Result<EnvSource> {
        match (&self.env, &self.theta_file) {
            (Some(name), _) => Ok(EnvSource::Named(name.clone())),
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.clone(), source })?;
                let spec: InstanceFile = serde_json::from_str(&text).map_err(|e| Error::Format {
                    path: path.clone(),
                    message: e.to_string(),
                })?;
                Ok(EnvSource::Inline(spec.theta))
            }
            (None, None) => unreachable!("clap requires one of --env and --theta-file"),
        }
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    env: EnvArgs,
    /// pac-wrapper, uniform-allocation or pac-best-item.
    #[arg(long, default_value = "pac-wrapper")]
    algo: Algorithm,
    #[arg(long, default_value_t = 5)]
    k: usize,
    #[arg(long, default_value_t = 1)]
    m: usize,
    #[arg(long, default_value_t = 0.01)]
    eps: f64,
    #[arg(long, default_value_t = 0.01)]
    delta: f64,
    /// Play budget for uniform-allocation.
    #[arg(long)]
    q: Option<u64>,
    /// none, eps:<v1,v2,..>, m:<v1,..> or q:<v1,..>.
    #[arg(long, default_value = "none")]
    sweep: SweepAxis,
    #[arg(long, default_value_t = 50)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sweep CSV path.
    #[arg(long, default_value = "sweep.csv")]
    out: PathBuf,
    /// Also write an SVG plot here.
    #[arg(long)]
    plot: Option<PathBuf>,
    /// Also write mean per-item play counts here.
    #[arg(long)]
    survival: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    #[command(flatten)]
    env: EnvArgs,
    #[arg(long, default_value_t = 5)]
    k: usize,
    #[arg(long, default_value_t = 1)]
    m: usize,
    #[arg(long, default_value_t = 0.01)]
    eps: f64,
    #[arg(long, default_value_t = 0.01)]
    delta: f64,
    /// Budget used by the fixed-budget terms.
    #[arg(long, default_value_t = 100_000)]
    q: u64,
}

fn list_envs() {
    println!("name\tn\tdelta_min");
    for (name, n, dmin) in experiments::list() {
        println!("{name}\t{n}\t{dmin}");
    }
}

fn run(args: RunArgs) -> Result<()> {
    let spec = ExperimentSpec {
        env: args.env.source()?,
        algo: args.algo,
        axis: args.sweep,
        reps: args.reps,
        base_seed: args.seed,
        k: args.k,
        m: args.m,
        eps: args.eps,
        delta: args.delta,
        q: args.q,
    };
    let result = experiments::run_sweep(&spec)?;
    experiments::emit_csv(&result, &args.out)?;
    println!("axis_value\tmean_plays\tstd_plays\tsuccess_rate");
    for r in &result.rows {
        println!("{}\t{:.1}\t{:.1}\t{:.3}", r.axis_value, r.mean_plays, r.std_plays, r.success_rate);
    }
    println!("wrote {}", args.out.display());
    if let Some(path) = &args.survival {
        experiments::emit_survival_csv(&result, path)?;
        println!("wrote {}", path.display());
    }
    if let Some(path) = &args.plot {
        experiments::emit_plot(&result, path)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn bounds(args: BoundsArgs) -> Result<()> {
    let model: PlInstance = args.env.source()?.load()?;
    let t = complexity_terms(&model, args.k, args.m, args.eps, args.delta, args.q)?;
    println!("ub_pac\t{}", t.ub_pac);
    println!("lb_winner\t{}", t.lb_winner);
    println!("lb_topm\t{}", t.lb_topm);
    println!("delta_tilde\t{}", t.delta_tilde);
    println!("ua_success_lb\t{}", t.ua_success_lb);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::ListEnvs => {
            list_envs();
            Ok(())
        }
        Command::Run(args) => run(args),
        Command::Bounds(args) => bounds(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
