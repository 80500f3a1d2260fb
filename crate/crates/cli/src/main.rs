use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use shadow_cli::config::{resolve_seed, SEED_ENV};
use shadow_cli::experiment::{self, ResultRow};
use shadow_cli::table::weights_table;
use shadow_cli::{CliError, ExperimentConfig, Overrides};
use shadow_core::verify::{run_suite, Suite};
use shadow_core::weights::WeightKind;

#[derive(Parser)]
#[command(name = "shadows", version, about = "Classical shadow estimation with contractive unitaries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config and write one CSV row per (k, ensemble).
    Run(RunArgs),
    /// Like `run`, comparing contractive and random-Clifford side by side.
    FigureData(RunArgs),
    /// Print analytic Pauli weights and shadow norms.
    Weights(WeightArgs),
    /// Run built-in consistency checks.
    Verify {
        /// pauli, tableau, oracle, weights or all
        #[arg(default_value = "all")]
        suite: String,
    },
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment config
    config: PathBuf,
    /// Master seed (overrides the config and the SHADOWS_SEED variable)
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; 0 uses every core
    #[arg(long)]
    workers: Option<usize>,
    /// Snapshots per estimation
    #[arg(long)]
    snapshots: Option<u64>,
    /// Output CSV path; "-" writes to standard output
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Also write every snapshot as a tab-separated line to this file
    #[arg(long)]
    snapshot_log: Option<PathBuf>,
}

#[derive(Args)]
struct WeightArgs {
    /// Largest block size
    #[arg(long, default_value_t = 20)]
    k_max: usize,
    /// Comma-separated kinds (default: all)
    #[arg(long, value_delimiter = ',')]
    ensembles: Vec<String>,
    /// Defect count for contractive_defects rows
    #[arg(long, default_value_t = 1)]
    q: usize,
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    match path {
        Some(p) if p != Path::new("-") => Ok(Box::new(BufWriter::new(File::create(p)?))),
        _ => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

fn run(args: RunArgs, figure: bool) -> Result<(), CliError> {
    let mut cfg = ExperimentConfig::from_path(&args.config)?;
    cfg.apply(&Overrides {
        seed: args.seed,
        workers: args.workers,
        snapshots: args.snapshots,
        output: args.output,
    });
    cfg.validate()?;
    if figure {
        cfg = experiment::figure_config(&cfg);
    }
    let env_seed = std::env::var(SEED_ENV).ok();
    let seed = resolve_seed(None, cfg.master_seed, env_seed.as_deref())?;
    let workers = cfg.workers.unwrap_or(0);

    let mut log_file = match &args.snapshot_log {
        Some(p) => Some(BufWriter::new(File::create(p)?)),
        None => None,
    };
    let start = Instant::now();
    let mut report = |r: &ResultRow| {
        eprintln!(
            "{} k={} {}: mean {} ± {} (exact {}), variance {} [{:.1} s]",
            cfg.name,
            r.k,
            r.ensemble,
            r.mean,
            r.std_error,
            r.exact_expectation,
            r.variance,
            start.elapsed().as_secs_f64()
        );
    };
    let rows = experiment::run_experiment(
        &cfg,
        seed,
        workers,
        log_file.as_mut().map(|f| f as &mut dyn Write),
        &mut report,
    )?;
    if let Some(mut f) = log_file {
        f.flush()?;
    }
    let mut out = open_output(cfg.output_path.as_deref())?;
    if figure {
        experiment::write_figure_csv(&rows, &mut out)?;
    } else {
        experiment::write_results_csv(&rows, &mut out)?;
    }
    out.flush()?;
    Ok(())
}

fn weights(args: WeightArgs) -> Result<(), CliError> {
    let kinds = if args.ensembles.is_empty() {
        WeightKind::ALL.to_vec()
    } else {
        args.ensembles
            .iter()
            .map(|s| s.parse().map_err(|e: shadow_core::Error| CliError::Config(e.to_string())))
            .collect::<Result<_, _>>()?
    };
    let mut out = io::stdout().lock();
    weights_table(args.k_max, &kinds, args.q, &mut out)
}

fn verify(suite: &str) -> Result<(), CliError> {
    let suite: Suite = suite.parse().map_err(|e: shadow_core::Error| CliError::Config(e.to_string()))?;
    let outcomes = run_suite(suite);
    let failed = outcomes.iter().filter(|o| !o.passed()).count();
    for o in &outcomes {
        println!("{o}");
    }
    println!("{} of {} checks passed", outcomes.len() - failed, outcomes.len());
    if failed > 0 {
        Err(CliError::Runtime(format!("{failed} checks failed")))
    } else {
        Ok(())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args, false),
        Command::FigureData(args) => run(args, true),
        Command::Weights(args) => weights(args),
        Command::Verify { suite } => verify(&suite),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("shadows: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
