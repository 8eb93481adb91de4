use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use ensemble_select::{
    classical_kth, estimate_domain, generate_random, load_database, repeated_count, save_database,
    select_kth_in, select_real_in, Domain, Error, MeasurementModel, NoiseMode, SelectConfig,
    ValueKind,
};
use ensemble_select_cli::bench::{self, EpsilonSpec, Summary, Sweep};
use ensemble_select_cli::{demo, exit_code, value_json, EXIT_MISMATCH, EXIT_OK};

#[derive(Parser)]
#[command(
    name = "ensel",
    version,
    about = "Ensemble-counting selection simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Replay the eight-element worked example and check it against the golden trace
    Demo(DemoArgs),
    /// Find the k-th smallest element of a database file
    Select(SelectArgs),
    /// Run one ensemble count at threshold y
    Count(CountArgs),
    /// Generate a random database file
    Gen(GenArgs),
    /// Sweep register width, domain size, accuracy and trials; emit CSV
    Bench(BenchArgs),
}

#[derive(Args, Clone)]
struct ModelArgs {
    /// Measurement accuracy (default: register width + 2)
    #[arg(long)]
    epsilon: Option<u32>,
    /// exact | noise | quantized
    #[arg(long, default_value = "exact")]
    mode: NoiseMode,
    /// Readouts averaged per count
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    trials: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl ModelArgs {
    fn model(&self) -> MeasurementModel {
        MeasurementModel {
            epsilon: self.epsilon,
            mode: self.mode,
            seed: self.seed,
        }
    }
}

#[derive(Args)]
struct DemoArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Start the lower bound at the domain minimum rather than one below it
    #[arg(long)]
    paper_init: bool,
    /// Print each threshold oracle's truth table and permutation
    #[arg(long)]
    show_oracle: bool,
}

#[derive(Args)]
struct SelectArgs {
    #[arg(long)]
    db: PathBuf,
    #[arg(long)]
    k: usize,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    paper_init: bool,
    /// Emit one JSON line per run
    #[arg(long)]
    trace: bool,
    /// Probes for real-valued domains
    #[arg(long, default_value_t = 20)]
    max_iters: u32,
    /// Ignore the declared domain and bracket the answer from sampled elements
    #[arg(long)]
    estimate_domain: bool,
    #[arg(long, default_value_t = 10)]
    max_attempts: usize,
}

#[derive(Args)]
struct CountArgs {
    #[arg(long)]
    db: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    y: f64,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    count: usize,
    #[arg(long, allow_negative_numbers = true)]
    min: f64,
    #[arg(long, allow_negative_numbers = true)]
    max: f64,
    #[arg(long)]
    real: bool,
    #[arg(long)]
    distinct: bool,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    /// Register widths (N = 2^n)
    #[arg(long, value_delimiter = ',', default_values_t = [3u32, 4, 5, 6])]
    n: Vec<u32>,
    #[arg(long, value_delimiter = ',', default_values_t = [16u64, 256])]
    domain_size: Vec<u64>,
    /// Absolute accuracies; overrides --epsilon-offset
    #[arg(long, value_delimiter = ',')]
    epsilon: Vec<u32>,
    /// Accuracies relative to n
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_values_t = [2i32])]
    epsilon_offset: Vec<i32>,
    #[arg(long, value_delimiter = ',', default_values_t = [1u32])]
    trials: Vec<u32>,
    #[arg(long, default_value = "exact")]
    mode: NoiseMode,
    /// Instances per sweep point
    #[arg(long, default_value_t = 10)]
    seeds: u64,
    #[arg(long, default_value_t = 0)]
    base_seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Demo(args) => cmd_demo(args),
        Command::Select(args) => cmd_select(args),
        Command::Count(args) => cmd_count(args),
        Command::Gen(args) => cmd_gen(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn cmd_demo(args: DemoArgs) -> Result<u8, Error> {
    let config = SelectConfig {
        model: args.model.model(),
        trials: args.model.trials,
        paper_init: args.paper_init,
    };
    let out = demo::run_demo(&config, args.show_oracle)?;
    print!("{}", out.text);
    match out.mismatch {
        None => Ok(EXIT_OK),
        Some(field) => {
            eprintln!("golden trace mismatch: {field}");
            Ok(EXIT_MISMATCH)
        }
    }
}

fn cmd_select(args: SelectArgs) -> Result<u8, Error> {
    let db = load_database(&args.db)?;
    let model = args.model.model();
    let config = SelectConfig {
        model,
        trials: args.model.trials,
        paper_init: args.paper_init,
    };
    let kind = db.kind();

    let mut queries = 0;
    let bracket = if args.estimate_domain {
        let est = estimate_domain(&db, args.k, &model, args.max_attempts)?;
        eprintln!(
            "estimated bracket [{}, {}] after {} attempts",
            est.domain.min, est.domain.max, est.attempts
        );
        queries += est.queries;
        est.domain
    } else {
        db.domain()
    };
    let trace = match kind {
        ValueKind::Integer => select_kth_in(&db, args.k, bracket, &config)?,
        ValueKind::Real => select_real_in(&db, args.k, bracket, &config, args.max_iters)?,
    };
    queries += trace.queries;

    if args.trace {
        for (i, run) in trace.runs.iter().enumerate() {
            let line = json!({
                "run": i + 1,
                "u": value_json(run.u, kind),
                "v": value_json(run.v, kind),
                "y": value_json(run.y, kind),
                "c": run.c,
            });
            println!("{line}");
        }
    }
    let classical = classical_kth(&db, args.k)?;
    let summary = json!({
        "k": args.k,
        "result": value_json(trace.result, kind),
        "runs": trace.runs.len(),
        "queries": queries,
        "classical": value_json(classical, kind),
    });
    println!("{summary}");
    Ok(EXIT_OK)
}

fn cmd_count(args: CountArgs) -> Result<u8, Error> {
    let db = load_database(&args.db)?;
    let r = repeated_count(&db, args.y, &args.model.model(), args.model.trials)?;
    let out = json!({
        "c": r.c,
        "alpha": r.alpha,
        "alpha_true": r.alpha_true,
        "trials": r.trials_used,
        "queries": r.queries,
    });
    println!("{out}");
    Ok(EXIT_OK)
}

fn cmd_gen(args: GenArgs) -> Result<u8, Error> {
    let kind = if args.real {
        ValueKind::Real
    } else {
        ValueKind::Integer
    };
    let domain = Domain::new(args.min, args.max, kind)?;
    let db = generate_random(args.count, domain, args.seed, args.distinct)?;
    save_database(&db, &args.out)?;
    eprintln!("wrote {} elements to {}", db.len(), args.out.display());
    Ok(EXIT_OK)
}

fn cmd_bench(args: BenchArgs) -> Result<u8, Error> {
    let epsilons = if args.epsilon.is_empty() {
        args.epsilon_offset
            .iter()
            .map(|&o| EpsilonSpec::Offset(o))
            .collect()
    } else {
        args.epsilon
            .iter()
            .map(|&e| EpsilonSpec::Absolute(e))
            .collect()
    };
    if let Some(&n) = args
        .n
        .iter()
        .find(|&&n| n == 0 || n > ensemble_select::MAX_QUBITS)
    {
        return Err(Error::RegisterSize {
            n,
            max: ensemble_select::MAX_QUBITS,
        });
    }
    if args.domain_size.contains(&0) {
        return Err(Error::InvalidDomain("domain size must be positive".into()));
    }
    let sweep = Sweep {
        widths: args.n,
        domain_sizes: args.domain_size,
        epsilons,
        trials: args.trials,
        mode: args.mode,
        seeds: args.seeds,
        base_seed: args.base_seed,
    };
    let records = bench::run_sweep(&sweep)?;
    println!("{}", bench::CSV_HEADER);
    for r in &records {
        println!("{}", r.csv_row());
    }
    let summary = Summary::of(&records);
    eprintln!(
        "rows={} correct={} rate={:.4} max_runs={} bound_violations={}",
        summary.rows,
        summary.correct,
        summary.correctness_rate(),
        summary.max_runs,
        summary.bound_violations
    );
    let exact_failure = args.mode == NoiseMode::Exact && summary.correct != summary.rows;
    if exact_failure || summary.bound_violations > 0 {
        eprintln!("bench check failed");
        return Ok(EXIT_MISMATCH);
    }
    Ok(EXIT_OK)
}
