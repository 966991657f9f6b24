use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use bmatrix::experiment::{
    emit_batch, emit_outputs, generate_random_memories, render_batch_summary, render_report,
    run_batch, run_eval, run_learn, write_memories, BatchSpec, ExperimentReport, ExperimentSpec,
    MemorySource, OutputPaths, ProximitySource,
};
use bmatrix::memory::format_memories;
use bmatrix::{LearningConfig, Result};

#[derive(Parser)]
#[command(
    name = "bmatrix",
    version,
    about = "B-matrix associative memory experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate retrieval without learning.
    Eval(RunArgs),
    /// Evaluate, run delta-rule learning, and re-evaluate.
    Learn(RunArgs),
    /// Write a seeded random memory file.
    GenMemories(GenArgs),
    /// Run learning over many seeds and summarise the before/after rates.
    Batch(BatchArgs),
}

#[derive(Args, Clone)]
struct LearningArgs {
    /// Widrow-Hoff learning rate.
    #[arg(long, default_value_t = 0.1)]
    eta: f64,
    /// Update cap per B-matrix row.
    #[arg(long, default_value_t = 100)]
    max_inner: usize,
    /// Teach-attempt budget (default 10·n·m).
    #[arg(long)]
    max_outer: Option<usize>,
    /// Shuffle equally distant targets with this seed instead of taking
    /// them in memory order.
    #[arg(long)]
    tie_seed: Option<u64>,
}

impl LearningArgs {
    fn config(&self) -> LearningConfig {
        LearningConfig {
            eta: self.eta,
            max_inner: self.max_inner,
            max_outer: self.max_outer,
            tie_seed: self.tie_seed,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    nodes: Option<usize>,
    /// Number of random memories (default max(3, n/4)).
    #[arg(long, conflicts_with = "memories_file")]
    memories: Option<usize>,
    #[arg(long)]
    memories_file: Option<PathBuf>,
    /// `linear` or a path to an n×n distance matrix.
    #[arg(long, default_value = "linear")]
    proximity: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    learning: LearningArgs,
    /// Write the structured report here instead of stdout.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    activity_map: Option<PathBuf>,
    /// Allow random memory counts m ≥ n.
    #[arg(long)]
    allow_overcapacity: bool,
    /// Record wall-clock time in the report (outputs stop being reproducible).
    #[arg(long)]
    wall_clock: bool,
}

impl RunArgs {
    fn spec(&self) -> ExperimentSpec {
        let memories = match &self.memories_file {
            Some(path) => MemorySource::File(path.clone()),
            None => MemorySource::Random {
                count: self.memories,
            },
        };
        let proximity = match self.proximity.as_str() {
            "linear" => ProximitySource::Linear,
            path => ProximitySource::File(PathBuf::from(path)),
        };
        ExperimentSpec {
            nodes: self.nodes,
            memories,
            proximity,
            seed: self.seed,
            learning: self.learning.config(),
            allow_overcapacity: self.allow_overcapacity,
            outputs: OutputPaths {
                report: self.report.clone(),
                csv: self.csv.clone(),
                activity_map: self.activity_map.clone(),
            },
            wall_clock: self.wall_clock,
        }
    }
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    nodes: usize,
    #[arg(long)]
    memories: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BatchArgs {
    /// Comma-separated node counts, e.g. `8,9,12`.
    #[arg(long, value_delimiter = ',', required = true)]
    nodes: Vec<usize>,
    /// Memories per run (default max(3, n/4) per size).
    #[arg(long)]
    memories: Option<usize>,
    #[arg(long, default_value_t = 50)]
    runs: usize,
    /// Base seed; run i uses seed + i.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    learning: LearningArgs,
    /// Per-size summary CSV (stdout when omitted).
    #[arg(long)]
    report: Option<PathBuf>,
    /// Per-run CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    allow_overcapacity: bool,
}

fn finish_run(report: &ExperimentReport, spec: &ExperimentSpec) -> Result<()> {
    emit_outputs(report, spec)?;
    if spec.outputs.report.is_none() {
        print!("{}", render_report(report));
    } else {
        println!(
            "rate_before={} rate_after={}",
            report.rate_before(),
            report.rate_after()
        );
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Eval(args) => {
            let spec = args.spec();
            finish_run(&run_eval(&spec)?, &spec)
        }
        Command::Learn(args) => {
            let spec = args.spec();
            finish_run(&run_learn(&spec)?, &spec)
        }
        Command::GenMemories(args) => {
            let m = args
                .memories
                .unwrap_or_else(|| bmatrix::experiment::default_memory_count(args.nodes));
            let set = generate_random_memories(args.nodes, m, args.seed)?;
            let header = format!("# nodes={} memories={} seed={}\n", args.nodes, m, args.seed);
            match &args.out {
                Some(path) => write_memories(path, &set, &header),
                None => {
                    print!("{header}{}", format_memories(&set));
                    Ok(())
                }
            }
        }
        Command::Batch(args) => {
            let batch = BatchSpec {
                sizes: args.nodes.clone(),
                memories: args.memories,
                runs: args.runs,
                base_seed: args.seed,
                learning: args.learning.config(),
                allow_overcapacity: args.allow_overcapacity,
            };
            let report = run_batch(&batch)?;
            emit_batch(&report, args.report.as_deref(), args.csv.as_deref())?;
            if args.report.is_none() {
                print!("{}", render_batch_summary(&report));
            }
            Ok(())
        }
    }
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments");
            eprintln!(
                "error: usage: {}",
                one_line(first.trim_start_matches("error: "))
            );
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}: {}", e.kind(), one_line(&e.to_string()));
            ExitCode::FAILURE
        }
    }
}
