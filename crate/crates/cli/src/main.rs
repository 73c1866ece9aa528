//! Command-line front end: generate question suites, preprocess datasets,
//! run evaluation matrices, rebuild reports, and inspect traces.

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use decompose_tom::harness::{
    build_report, load_results, render_csv, render_text, run_matrix, trace_inspect, trace_path,
    MatrixSpec, RunResult,
};
use decompose_tom::llm::{LlmConfig, LlmReasoner};
use decompose_tom::model::{load_records, save_records};
use decompose_tom::oracle::{write_suite, Deception, SuiteSpec};
use decompose_tom::preprocess::disambiguate_hitom;
use decompose_tom::symbolic::SymbolicReasoner;
use decompose_tom::{ChunkUnit, Strategy};
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "decompose-tom")]
#[command(about = "Perspective-simulation question answering over belief stories")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic question suite with oracle gold labels
    Generate {
        /// Output JSON-lines file
        #[arg(long)]
        out: PathBuf,

        /// Seed for the whole suite
        #[arg(long, default_value_t = 0)]
        seed: u64,

        /// Records per (order, category) cell
        #[arg(long, default_value_t = 20)]
        per_cell: usize,

        /// Belief nesting depths to cover
        #[arg(long, value_delimiter = ',', default_values_t = [0usize, 1, 2, 3, 4])]
        orders: Vec<usize>,

        /// Story categories to cover; defaults to both
        #[arg(long, value_enum, value_delimiter = ',')]
        categories: Vec<CategoryArg>,

        /// Agents per story
        #[arg(long, default_value_t = 5)]
        agents: usize,

        /// Rooms per story
        #[arg(long, default_value_t = 2)]
        rooms: usize,

        /// Containers per room
        #[arg(long, default_value_t = 4)]
        containers_per_room: usize,

        /// Object relocations per story
        #[arg(long, default_value_t = 2)]
        moves: usize,

        /// Probability of an irrelevant statement before each departure
        #[arg(long, default_value_t = 0.25)]
        distractor_rate: f64,
    },

    /// Rewrite a dataset with ambiguity-removing container lines
    Preprocess {
        /// Input JSON-lines dataset
        #[arg(long)]
        dataset: PathBuf,

        /// Output JSON-lines file
        #[arg(long)]
        out: PathBuf,
    },

    /// Evaluate strategies over a dataset and write results and reports
    Run {
        /// Input JSON-lines dataset
        #[arg(long)]
        dataset: PathBuf,

        /// Strategy to run; repeat for several, defaults to all four
        #[arg(long = "strategy", value_enum)]
        strategies: Vec<StrategyArg>,

        /// Reasoner backend
        #[arg(long, value_enum, default_value_t = BackendArg::Symbolic)]
        backend: BackendArg,

        /// Chat-completions endpoint base URL (llm backend)
        #[arg(long, default_value = "http://127.0.0.1:8000/v1")]
        base_url: String,

        /// Model name to request (llm backend)
        #[arg(long)]
        model: Option<String>,

        /// Re-chunk stories at this granularity
        #[arg(long, value_enum)]
        chunk_unit: Option<ChunkUnitArg>,

        /// Worker threads; 1 keeps results in record order
        #[arg(long, default_value_t = 1)]
        workers: usize,

        /// Output directory for results, traces, and reports
        #[arg(long)]
        out: PathBuf,

        /// Response cache directory (llm backend); defaults to OUT/cache
        #[arg(long)]
        cache_dir: Option<PathBuf>,
    },

    /// Rebuild reports from persisted results
    Report {
        /// Output directory holding results.jsonl
        #[arg(long)]
        out: PathBuf,
    },

    /// Print an annotated replay of one persisted trace
    Trace {
        /// Output directory holding traces/
        #[arg(long)]
        out: PathBuf,

        /// Dataset the run evaluated
        #[arg(long)]
        dataset: PathBuf,

        /// Record id to inspect
        #[arg(long)]
        id: String,

        /// Strategy whose trace to inspect
        #[arg(long, value_enum)]
        strategy: StrategyArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CategoryArg {
    Tell,
    #[value(name = "no_tell")]
    NoTell,
}

impl CategoryArg {
    fn deception(self) -> Deception {
        match self {
            CategoryArg::Tell => Deception::Tell,
            CategoryArg::NoTell => Deception::NoTell,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Mc,
    Cot,
    Simtom,
    Decompose,
}

impl StrategyArg {
    fn strategy(self) -> Strategy {
        match self {
            StrategyArg::Mc => Strategy::ZeroShotMc,
            StrategyArg::Cot => Strategy::ChainOfThought,
            StrategyArg::Simtom => Strategy::SimTom,
            StrategyArg::Decompose => Strategy::Decompose,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BackendArg {
    Symbolic,
    Llm,
}

#[derive(Clone, Copy, ValueEnum)]
enum ChunkUnitArg {
    Sentence,
    Line,
    Turn,
}

impl ChunkUnitArg {
    fn unit(self) -> ChunkUnit {
        match self {
            ChunkUnitArg::Sentence => ChunkUnit::Sentence,
            ChunkUnitArg::Line => ChunkUnit::Line,
            ChunkUnitArg::Turn => ChunkUnit::DialogueTurn,
        }
    }
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Generate {
            out,
            seed,
            per_cell,
            orders,
            categories,
            agents,
            rooms,
            containers_per_room,
            moves,
            distractor_rate,
        } => {
            let deceptions = if categories.is_empty() {
                vec![Deception::Tell, Deception::NoTell]
            } else {
                categories.iter().map(|c| c.deception()).collect()
            };
            let suite = SuiteSpec {
                per_cell,
                orders,
                deceptions,
                num_agents: agents,
                num_rooms: rooms,
                num_containers_per_room: containers_per_room,
                num_moves: moves,
                distractor_rate,
                seed,
            };
            let records = write_suite(&out, &suite)
                .with_context(|| format!("generating a suite into {}", out.display()))?;
            println!("wrote {} records to {}", records.len(), out.display());
        }

        Command::Preprocess { dataset, out } => {
            let mut records = load_records(&dataset)
                .with_context(|| format!("loading {}", dataset.display()))?;
            for record in &mut records {
                record.story = disambiguate_hitom(&record.story)
                    .with_context(|| format!("preprocessing record {}", record.id))?;
            }
            save_records(&out, &records)
                .with_context(|| format!("writing {}", out.display()))?;
            println!("wrote {} records to {}", records.len(), out.display());
        }

        Command::Run {
            dataset,
            strategies,
            backend,
            base_url,
            model,
            chunk_unit,
            workers,
            out,
            cache_dir,
        } => {
            let records = load_records(&dataset)
                .with_context(|| format!("loading {}", dataset.display()))?;
            let spec = MatrixSpec {
                strategies: if strategies.is_empty() {
                    Strategy::ALL.to_vec()
                } else {
                    strategies.iter().map(|s| s.strategy()).collect()
                },
                backend: match backend {
                    BackendArg::Symbolic => "symbolic".to_string(),
                    BackendArg::Llm => "llm".to_string(),
                },
                chunk_unit: chunk_unit.map(|u| u.unit()),
                workers,
                ..MatrixSpec::default()
            };
            let results = match backend {
                BackendArg::Symbolic => {
                    run_matrix(&records, &SymbolicReasoner::new(), &spec, &out)?
                }
                BackendArg::Llm => {
                    let Some(model) = model else {
                        bail!("--model is required with --backend llm");
                    };
                    let cache = cache_dir.unwrap_or_else(|| out.join("cache"));
                    let cfg = LlmConfig::new(base_url, model);
                    let reasoner = LlmReasoner::new(cfg, &cache)?;
                    let results = run_matrix(&records, &reasoner, &spec, &out)?;
                    println!("network calls: {}", reasoner.client().net_calls());
                    results
                }
            };
            let report = write_reports(&out, &results)?;
            print!("{report}");
            println!("evaluated {} (record, strategy) pairs", results.len());
        }

        Command::Report { out } => {
            let results = load_results(&out)
                .with_context(|| format!("loading results from {}", out.display()))?;
            if results.is_empty() {
                bail!("no results in {}", out.display());
            }
            let report = write_reports(&out, &results)?;
            print!("{report}");
        }

        Command::Trace {
            out,
            dataset,
            id,
            strategy,
        } => {
            let records = load_records(&dataset)
                .with_context(|| format!("loading {}", dataset.display()))?;
            let Some(record) = records.iter().find(|r| r.id == id) else {
                bail!("no record {id:?} in {}", dataset.display());
            };
            let path = trace_path(&out, &id, strategy.strategy());
            let dump = trace_inspect(&path, record)?;
            print!("{dump}");
        }
    }
    Ok(())
}

/// Renders the report from results, writes report.txt and report.csv into
/// the output directory, and returns the text form.
fn write_reports(out_dir: &Path, results: &[RunResult]) -> Result<String> {
    let table = build_report(results);
    let text = render_text(&table);
    let csv = render_csv(&table);
    fs::write(out_dir.join("report.txt"), &text)
        .with_context(|| format!("writing report.txt into {}", out_dir.display()))?;
    fs::write(out_dir.join("report.csv"), &csv)
        .with_context(|| format!("writing report.csv into {}", out_dir.display()))?;
    Ok(text)
}
