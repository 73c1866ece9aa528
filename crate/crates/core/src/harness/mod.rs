//! Evaluation matrix: strategies × records, persisted incrementally.
//!
//! Results append to `results.jsonl` as they are produced, so an
//! interrupted run resumes by skipping every (record, strategy) pair
//! already on disk. Per-record failures score as incorrect and carry the
//! error cause; they never abort the matrix.

mod inspect;
mod report;

pub use inspect::trace_inspect;
pub use report::{build_report, render_csv, render_text, Column, ReportCell, ReportRow, ReportTable};

use crate::engine::{evaluate, Reasoner, RunConfig, Strategy};
use crate::model::{Category, ChunkUnit, ModelError, QuestionRecord};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::mpsc;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("io: {0}")]
    Io(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("results line {line}: {message}")]
    BadResults { line: usize, message: String },
    #[error("trace file {path} is missing or unreadable: {message}")]
    MissingTrace { path: String, message: String },
}

impl From<std::io::Error> for HarnessError {
    fn from(e: std::io::Error) -> Self {
        HarnessError::Io(e.to_string())
    }
}

/// One evaluated (record, strategy) pair. Wall time is measured but not
/// persisted, keeping `results.jsonl` byte-stable across identical runs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunResult {
    pub record_id: String,
    pub strategy: Strategy,
    pub backend: String,
    pub predicted_label: Option<char>,
    pub gold_label: Option<char>,
    pub correct: bool,
    pub order: usize,
    pub category: Category,
    pub reasoner_calls: u64,
    #[serde(skip)]
    pub wall_time_ms: u64,
    /// Trace file location, relative to the output directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace_path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Settings for one evaluation matrix.
#[derive(Debug, Clone)]
pub struct MatrixSpec {
    pub strategies: Vec<Strategy>,
    /// Label recorded per result: which backend produced it.
    pub backend: String,
    pub chunk_unit: Option<ChunkUnit>,
    pub max_passes: usize,
    pub preamble: Option<String>,
    /// Worker threads; 1 preserves record order in `results.jsonl`.
    pub workers: usize,
    pub traces: bool,
}

impl Default for MatrixSpec {
    fn default() -> Self {
        MatrixSpec {
            strategies: Strategy::ALL.to_vec(),
            backend: "symbolic".to_string(),
            chunk_unit: None,
            max_passes: 8,
            preamble: None,
            workers: 1,
            traces: true,
        }
    }
}

impl MatrixSpec {
    fn run_config(&self, strategy: Strategy) -> RunConfig {
        RunConfig {
            strategy,
            chunk_unit: self.chunk_unit,
            max_passes: self.max_passes,
            preamble: self.preamble.clone(),
        }
    }
}

pub fn results_path(out_dir: &Path) -> PathBuf {
    out_dir.join("results.jsonl")
}

pub fn trace_path(out_dir: &Path, record_id: &str, strategy: Strategy) -> PathBuf {
    out_dir.join("traces").join(format!("{record_id}-{strategy}.json"))
}

/// Loads previously persisted results, tolerating a missing file.
pub fn load_results(out_dir: &Path) -> Result<Vec<RunResult>, HarnessError> {
    let path = results_path(out_dir);
    if !path.exists() {
        return Ok(Vec::new());
    }
    let reader = BufReader::new(File::open(&path)?);
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let result: RunResult =
            serde_json::from_str(&line).map_err(|e| HarnessError::BadResults {
                line: i + 1,
                message: e.to_string(),
            })?;
        out.push(result);
    }
    Ok(out)
}

fn evaluate_one(
    record: &QuestionRecord,
    reasoner: &dyn Reasoner,
    spec: &MatrixSpec,
    strategy: Strategy,
    out_dir: &Path,
) -> RunResult {
    let cfg = spec.run_config(strategy);
    let started = Instant::now();
    let outcome = evaluate(record, reasoner, &cfg);
    let wall_time_ms = started.elapsed().as_millis() as u64;
    match outcome {
        Ok(outcome) => {
            let trace_file = if spec.traces {
                let path = trace_path(out_dir, &record.id, strategy);
                let json =
                    serde_json::to_string_pretty(&outcome.trace).expect("serializable trace");
                match fs::write(&path, json) {
                    Ok(()) => Some(format!("traces/{}-{}.json", record.id, strategy)),
                    Err(_) => None,
                }
            } else {
                None
            };
            RunResult {
                record_id: record.id.clone(),
                strategy,
                backend: spec.backend.clone(),
                predicted_label: Some(outcome.answer.label),
                gold_label: record.gold_label,
                correct: record.gold_label == Some(outcome.answer.label),
                order: record.order,
                category: record.category,
                reasoner_calls: outcome.trace.calls.total(),
                wall_time_ms,
                trace_path: trace_file,
                error: None,
            }
        }
        Err(e) => RunResult {
            record_id: record.id.clone(),
            strategy,
            backend: spec.backend.clone(),
            predicted_label: None,
            gold_label: record.gold_label,
            correct: false,
            order: record.order,
            category: record.category,
            reasoner_calls: 0,
            wall_time_ms,
            trace_path: None,
            error: Some(e.to_string()),
        },
    }
}

/// Runs every strategy over every record, skipping pairs already persisted
/// in `out_dir/results.jsonl`. Results append incrementally; the returned
/// list holds previously persisted and new results together.
pub fn run_matrix(
    records: &[QuestionRecord],
    reasoner: &dyn Reasoner,
    spec: &MatrixSpec,
    out_dir: &Path,
) -> Result<Vec<RunResult>, HarnessError> {
    fs::create_dir_all(out_dir)?;
    if spec.traces {
        fs::create_dir_all(out_dir.join("traces"))?;
    }
    let mut results = load_results(out_dir)?;
    let done: HashSet<(String, Strategy)> = results
        .iter()
        .map(|r| (r.record_id.clone(), r.strategy))
        .collect();
    let work: Vec<(&QuestionRecord, Strategy)> = records
        .iter()
        .flat_map(|r| spec.strategies.iter().map(move |s| (r, *s)))
        .filter(|(r, s)| !done.contains(&(r.id.clone(), *s)))
        .collect();

    let mut sink = OpenOptions::new()
        .create(true)
        .append(true)
        .open(results_path(out_dir))?;
    let persist = |result: RunResult, sink: &mut File| -> Result<RunResult, HarnessError> {
        let line = serde_json::to_string(&result).expect("serializable result");
        writeln!(sink, "{line}")?;
        sink.flush()?;
        Ok(result)
    };

    if spec.workers <= 1 {
        for (record, strategy) in work {
            let result = evaluate_one(record, reasoner, spec, strategy, out_dir);
            results.push(persist(result, &mut sink)?);
        }
        return Ok(results);
    }

    let (tx, rx) = mpsc::channel::<RunResult>();
    let next = std::sync::atomic::AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..spec.workers.min(work.len().max(1)) {
            let tx = tx.clone();
            let work = &work;
            let next = &next;
            scope.spawn(move || loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                let Some((record, strategy)) = work.get(i) else {
                    break;
                };
                let result = evaluate_one(record, reasoner, spec, *strategy, out_dir);
                if tx.send(result).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        for result in rx {
            results.push(persist(result, &mut sink)?);
        }
        Ok::<(), HarnessError>(())
    })?;
    Ok(results)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{generate_suite, SuiteSpec};
    use crate::symbolic::SymbolicReasoner;

    fn small_suite() -> Vec<QuestionRecord> {
        generate_suite(&SuiteSpec {
            per_cell: 2,
            orders: vec![0, 1, 2],
            seed: 11,
            ..SuiteSpec::default()
        })
        .unwrap()
    }

    #[test]
    fn matrix_covers_every_pair_and_symbolic_decompose_is_perfect() {
        let records = small_suite();
        let dir = tempfile::tempdir().unwrap();
        let spec = MatrixSpec::default();
        let reasoner = SymbolicReasoner::new();
        let results = run_matrix(&records, &reasoner, &spec, dir.path()).unwrap();
        assert_eq!(results.len(), records.len() * spec.strategies.len());
        let decompose: Vec<_> = results
            .iter()
            .filter(|r| r.strategy == Strategy::Decompose)
            .collect();
        assert_eq!(decompose.len(), records.len());
        assert!(decompose.iter().all(|r| r.correct), "decompose must match gold");
        for r in &results {
            let path = r.trace_path.as_ref().expect("trace recorded");
            assert!(dir.path().join(path).exists());
        }
    }

    #[test]
    fn interrupted_runs_resume_without_recomputing() {
        let records = small_suite();
        let dir = tempfile::tempdir().unwrap();
        let spec = MatrixSpec {
            strategies: vec![Strategy::Decompose],
            ..MatrixSpec::default()
        };
        let reasoner = SymbolicReasoner::new();
        let half = &records[..records.len() / 2];
        let first = run_matrix(half, &reasoner, &spec, dir.path()).unwrap();
        let before = fs::read_to_string(results_path(dir.path())).unwrap();
        let all = run_matrix(&records, &reasoner, &spec, dir.path()).unwrap();
        assert_eq!(all.len(), records.len());
        let after = fs::read_to_string(results_path(dir.path())).unwrap();
        assert!(after.starts_with(&before), "existing lines untouched");
        assert_eq!(first.len(), half.len());
        let rerun = run_matrix(&records, &reasoner, &spec, dir.path()).unwrap();
        let unchanged = fs::read_to_string(results_path(dir.path())).unwrap();
        assert_eq!(after, unchanged, "complete runs recompute nothing");
        assert_eq!(rerun.len(), all.len());
    }

    #[test]
    fn single_worker_runs_are_byte_identical() {
        let records = small_suite();
        let spec = MatrixSpec::default();
        let reasoner = SymbolicReasoner::new();
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        run_matrix(&records, &reasoner, &spec, dir_a.path()).unwrap();
        run_matrix(&records, &reasoner, &spec, dir_b.path()).unwrap();
        let a = fs::read_to_string(results_path(dir_a.path())).unwrap();
        let b = fs::read_to_string(results_path(dir_b.path())).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn worker_pool_covers_the_same_pairs() {
        let records = small_suite();
        let spec = MatrixSpec {
            workers: 4,
            traces: false,
            ..MatrixSpec::default()
        };
        let reasoner = SymbolicReasoner::new();
        let dir = tempfile::tempdir().unwrap();
        let mut results = run_matrix(&records, &reasoner, &spec, dir.path()).unwrap();
        assert_eq!(results.len(), records.len() * spec.strategies.len());
        results.sort_by(|x, y| (&x.record_id, x.strategy).cmp(&(&y.record_id, y.strategy)));
        results.dedup_by(|x, y| x.record_id == y.record_id && x.strategy == y.strategy);
        assert_eq!(results.len(), records.len() * spec.strategies.len());
    }

    #[test]
    fn persisted_results_reload_identically() {
        let records = small_suite();
        let dir = tempfile::tempdir().unwrap();
        let spec = MatrixSpec {
            strategies: vec![Strategy::ZeroShotMc, Strategy::Decompose],
            traces: false,
            ..MatrixSpec::default()
        };
        let reasoner = SymbolicReasoner::new();
        let mut live = run_matrix(&records, &reasoner, &spec, dir.path()).unwrap();
        let loaded = load_results(dir.path()).unwrap();
        for r in &mut live {
            r.wall_time_ms = 0;
        }
        assert_eq!(live, loaded);
    }
}
