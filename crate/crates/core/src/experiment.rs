//! Seeded experiment harness: builds or loads a network, evaluates it,
//! optionally runs the learning loop, and renders reports.
//!
//! All rendered outputs are plain text with fixed key order and contain no
//! wall-clock data unless explicitly requested, so identical specs produce
//! byte-identical files. Neuron and memory indices are one-based in every
//! rendered output.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::learning::{learning_loop, LearningConfig, LearningLog};
use crate::memory::{
    build_t_matrix, edge_count, format_memories, parse_memories, InterconnectionMatrix, MemorySet,
    MemoryVector,
};
use crate::par::Execution;
use crate::proximity::{linear_proximity, parse_proximity, ProximityMatrix};
use crate::retrieval::{evaluate_network, Polarity, RetrievalReport};

pub const CSV_HEADER: &str = "step,node,target_memory,target_sign,outcome,rate_before,rate_after";

/// Memory count used when none is given: `max(3, n / 4)`, capped at `n - 1`
/// so the `m < n` guard holds for tiny networks.
pub fn default_memory_count(nodes: usize) -> usize {
    (nodes / 4).max(3).min(nodes.saturating_sub(1)).max(1)
}

/// Number of memory classes of length `n` distinct up to complement.
pub fn memory_capacity(n: usize) -> u128 {
    if n == 0 {
        0
    } else if n > 127 {
        u128::MAX
    } else {
        1u128 << (n - 1)
    }
}

/// Draws `m` uniform bipolar vectors of length `n`, redrawing any vector
/// equal or complementary to one already drawn.
pub fn generate_random_memories(n: usize, m: usize, seed: u64) -> Result<MemorySet> {
    if n < 2 {
        return Err(Error::InvalidSpec(format!(
            "need at least 2 nodes, got {n}"
        )));
    }
    if m < 1 {
        return Err(Error::InvalidSpec("need at least 1 memory".into()));
    }
    let capacity = memory_capacity(n);
    if m as u128 > capacity {
        return Err(Error::Capacity {
            nodes: n,
            memories: m,
            capacity,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut memories: Vec<MemoryVector> = Vec::with_capacity(m);
    while memories.len() < m {
        let v = MemoryVector::from_bipolar(
            (0..n)
                .map(|_| if rng.random::<bool>() { 1 } else { -1 })
                .collect(),
        );
        if memories.iter().any(|x| *x == v || x.is_complement_of(&v)) {
            continue;
        }
        memories.push(v);
    }
    Ok(MemorySet::new(memories)?)
}

#[derive(Debug, Clone, PartialEq)]
pub enum MemorySource {
    /// Seeded random memories; `None` means [`default_memory_count`].
    Random {
        count: Option<usize>,
    },
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProximitySource {
    Linear,
    File(PathBuf),
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct OutputPaths {
    pub report: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub activity_map: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub nodes: Option<usize>,
    pub memories: MemorySource,
    pub proximity: ProximitySource,
    pub seed: u64,
    pub learning: LearningConfig,
    /// Permits random memory counts `m ≥ n`.
    pub allow_overcapacity: bool,
    pub outputs: OutputPaths,
    /// Adds wall-clock time to the report, which breaks byte-identity.
    pub wall_clock: bool,
}

impl ExperimentSpec {
    pub fn random(nodes: usize, memories: usize, seed: u64) -> Self {
        ExperimentSpec {
            nodes: Some(nodes),
            memories: MemorySource::Random {
                count: Some(memories),
            },
            proximity: ProximitySource::Linear,
            seed,
            learning: LearningConfig::default(),
            allow_overcapacity: false,
            outputs: OutputPaths::default(),
            wall_clock: false,
        }
    }
}

/// Memories, proximity and initial weights materialised from a spec.
#[derive(Debug, Clone)]
pub struct Network {
    pub memories: MemorySet,
    pub proximity: ProximityMatrix,
    pub weights: InterconnectionMatrix,
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn build_network(spec: &ExperimentSpec) -> Result<Network> {
    let memories = match &spec.memories {
        MemorySource::Random { count } => {
            let n = spec.nodes.ok_or_else(|| {
                Error::InvalidSpec("--nodes is required for random memories".into())
            })?;
            let m = count.unwrap_or_else(|| default_memory_count(n));
            if m >= n && !spec.allow_overcapacity {
                return Err(Error::InvalidSpec(format!(
                    "{m} memories on {n} nodes exceeds the m < n guard (use --allow-overcapacity)"
                )));
            }
            generate_random_memories(n, m, spec.seed)?
        }
        MemorySource::File(path) => {
            let set = parse_memories(&read_file(path)?).map_err(|source| Error::MemoryFile {
                path: path.clone(),
                source,
            })?;
            if let Some(n) = spec.nodes {
                if n != set.dimension() {
                    return Err(Error::InvalidSpec(format!(
                        "--nodes {n} does not match memory dimension {}",
                        set.dimension()
                    )));
                }
            }
            set
        }
    };
    let n = memories.dimension();
    let proximity = match &spec.proximity {
        ProximitySource::Linear => linear_proximity(n)?,
        ProximitySource::File(path) => {
            let p = parse_proximity(&read_file(path)?).map_err(|source| Error::ProximityFile {
                path: path.clone(),
                source,
            })?;
            if p.dim() != n {
                return Err(Error::InvalidSpec(format!(
                    "proximity matrix is {}x{} but the network has {n} nodes",
                    p.dim(),
                    p.dim()
                )));
            }
            p
        }
    };
    let weights = build_t_matrix(&memories);
    Ok(Network {
        memories,
        proximity,
        weights,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunKind {
    Eval,
    Learn,
}

impl RunKind {
    fn as_str(self) -> &'static str {
        match self {
            RunKind::Eval => "eval",
            RunKind::Learn => "learn",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub kind: RunKind,
    pub spec: ExperimentSpec,
    pub network: Network,
    pub weights_after: InterconnectionMatrix,
    pub before: RetrievalReport,
    pub after: RetrievalReport,
    pub log: Option<LearningLog>,
    pub elapsed: Duration,
}

impl ExperimentReport {
    pub fn rate_before(&self) -> f64 {
        self.before.rate
    }

    pub fn rate_after(&self) -> f64 {
        self.after.rate
    }

    pub fn nodes(&self) -> usize {
        self.network.memories.dimension()
    }

    pub fn max_outer(&self) -> usize {
        self.spec
            .learning
            .resolved_max_outer(self.nodes(), self.network.memories.len())
    }
}

/// Evaluation only; the "after" state equals the "before" state.
pub fn run_eval(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    let start = Instant::now();
    let network = build_network(spec)?;
    let before = evaluate_network(&network.weights, &network.memories, &network.proximity)?;
    Ok(ExperimentReport {
        kind: RunKind::Eval,
        spec: spec.clone(),
        weights_after: network.weights.clone(),
        after: before.clone(),
        before,
        network,
        log: None,
        elapsed: start.elapsed(),
    })
}

/// Evaluate, run the learning loop, re-evaluate.
pub fn run_learn(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    let start = Instant::now();
    let network = build_network(spec)?;
    let before = evaluate_network(&network.weights, &network.memories, &network.proximity)?;
    let (weights_after, log) = learning_loop(
        &network.weights,
        &network.memories,
        &network.proximity,
        &spec.learning,
    )?;
    let after = evaluate_network(&weights_after, &network.memories, &network.proximity)?;
    Ok(ExperimentReport {
        kind: RunKind::Learn,
        spec: spec.clone(),
        network,
        weights_after,
        before,
        after,
        log: Some(log),
        elapsed: start.elapsed(),
    })
}

fn cell(report: &RetrievalReport, neuron: usize, polarity: Polarity) -> String {
    match report.matches[neuron][polarity.slot()] {
        Some(hit) => format!("m{}{}", hit.memory + 1, hit.sign.symbol()),
        None => "-".to_string(),
    }
}

fn activity_lines(out: &mut String, report: &RetrievalReport) {
    for neuron in 0..report.neuron_count() {
        let _ = writeln!(
            out,
            "{} {} {}",
            neuron + 1,
            cell(report, neuron, Polarity::Positive),
            cell(report, neuron, Polarity::Negative)
        );
    }
}

/// One line per neuron, `<index> <cell(+1)> <cell(-1)>`, under `BEFORE`
/// and `AFTER` headers.
pub fn render_activity_map(report: &ExperimentReport) -> String {
    let mut out = String::from("BEFORE\n");
    activity_lines(&mut out, &report.before);
    out.push_str("AFTER\n");
    activity_lines(&mut out, &report.after);
    out
}

fn sign_label(p: Polarity) -> &'static str {
    match p {
        Polarity::Positive => "+1",
        Polarity::Negative => "-1",
    }
}

/// One row per teach attempt, rolled-back attempts included.
pub fn render_csv(report: &ExperimentReport) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    let header: Vec<&str> = CSV_HEADER.split(',').collect();
    let to_io = |e: csv::Error| Error::io("<csv>", std::io::Error::other(e));
    w.write_record(&header).map_err(to_io)?;
    if let Some(log) = &report.log {
        for (i, s) in log.steps.iter().enumerate() {
            w.write_record([
                (i + 1).to_string(),
                (s.node + 1).to_string(),
                (s.target_memory + 1).to_string(),
                sign_label(s.target_sign).to_string(),
                s.outcome.as_str().to_string(),
                s.rate_before.to_string(),
                s.rate_after.to_string(),
            ])
            .map_err(to_io)?;
        }
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::io("<csv>", e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn join(values: &[usize], offset: usize) -> String {
    if values.is_empty() {
        return "-".into();
    }
    values
        .iter()
        .map(|v| (v + offset).to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn opt_path(p: &Option<PathBuf>) -> String {
    p.as_ref()
        .map(|p| p.display().to_string())
        .unwrap_or_else(|| "none".into())
}

/// Structured text report with sections SPEC, RATES, MEMORIES,
/// ACTIVITY_BEFORE, ACTIVITY_AFTER, LOG and TIMING.
pub fn render_report(report: &ExperimentReport) -> String {
    let spec = &report.spec;
    let memories = &report.network.memories;
    let mut out = String::new();

    let _ = writeln!(out, "[SPEC]");
    let _ = writeln!(out, "command = {}", report.kind.as_str());
    let _ = writeln!(out, "nodes = {}", report.nodes());
    let _ = writeln!(out, "memories = {}", memories.len());
    let source = match &spec.memories {
        MemorySource::Random { .. } => "random".to_string(),
        MemorySource::File(p) => p.display().to_string(),
    };
    let _ = writeln!(out, "memory_source = {source}");
    let proximity = match &spec.proximity {
        ProximitySource::Linear => "linear".to_string(),
        ProximitySource::File(p) => p.display().to_string(),
    };
    let _ = writeln!(out, "proximity = {proximity}");
    let _ = writeln!(out, "seed = {}", spec.seed);
    let _ = writeln!(out, "eta = {}", spec.learning.eta);
    let _ = writeln!(out, "max_inner = {}", spec.learning.max_inner);
    let _ = writeln!(out, "max_outer = {}", report.max_outer());
    let tie = spec
        .learning
        .tie_seed
        .map(|s| s.to_string())
        .unwrap_or_else(|| "none".into());
    let _ = writeln!(out, "tie_seed = {tie}");
    let _ = writeln!(out, "allow_overcapacity = {}", spec.allow_overcapacity);
    let _ = writeln!(out, "csv = {}", opt_path(&spec.outputs.csv));
    let _ = writeln!(
        out,
        "activity_map = {}",
        opt_path(&spec.outputs.activity_map)
    );
    out.push('\n');

    let _ = writeln!(out, "[RATES]");
    let _ = writeln!(out, "rate_before = {}", report.before.rate);
    let _ = writeln!(out, "rate_after = {}", report.after.rate);
    let _ = writeln!(
        out,
        "retrieved_before = {}",
        report.before.retrieved_count()
    );
    let _ = writeln!(out, "retrieved_after = {}", report.after.retrieved_count());
    let _ = writeln!(
        out,
        "active_before = {}",
        report.before.active.iter().filter(|a| **a).count()
    );
    let _ = writeln!(
        out,
        "active_after = {}",
        report.after.active.iter().filter(|a| **a).count()
    );
    let _ = writeln!(
        out,
        "edges_before = {}",
        edge_count(&report.network.weights)
    );
    let _ = writeln!(out, "edges_after = {}", edge_count(&report.weights_after));
    out.push('\n');

    let status = |r: bool| if r { "retrieved" } else { "missing" };
    let _ = writeln!(out, "[MEMORIES]");
    for (j, m) in memories.iter().enumerate() {
        let _ = writeln!(
            out,
            "m{} before={} after={} frequency_before={} frequency_after={} vector={}",
            j + 1,
            status(report.before.retrieved[j]),
            status(report.after.retrieved[j]),
            report.before.frequency[j],
            report.after.frequency[j],
            m
        );
    }
    out.push('\n');

    let _ = writeln!(out, "[ACTIVITY_BEFORE]");
    activity_lines(&mut out, &report.before);
    out.push('\n');
    let _ = writeln!(out, "[ACTIVITY_AFTER]");
    activity_lines(&mut out, &report.after);
    out.push('\n');

    let _ = writeln!(out, "[LOG]");
    match &report.log {
        None => {
            let _ = writeln!(out, "learning = none");
        }
        Some(log) => {
            let _ = writeln!(out, "termination = {}", log.termination.as_str());
            let _ = writeln!(out, "initial_rate = {}", log.initial_rate);
            let _ = writeln!(out, "final_rate = {}", log.final_rate);
            let _ = writeln!(out, "attempts = {}", log.attempts());
            let _ = writeln!(out, "accepted = {}", log.accepted().count());
            for (i, s) in log.steps.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "step {} node={} target=m{} sign={} outcome={} rate_before={} rate_after={} rows={} iterations={}",
                    i + 1,
                    s.node + 1,
                    s.target_memory + 1,
                    sign_label(s.target_sign),
                    s.outcome.as_str(),
                    s.rate_before,
                    s.rate_after,
                    join(&s.rows_updated, 1),
                    join(&s.inner_iterations, 0)
                );
            }
        }
    }
    out.push('\n');

    let _ = writeln!(out, "[TIMING]");
    let (evaluations, attempts, inner) = match &report.log {
        None => (1, 0, 0),
        Some(log) => (log.evaluations, log.attempts(), log.inner_iterations()),
    };
    let _ = writeln!(out, "evaluations = {evaluations}");
    let _ = writeln!(out, "teach_attempts = {attempts}");
    let _ = writeln!(out, "inner_iterations = {inner}");
    if spec.wall_clock {
        let _ = writeln!(
            out,
            "wall_clock_ms = {:.3}",
            report.elapsed.as_secs_f64() * 1e3
        );
    } else {
        let _ = writeln!(out, "wall_clock_ms = omitted");
    }
    out
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Writes every output named in `spec.outputs`.
pub fn emit_outputs(report: &ExperimentReport, spec: &ExperimentSpec) -> Result<()> {
    if let Some(path) = &spec.outputs.report {
        write_file(path, &render_report(report))?;
    }
    if let Some(path) = &spec.outputs.csv {
        write_file(path, &render_csv(report)?)?;
    }
    if let Some(path) = &spec.outputs.activity_map {
        write_file(path, &render_activity_map(report))?;
    }
    Ok(())
}

pub fn write_memories(path: &Path, memories: &MemorySet, header: &str) -> Result<()> {
    write_file(path, &format!("{header}{}", format_memories(memories)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchSpec {
    pub sizes: Vec<usize>,
    /// Memory count per run; `None` means [`default_memory_count`] per size.
    pub memories: Option<usize>,
    pub runs: usize,
    /// Run `i` of every size uses seed `base_seed + i`.
    pub base_seed: u64,
    pub learning: LearningConfig,
    pub allow_overcapacity: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub nodes: usize,
    pub memories: usize,
    pub seed: u64,
    pub rate_before: f64,
    pub rate_after: f64,
    pub termination: &'static str,
    pub attempts: usize,
    pub accepted: usize,
    pub max_outer: usize,
}

impl RunSummary {
    pub fn from_report(report: &ExperimentReport) -> Self {
        let log = report.log.as_ref();
        RunSummary {
            nodes: report.nodes(),
            memories: report.network.memories.len(),
            seed: report.spec.seed,
            rate_before: report.before.rate,
            rate_after: report.after.rate,
            termination: log.map_or("none", |l| l.termination.as_str()),
            attempts: log.map_or(0, |l| l.attempts()),
            accepted: log.map_or(0, |l| l.accepted().count()),
            max_outer: report.max_outer(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SizeSummary {
    pub nodes: usize,
    pub memories: usize,
    pub runs: usize,
    pub mean_rate_before: f64,
    pub mean_rate_after: f64,
    pub improved_runs: usize,
    pub perfect_after: usize,
}

impl SizeSummary {
    /// Aggregates runs that share a node count.
    pub fn aggregate(runs: &[RunSummary]) -> Option<Self> {
        let first = runs.first()?;
        let k = runs.len() as f64;
        Some(SizeSummary {
            nodes: first.nodes,
            memories: first.memories,
            runs: runs.len(),
            mean_rate_before: runs.iter().map(|r| r.rate_before).sum::<f64>() / k,
            mean_rate_after: runs.iter().map(|r| r.rate_after).sum::<f64>() / k,
            improved_runs: runs.iter().filter(|r| r.rate_after > r.rate_before).count(),
            perfect_after: runs.iter().filter(|r| r.rate_after == 100.0).count(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchReport {
    pub runs: Vec<RunSummary>,
    pub sizes: Vec<SizeSummary>,
}

/// Runs learning over `runs` seeds for each size. Independent runs execute
/// concurrently under `exec`; results are kept in (size, seed) order.
pub fn run_batch_with(batch: &BatchSpec, exec: Execution) -> Result<BatchReport> {
    if batch.runs == 0 {
        return Err(Error::InvalidSpec("--runs must be at least 1".into()));
    }
    if batch.sizes.is_empty() {
        return Err(Error::InvalidSpec(
            "at least one node count is required".into(),
        ));
    }
    let jobs: Vec<ExperimentSpec> = batch
        .sizes
        .iter()
        .flat_map(|&n| {
            (0..batch.runs as u64).map(move |i| ExperimentSpec {
                nodes: Some(n),
                memories: MemorySource::Random {
                    count: batch.memories,
                },
                proximity: ProximitySource::Linear,
                seed: batch.base_seed.wrapping_add(i),
                learning: batch.learning.clone(),
                allow_overcapacity: batch.allow_overcapacity,
                outputs: OutputPaths::default(),
                wall_clock: false,
            })
        })
        .collect();
    let runs = exec
        .map(&jobs, |spec| {
            run_learn(spec).map(|r| RunSummary::from_report(&r))
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let sizes = runs
        .chunks(batch.runs)
        .filter_map(SizeSummary::aggregate)
        .collect();
    Ok(BatchReport { runs, sizes })
}

pub fn run_batch(batch: &BatchSpec) -> Result<BatchReport> {
    run_batch_with(batch, Execution::default())
}

pub const BATCH_RUNS_HEADER: &str =
    "nodes,memories,seed,rate_before,rate_after,termination,attempts,accepted,max_outer";
pub const BATCH_SUMMARY_HEADER: &str =
    "nodes,memories,runs,mean_rate_before,mean_rate_after,improved_runs,perfect_after";

pub fn render_batch_runs(report: &BatchReport) -> String {
    let mut out = format!("{BATCH_RUNS_HEADER}\n");
    for r in &report.runs {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.nodes,
            r.memories,
            r.seed,
            r.rate_before,
            r.rate_after,
            r.termination,
            r.attempts,
            r.accepted,
            r.max_outer
        );
    }
    out
}

pub fn render_batch_summary(report: &BatchReport) -> String {
    let mut out = format!("{BATCH_SUMMARY_HEADER}\n");
    for s in &report.sizes {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            s.nodes,
            s.memories,
            s.runs,
            s.mean_rate_before,
            s.mean_rate_after,
            s.improved_runs,
            s.perfect_after
        );
    }
    out
}

pub fn emit_batch(report: &BatchReport, summary: Option<&Path>, runs: Option<&Path>) -> Result<()> {
    if let Some(path) = summary {
        write_file(path, &render_batch_summary(report))?;
    }
    if let Some(path) = runs {
        write_file(path, &render_batch_runs(report))?;
    }
    Ok(())
}
