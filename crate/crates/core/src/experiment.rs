//! Seeded multi-run experiments, CSV output and the paired statistics.
//!
//! An output directory holds:
//! - `metrics.csv`: `run,step,society,agent_kind,social_experience,cohesion`,
//!   one row per 100 steps over the trailing 1000 steps;
//! - `norms.csv`: `run,antecedent,consequent,adoption,emerged,maximal` for
//!   all candidate norms;
//! - `summary.csv`: `run,seed,society,agent_kind,social_experience,cohesion,adoption`,
//!   whole-run means, where adoption averages the emerged norms;
//! - with interaction logging on, `interactions_run<i>.jsonl` and, for
//!   learning agents, `populations_run<i>.txt`.
//!
//! Missing values are written as empty fields.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use crate::agents::AgentKind;
use crate::metrics::{self, AdoptionRecord, BehaviorTable, SeriesPoint};
use crate::norm::ContextSchema;
use crate::scenario::{ConfigError, PayoffTables, SimulationConfig, Society};
use crate::simulation::Simulation;
use crate::stats::{self, StatsError};

pub const METRICS_HEADER: [&str; 6] = ["run", "step", "society", "agent_kind", "social_experience", "cohesion"];
pub const NORMS_HEADER: [&str; 6] = ["run", "antecedent", "consequent", "adoption", "emerged", "maximal"];
pub const SUMMARY_HEADER: [&str; 7] =
    ["run", "seed", "society", "agent_kind", "social_experience", "cohesion", "adoption"];
pub const STATS_HEADER: [&str; 8] = ["metric", "society", "baseline", "mean_a", "mean_b", "t", "p", "cohens_d"];

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Csv { path: PathBuf, message: String },
    #[error("missing run file {0}")]
    MissingFile(PathBuf),
    #[error("invalid experiment: {0}")]
    Invalid(String),
    #[error("cannot pair {a} with {b}: {reason}")]
    Unpaired { a: PathBuf, b: PathBuf, reason: String },
    #[error(transparent)]
    Stats(#[from] StatsError),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ExperimentError + '_ {
    move |source| ExperimentError::Io { path: path.into(), source }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> ExperimentError + '_ {
    move |e| ExperimentError::Csv { path: path.into(), message: e.to_string() }
}

#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub society: Society,
    pub kind: AgentKind,
    pub runs: usize,
    pub steps: u64,
    /// Run `i` uses seed `base_seed + i`.
    pub base_seed: u64,
    pub config: SimulationConfig,
    pub payoffs: PayoffTables,
    /// Worker threads; 0 uses every core.
    pub jobs: usize,
    pub log_interactions: bool,
}

impl ExperimentSpec {
    pub fn new(society: Society, kind: AgentKind) -> Self {
        let config = SimulationConfig::default();
        Self {
            society,
            kind,
            runs: 8,
            steps: config.world.steps,
            base_seed: 0,
            config,
            payoffs: PayoffTables::default(),
            jobs: 0,
            log_interactions: false,
        }
    }

    pub fn seed(&self, run: usize) -> u64 {
        self.base_seed + run as u64
    }

    fn validate(&self) -> Result<(), ExperimentError> {
        if self.runs == 0 {
            return Err(ExperimentError::Invalid("runs must be at least 1".into()));
        }
        if self.steps == 0 {
            return Err(ExperimentError::Invalid("steps must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub run: usize,
    pub seed: u64,
    pub society: Society,
    pub kind: AgentKind,
    pub social_experience: Option<f64>,
    pub cohesion: Option<f64>,
    /// Mean over emerged norms.
    pub adoption: Option<f64>,
    pub norms: Vec<AdoptionRecord>,
    pub series: Vec<SeriesPoint>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub summary: RunSummary,
    /// JSON lines, when logging was requested.
    pub interaction_log: Option<String>,
    pub population_dump: Option<String>,
}

pub fn run_single(spec: &ExperimentSpec, run: usize) -> RunOutput {
    let schema = ContextSchema::ringer();
    let seed = spec.seed(run);
    let mut sim = Simulation::new(spec.kind, spec.society, spec.config.clone(), spec.payoffs.clone(), seed);
    let log = sim.run(spec.steps);

    let behavior = BehaviorTable::from_simulation(&schema, &sim);
    let norms = metrics::emerged_norms(&schema, &behavior, spec.config.evaluation.adoption_compliance_fraction);
    let interaction_log = spec.log_interactions.then(|| {
        let mut out = String::new();
        for i in &log {
            out.push_str(&serde_json::to_string(&i.record(&schema)).expect("serializable record"));
            out.push('\n');
        }
        out
    });
    let population_dump = (spec.log_interactions && spec.kind.learns()).then(|| {
        let mut out = String::new();
        for (id, a) in sim.agents().iter().enumerate() {
            out.push_str(&format!("# agent {id} ({:?})\n", a.attitude));
            out.push_str(&a.population.dump(&schema));
        }
        out
    });
    RunOutput {
        summary: RunSummary {
            run,
            seed,
            society: spec.society,
            kind: spec.kind,
            social_experience: metrics::social_experience(&log),
            cohesion: metrics::cohesion(&log),
            adoption: metrics::mean_emerged_adoption(&norms),
            series: metrics::series(&log, spec.steps),
            norms,
        },
        interaction_log,
        population_dump,
    }
}

/// Runs every seed, in parallel up to `spec.jobs`, and returns the outputs
/// in run order.
pub fn run_all(spec: &ExperimentSpec) -> Result<Vec<RunOutput>, ExperimentError> {
    spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.jobs)
        .build()
        .map_err(|e| ExperimentError::Invalid(format!("thread pool: {e}")))?;
    Ok(pool.install(|| (0..spec.runs).into_par_iter().map(|r| run_single(spec, r)).collect()))
}

/// Runs the experiment and writes its files into `out`.
pub fn run_experiment(spec: &ExperimentSpec, out: &Path) -> Result<Vec<RunSummary>, ExperimentError> {
    let outputs = run_all(spec)?;
    std::fs::create_dir_all(out).map_err(io_err(out))?;
    write_outputs(&outputs, out)?;
    Ok(outputs.into_iter().map(|o| o.summary).collect())
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn write_outputs(outputs: &[RunOutput], out: &Path) -> Result<(), ExperimentError> {
    let schema = ContextSchema::ringer();

    let path = out.join("metrics.csv");
    let mut w = csv::Writer::from_path(&path).map_err(csv_err(&path))?;
    w.write_record(METRICS_HEADER).map_err(csv_err(&path))?;
    for o in outputs {
        let s = &o.summary;
        for p in &s.series {
            w.write_record([
                s.run.to_string(),
                p.step.to_string(),
                s.society.to_string(),
                s.kind.to_string(),
                fmt_opt(p.social_experience),
                fmt_opt(p.cohesion),
            ])
            .map_err(csv_err(&path))?;
        }
    }
    w.flush().map_err(io_err(&path))?;

    let path = out.join("norms.csv");
    let mut w = csv::Writer::from_path(&path).map_err(csv_err(&path))?;
    w.write_record(NORMS_HEADER).map_err(csv_err(&path))?;
    for o in outputs {
        for r in &o.summary.norms {
            w.write_record([
                o.summary.run.to_string(),
                schema.format_antecedent(&r.norm.antecedent),
                schema.action_name(r.norm.consequent).to_string(),
                r.adoption.to_string(),
                r.emerged.to_string(),
                r.maximal.to_string(),
            ])
            .map_err(csv_err(&path))?;
        }
    }
    w.flush().map_err(io_err(&path))?;

    let path = out.join("summary.csv");
    let mut w = csv::Writer::from_path(&path).map_err(csv_err(&path))?;
    w.write_record(SUMMARY_HEADER).map_err(csv_err(&path))?;
    for o in outputs {
        let s = &o.summary;
        w.write_record([
            s.run.to_string(),
            s.seed.to_string(),
            s.society.to_string(),
            s.kind.to_string(),
            fmt_opt(s.social_experience),
            fmt_opt(s.cohesion),
            fmt_opt(s.adoption),
        ])
        .map_err(csv_err(&path))?;
    }
    w.flush().map_err(io_err(&path))?;

    for o in outputs {
        let run = o.summary.run;
        let files = [
            (format!("interactions_run{run}.jsonl"), &o.interaction_log),
            (format!("populations_run{run}.txt"), &o.population_dump),
        ];
        for (name, body) in files {
            if let Some(body) = body {
                let path = out.join(name);
                let mut f = BufWriter::new(File::create(&path).map_err(io_err(&path))?);
                f.write_all(body.as_bytes()).map_err(io_err(&path))?;
                f.flush().map_err(io_err(&path))?;
            }
        }
    }
    Ok(())
}

/// Per-run means read back from a `summary.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub run: usize,
    pub seed: u64,
    pub society: Society,
    pub kind: AgentKind,
    pub social_experience: Option<f64>,
    pub cohesion: Option<f64>,
    pub adoption: Option<f64>,
}

pub fn read_summary(dir: &Path) -> Result<Vec<SummaryRow>, ExperimentError> {
    let path = dir.join("summary.csv");
    if !path.is_file() {
        return Err(ExperimentError::MissingFile(path));
    }
    let mut r = csv::Reader::from_path(&path).map_err(csv_err(&path))?;
    let headers = r.headers().map_err(csv_err(&path))?.clone();
    if headers.iter().ne(SUMMARY_HEADER) {
        return Err(ExperimentError::Csv { path, message: format!("unexpected header `{}`", headers.iter().collect::<Vec<_>>().join(",")) });
    }
    let bad = |line: usize, what: &str| ExperimentError::Csv { path: path.clone(), message: format!("row {line}: {what}") };
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err(&path))?;
        let opt = |k: usize| -> Result<Option<f64>, ExperimentError> {
            match &rec[k] {
                "" => Ok(None),
                s => s.parse().map(Some).map_err(|_| bad(i + 1, &format!("`{s}` is not a number"))),
            }
        };
        rows.push(SummaryRow {
            run: rec[0].parse().map_err(|_| bad(i + 1, "bad run index"))?,
            seed: rec[1].parse().map_err(|_| bad(i + 1, "bad seed"))?,
            society: rec[2].parse().map_err(|e: String| bad(i + 1, &e))?,
            kind: rec[3].parse().map_err(|e: String| bad(i + 1, &e))?,
            social_experience: opt(4)?,
            cohesion: opt(5)?,
            adoption: opt(6)?,
        });
    }
    if rows.is_empty() {
        return Err(bad(0, "no runs"));
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StatsRow {
    pub metric: &'static str,
    pub society: Society,
    pub baseline: AgentKind,
    pub mean_a: f64,
    pub mean_b: f64,
    pub t: f64,
    pub p: f64,
    /// `None` when both samples are constant but differ.
    pub cohens_d: Option<f64>,
}

const METRICS: [(&str, fn(&SummaryRow) -> Option<f64>); 3] = [
    ("social_experience", |r| r.social_experience),
    ("cohesion", |r| r.cohesion),
    ("adoption", |r| r.adoption),
];

/// Compares, per society, the first XSIGA directory against every other
/// directory of that society. Metrics with missing per-run values are
/// skipped.
pub fn compare(dirs: &[(PathBuf, Vec<SummaryRow>)]) -> Result<Vec<StatsRow>, ExperimentError> {
    let mut by_society: BTreeMap<usize, (Society, Vec<usize>)> = BTreeMap::new();
    let mut order: Vec<Society> = Vec::new();
    for (i, (_, rows)) in dirs.iter().enumerate() {
        let society = rows[0].society;
        let pos = order.iter().position(|s| *s == society).unwrap_or_else(|| {
            order.push(society);
            order.len() - 1
        });
        by_society.entry(pos).or_insert((society, Vec::new())).1.push(i);
    }

    let mut out = Vec::new();
    for (_, (society, members)) in by_society {
        let Some(&ai) = members.iter().find(|&&i| dirs[i].1[0].kind == AgentKind::Xsiga) else {
            return Err(ExperimentError::Invalid(format!("no xsiga results for society {society}")));
        };
        for &bi in members.iter().filter(|&&i| i != ai) {
            let ((pa, a), (pb, b)) = (&dirs[ai], &dirs[bi]);
            let unpaired = |reason: String| ExperimentError::Unpaired { a: pa.clone(), b: pb.clone(), reason };
            if a.len() != b.len() {
                return Err(unpaired(format!("{} runs vs {}", a.len(), b.len())));
            }
            for (x, y) in a.iter().zip(b) {
                if x.seed != y.seed {
                    return Err(unpaired(format!("run {} has seed {} vs {}", x.run, x.seed, y.seed)));
                }
            }
            for (name, get) in METRICS {
                let (Some(va), Some(vb)) = (
                    a.iter().map(get).collect::<Option<Vec<f64>>>(),
                    b.iter().map(get).collect::<Option<Vec<f64>>>(),
                ) else {
                    continue;
                };
                if va.len() < 2 {
                    return Err(StatsError::TooFew(va.len()).into());
                }
                let t = stats::paired_t_test(&va, &vb)?;
                out.push(StatsRow {
                    metric: name,
                    society,
                    baseline: b[0].kind,
                    mean_a: stats::mean(&va),
                    mean_b: stats::mean(&vb),
                    t: t.t,
                    p: t.p,
                    cohens_d: stats::cohens_d(&va, &vb).ok(),
                });
            }
        }
    }
    Ok(out)
}

/// Reads each directory's `summary.csv`, compares, and writes `stats.csv`.
pub fn run_stats(dirs: &[PathBuf], out: &Path) -> Result<Vec<StatsRow>, ExperimentError> {
    let loaded = dirs
        .iter()
        .map(|d| read_summary(d).map(|rows| (d.clone(), rows)))
        .collect::<Result<Vec<_>, _>>()?;
    let rows = compare(&loaded)?;
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(io_err(parent))?;
    }
    let mut w = csv::Writer::from_path(out).map_err(csv_err(out))?;
    w.write_record(STATS_HEADER).map_err(csv_err(out))?;
    for r in &rows {
        w.write_record([
            r.metric.to_string(),
            r.society.to_string(),
            r.baseline.to_string(),
            r.mean_a.to_string(),
            r.mean_b.to_string(),
            r.t.to_string(),
            r.p.to_string(),
            fmt_opt(r.cohens_d),
        ])
        .map_err(csv_err(out))?;
    }
    w.flush().map_err(io_err(out))?;
    Ok(rows)
}
