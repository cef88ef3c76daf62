//! Experiment runner for the `rankmetric` crate.
//!
//! An [`ExperimentConfig`] names one experiment, its parameters, a master
//! seed and a trial count. [`run`] executes the trials on a worker pool,
//! gathers one [`TrialRecord`] per row in trial order and optionally writes
//! them as CSV. Trial `i` draws all its randomness from
//! `derive_seed(master, experiment, i)`, so output does not depend on the
//! number of workers.

mod experiments;

use std::fmt;
use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use rankmetric::f2field::FieldError;
use rankmetric::gabidulin::GabidulinError;
use rankmetric::netcode::NetError;
use rankmetric::pauli::PauliError;
use rankmetric::qgab::QgabError;

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "RANKMETRIC_WORKERS";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Gabidulin(#[from] GabidulinError),
    #[error(transparent)]
    Network(#[from] NetError),
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error(transparent)]
    Qgab(#[from] QgabError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Experiment {
    Basis,
    GabDistance,
    GabDual,
    NetcodeSim,
    StackedSim,
    QgabParams,
    QgabDistance,
    QgabE2e,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::Basis,
        Experiment::GabDistance,
        Experiment::GabDual,
        Experiment::NetcodeSim,
        Experiment::StackedSim,
        Experiment::QgabParams,
        Experiment::QgabDistance,
        Experiment::QgabE2e,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Basis => "basis",
            Experiment::GabDistance => "gab-distance",
            Experiment::GabDual => "gab-dual",
            Experiment::NetcodeSim => "netcode-sim",
            Experiment::StackedSim => "stacked-sim",
            Experiment::QgabParams => "qgab-params",
            Experiment::QgabDistance => "qgab-distance",
            Experiment::QgabE2e => "qgab-e2e",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| HarnessError::Config(format!("unknown experiment `{s}`")))
    }
}

/// How `qgab-e2e` produces the error to correct.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum E2eMode {
    /// Random circuit with forced faults or gate noise.
    #[default]
    Circuit,
    /// Every single-qubit X, Y, Z error on the memory (trial count ignored).
    SingleQubit,
    /// Random stacked errors of a fixed rank.
    RandomRank,
}

impl FromStr for E2eMode {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "circuit" => Ok(E2eMode::Circuit),
            "single-qubit" => Ok(E2eMode::SingleQubit),
            "random-rank" => Ok(E2eMode::RandomRank),
            other => Err(HarnessError::Config(format!("unknown e2e mode `{other}`"))),
        }
    }
}

/// Experiment parameters. Unset fields take per-experiment defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Params {
    /// Field degree / code length; a list for `basis` and `gab-dual`.
    pub n: Vec<u32>,
    pub k: Option<usize>,
    pub r: Option<usize>,
    pub s: Option<usize>,
    /// Faulty edges per trial, cycled over trials.
    pub faulty: Vec<usize>,
    /// Columns per transmission, cycled over trials; default `n`.
    pub columns: Vec<usize>,
    /// Flip probability on faulty edges, or gate fault probability.
    pub p: Option<f64>,
    pub depth: Option<usize>,
    pub width: Option<usize>,
    pub density: Option<f64>,
    pub network: Option<PathBuf>,
    pub circuit: Option<PathBuf>,
    pub layers: Option<usize>,
    pub max_width: Option<usize>,
    pub max_size: Option<usize>,
    /// Circuit size for `qgab-distance` and `qgab-e2e`.
    pub size: Option<usize>,
    /// Forced fault count; overrides `p` when set.
    pub faults: Option<usize>,
    pub mode: E2eMode,
    pub rank: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub params: Params,
    pub seed: u64,
    pub trials: usize,
    pub out: Option<PathBuf>,
    /// Worker threads; `None` reads [`WORKERS_ENV`], then uses all cores.
    pub workers: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment, params: Params) -> Self {
        Self {
            experiment,
            params,
            seed: 1,
            trials: 100,
            out: None,
            workers: None,
        }
    }
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialRecord {
    pub experiment: &'static str,
    pub seed: u64,
    pub trial: usize,
    /// Inputs and measurements, in the experiment's fixed column order.
    pub values: Vec<(&'static str, String)>,
    /// Whether the row's hard invariant held.
    pub pass: bool,
}

impl TrialRecord {
    pub fn get(&self, column: &str) -> Option<&str> {
        self.values
            .iter()
            .find(|(c, _)| *c == column)
            .map(|(_, v)| v.as_str())
    }

    fn header(&self) -> Vec<&'static str> {
        let mut h = vec!["experiment", "seed", "trial"];
        h.extend(self.values.iter().map(|(c, _)| *c));
        h.push("pass");
        h
    }

    fn fields(&self) -> Vec<String> {
        let mut f = vec![
            self.experiment.to_string(),
            self.seed.to_string(),
            self.trial.to_string(),
        ];
        f.extend(self.values.iter().map(|(_, v)| v.clone()));
        f.push(u8::from(self.pass).to_string());
        f
    }
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub experiment: Experiment,
    pub records: Vec<TrialRecord>,
    /// Human-readable summary lines.
    pub notes: Vec<String>,
}

impl RunSummary {
    pub fn violations(&self) -> usize {
        self.records.iter().filter(|r| !r.pass).count()
    }

    pub fn passed(&self) -> bool {
        self.violations() == 0
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }
}

pub fn write_csv(records: &[TrialRecord], out: impl Write) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    if let Some(first) = records.first() {
        w.write_record(first.header())?;
    }
    for r in records {
        w.write_record(r.fields())?;
    }
    w.flush().map_err(|e| HarnessError::Csv(e.into()))?;
    Ok(())
}

pub fn csv_string(records: &[TrialRecord]) -> Result<String, HarnessError> {
    let mut buf = Vec::new();
    write_csv(records, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

pub(crate) fn read_file(path: &Path) -> Result<String, HarnessError> {
    std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn worker_count(config: &ExperimentConfig) -> Result<Option<usize>, HarnessError> {
    if let Some(w) = config.workers {
        return Ok(Some(w));
    }
    match std::env::var(WORKERS_ENV) {
        Ok(v) => {
            v.trim().parse().map(Some).map_err(|_| {
                HarnessError::Config(format!("{WORKERS_ENV}={v} is not a worker count"))
            })
        }
        Err(_) => Ok(None),
    }
}

/// Runs the experiment and writes the CSV to `config.out`, if set.
pub fn run(config: &ExperimentConfig) -> Result<RunSummary, HarnessError> {
    let prepared = experiments::prepare(config)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = worker_count(config)? {
        if w == 0 {
            return Err(HarnessError::Config("worker count must be positive".into()));
        }
        builder = builder.num_threads(w);
    }
    let pool = builder
        .build()
        .map_err(|e| HarnessError::Config(format!("thread pool: {e}")))?;
    let summary = pool.install(|| prepared.execute(config))?;
    if let Some(path) = &config.out {
        let file = File::create(path).map_err(|source| HarnessError::Io {
            path: path.clone(),
            source,
        })?;
        write_csv(&summary.records, io::BufWriter::new(file))?;
    }
    Ok(summary)
}
