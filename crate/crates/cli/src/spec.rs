//! Experiment configuration and problem assembly.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use rfed_core::data::{self, DataMatrix};
use rfed_core::fedopt::AlgorithmConfig;
use rfed_core::metrics::{self, GroundTruth};
use rfed_core::objectives::{GlobalObjective, QuadraticObjective};
use rfed_core::{Error, ManifoldKind, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Pca,
    Kpca,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum DatasetSpec {
    Gaussian { p: usize, d: usize },
    Csv { path: PathBuf },
    Idx { path: PathBuf },
}

impl DatasetSpec {
    /// Parses `gaussian`, `csv:PATH` or `idx:PATH`; gaussian shape comes
    /// from the separate --p/--d flags.
    pub fn parse(text: &str, p: usize, d: usize) -> Result<Self> {
        if text == "gaussian" {
            return Ok(DatasetSpec::Gaussian { p, d });
        }
        if let Some(path) = text.strip_prefix("csv:") {
            return Ok(DatasetSpec::Csv { path: path.into() });
        }
        if let Some(path) = text.strip_prefix("idx:") {
            return Ok(DatasetSpec::Idx { path: path.into() });
        }
        Err(Error::InvalidConfig(format!(
            "dataset must be `gaussian`, `csv:PATH` or `idx:PATH`, got `{}`",
            text
        )))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub task: Task,
    pub dataset: DatasetSpec,
    /// Subspace rank; the manifold is the sphere when r = 1, St(d, r)
    /// otherwise.
    pub r: usize,
    pub algorithm: AlgorithmConfig,
    pub output_dir: PathBuf,
    pub repeats: usize,
    /// Subtract the per-feature mean before building covariances.
    pub center: bool,
    /// Center and scale every feature to unit variance (implies `center`).
    pub standardize: bool,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.r == 0 {
            return Err(Error::InvalidConfig("r must be at least 1".into()));
        }
        if self.repeats == 0 {
            return Err(Error::InvalidConfig("repeats must be at least 1".into()));
        }
        if self.task == Task::Pca && self.r != 1 {
            return Err(Error::InvalidConfig(format!(
                "task pca extracts a single direction; use kpca for r = {}",
                self.r
            )));
        }
        self.algorithm.validate()
    }
}

/// A fully assembled problem instance: client objectives, the manifold and
/// the eigen-oracle reference.
pub struct Problem {
    pub global: GlobalObjective,
    pub kind: ManifoldKind,
    pub truth: GroundTruth,
}

/// Loads a UCI-style CSV: one header line, features then a trailing label
/// column.
pub fn load_labeled_csv(path: &Path) -> Result<DataMatrix> {
    let file = File::open(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    let mut lines = BufReader::new(file).lines();
    let _header = lines.next();
    let first = lines
        .next()
        .transpose()
        .map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: e,
        })?
        .ok_or_else(|| Error::Format {
            path: path.display().to_string(),
            message: "no data rows after the header".into(),
        })?;
    let cols = first.split(',').count();
    if cols < 2 {
        return Err(Error::Format {
            path: path.display().to_string(),
            message: "expected at least one feature and a label column".into(),
        });
    }
    data::load_csv(path, true, Some(cols - 1))
}

pub fn load_dataset(spec: &ExperimentSpec) -> Result<DataMatrix> {
    match &spec.dataset {
        DatasetSpec::Gaussian { p, d } => data::gen_gaussian(*p, *d, spec.algorithm.seed),
        DatasetSpec::Csv { path } => load_labeled_csv(path),
        DatasetSpec::Idx { path } => data::load_idx(path),
    }
}

/// Builds the federated objective: a seeded shuffle-and-split of the rows
/// into n clients, a normalized Gram matrix per client, plus the oracle
/// ground truth of the mean covariance.
pub fn build_problem(spec: &ExperimentSpec) -> Result<Problem> {
    spec.validate()?;
    let mut matrix = load_dataset(spec)?;
    if spec.standardize {
        matrix.standardize();
    } else if spec.center {
        matrix.center();
    }
    let d = matrix.features();
    if spec.r > d {
        return Err(Error::InvalidConfig(format!(
            "r = {} exceeds the feature dimension {}",
            spec.r, d
        )));
    }
    let n = spec.algorithm.num_clients;
    let partition = data::partition_equal(matrix.samples(), n, Some(spec.algorithm.seed))?;
    let mut clients = Vec::with_capacity(n);
    for i in 0..n {
        let block = matrix.select_rows(&partition.client_rows(i));
        clients.push(QuadraticObjective::new(data::covariance(&block, true))?);
    }
    let global = GlobalObjective::new(clients)?;
    let truth = metrics::ground_truth(&global, spec.r)?;
    let kind = if spec.r == 1 {
        ManifoldKind::sphere(d)
    } else {
        ManifoldKind::stiefel(d, spec.r)
    };
    Ok(Problem { global, kind, truth })
}
