//! Experiment configuration: a JSON file merged with command-line overrides.

use crate::CliError;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    SparseRegression,
    Denoising,
    DiscretizationSweep,
    KnapsackPath,
    Robust,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::SparseRegression => "sparse_regression",
            ExperimentKind::Denoising => "denoising",
            ExperimentKind::DiscretizationSweep => "discretization_sweep",
            ExperimentKind::KnapsackPath => "knapsack_path",
            ExperimentKind::Robust => "robust",
        }
    }
}

impl FromStr for ExperimentKind {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "sparse_regression" => Ok(ExperimentKind::SparseRegression),
            "denoising" => Ok(ExperimentKind::Denoising),
            "discretization_sweep" => Ok(ExperimentKind::DiscretizationSweep),
            "knapsack_path" => Ok(ExperimentKind::KnapsackPath),
            "robust" => Ok(ExperimentKind::Robust),
            other => Err(CliError::Config(format!(
                "unknown experiment '{other}' (expected sparse_regression, denoising, \
                 discretization_sweep, knapsack_path, or robust)"
            ))),
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    MinNorm,
    Pgd,
    Discretized,
}

impl SolverKind {
    pub fn name(&self) -> &'static str {
        match self {
            SolverKind::MinNorm => "minnorm",
            SolverKind::Pgd => "pgd",
            SolverKind::Discretized => "discretized",
        }
    }
}

impl FromStr for SolverKind {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "minnorm" => Ok(SolverKind::MinNorm),
            "pgd" => Ok(SolverKind::Pgd),
            "discretized" => Ok(SolverKind::Discretized),
            other => Err(CliError::Config(format!(
                "unknown solver '{other}' (expected minnorm, pgd, or discretized)"
            ))),
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Full experiment configuration. Field defaults mirror the reference
/// experimental protocol: tolerance 1e-4, at most 100 iterations, penalty
/// strength 0.05, smoothing weight 0.8, five timing repeats, discretization
/// level 51 (101 for denoising).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub n: usize,
    pub seed: u64,
    pub lambda: f64,
    pub mu_smooth: f64,
    /// Discretization levels; empty means the per-experiment default.
    pub k_list: Vec<usize>,
    pub tol: f64,
    pub max_iter: usize,
    pub repeats: usize,
    pub solvers: Vec<SolverKind>,
    pub output_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            experiment: ExperimentKind::SparseRegression,
            n: 100,
            seed: 0,
            lambda: 0.05,
            mu_smooth: 0.8,
            k_list: Vec::new(),
            tol: 1e-4,
            max_iter: 100,
            repeats: 5,
            solvers: vec![
                SolverKind::MinNorm,
                SolverKind::Pgd,
                SolverKind::Discretized,
            ],
            output_dir: PathBuf::from("out"),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("bad config file: {e}")))
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Discretization levels to run, falling back to the per-experiment default.
    pub fn effective_k_list(&self) -> Vec<usize> {
        if !self.k_list.is_empty() {
            return self.k_list.clone();
        }
        match self.experiment {
            ExperimentKind::Denoising => vec![101],
            ExperimentKind::DiscretizationSweep => vec![50, 100, 200, 400],
            _ => vec![51],
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.solvers.is_empty() {
            return Err(CliError::Config(
                "solver list is empty; pass e.g. --solvers minnorm,pgd,discretized".into(),
            ));
        }
        if self.n == 0 {
            return Err(CliError::Config("n must be at least 1".into()));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(CliError::Config("tol must be positive".into()));
        }
        if self.max_iter == 0 {
            return Err(CliError::Config("max_iter must be at least 1".into()));
        }
        if self.repeats == 0 {
            return Err(CliError::Config("repeats must be at least 1".into()));
        }
        let ks = self.effective_k_list();
        if ks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CliError::Config("k_list must be strictly ascending".into()));
        }
        if ks.iter().any(|k| *k < 2) {
            return Err(CliError::Config("every k must be at least 2".into()));
        }
        Ok(())
    }
}
